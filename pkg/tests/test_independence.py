"""Tests for independent-set extraction and independence lower bounds."""

import networkx as nx
import pytest

from src.config import PackingConfig
from src.errors import BudgetExceededError
from src.independence import (
    Algorithm,
    aks_lower_bound,
    degeneracy_order,
    exact_max_is,
    greedy_maximal_is,
    is_independent,
    is_maximal,
    jv_lower_bound,
    min_degree_greedy_is,
    trivial_lower_bound,
)
from src.lattice_graph import build_graph
from src.params import PackingParams
from tests.conftest import to_networkx

SUITE = [(1, 1, 8), (1, 2, 10), (2, 1, 2), (2, 1, 8), (2, 2, 6), (2, 3, 10), (3, 1, 2)]


def networkx_alpha(g):
    """Independence number as the largest clique of the complement."""
    _, size = nx.max_weight_clique(nx.complement(to_networkx(g)), weight=None)
    return size


@pytest.mark.unit
class TestGreedy:
    """Test the two greedy extractors."""

    def test_lex_greedy_on_king_grid(self, king_9x9):
        """The scan takes every point with both coordinates even."""
        iset = greedy_maximal_is(king_9x9)

        assert iset.size == 25
        assert iset.algorithm is Algorithm.LEX_GREEDY
        assert all(x % 2 == 0 for x in iset.coordinates(king_9x9).ravel())

    def test_lex_greedy_on_path(self, path_graph):
        iset = greedy_maximal_is(path_graph)

        assert iset.vertex_indices == (0, 2, 4, 6, 8)

    def test_min_degree_takes_corners(self, king_3x3):
        iset = min_degree_greedy_is(king_3x3)

        assert iset.vertex_indices == (0, 2, 6, 8)
        assert iset.algorithm is Algorithm.MIN_DEGREE_GREEDY

    @pytest.mark.parametrize("n, r, s", SUITE)
    def test_maximal_and_above_floor(self, n, r, s, settings):
        g = build_graph(PackingParams(n=n, r=r, s=s), settings)
        floor = trivial_lower_bound(g.vertex_count, g.d_max)

        for iset in (greedy_maximal_is(g), min_degree_greedy_is(g)):
            assert is_independent(g, iset.vertex_indices)
            assert is_maximal(g, iset.vertex_indices)
            assert iset.is_maximal
            assert iset.size >= floor

    def test_edgeless_graph(self, settings):
        g = build_graph(PackingParams(n=2, r=1, s=0), settings)

        assert greedy_maximal_is(g).vertex_indices == (0,)
        assert min_degree_greedy_is(g).vertex_indices == (0,)


@pytest.mark.unit
class TestExact:
    """Test the branch-and-bound solver."""

    def test_king_3x3(self, king_3x3):
        iset = exact_max_is(king_3x3)

        assert iset.size == 4
        assert iset.algorithm is Algorithm.EXACT
        assert is_independent(king_3x3, iset.vertex_indices)

    def test_king_9x9(self, king_9x9):
        assert exact_max_is(king_9x9).size == 25

    @pytest.mark.parametrize("n, r, s", SUITE)
    def test_matches_networkx(self, n, r, s, settings):
        g = build_graph(PackingParams(n=n, r=r, s=s), settings)
        best = exact_max_is(g)

        assert best.size == networkx_alpha(g)
        assert best.size >= min_degree_greedy_is(g).size
        assert is_independent(g, best.vertex_indices)

    def test_returns_vertex_indices(self, king_9x9):
        """Solutions map back from bit positions to vertex indices."""
        best = exact_max_is(king_9x9)

        assert list(best.vertex_indices) == sorted(best.vertex_indices)
        assert is_independent(king_9x9, best.vertex_indices)
        assert is_maximal(king_9x9, best.vertex_indices)

    def test_node_budget(self, cube_3d):
        with pytest.raises(BudgetExceededError):
            exact_max_is(cube_3d, budget=0)

    def test_default_budget_from_config(self, king_3x3, mocker):
        mocker.patch(
            "src.independence.get_packing_config",
            return_value=PackingConfig(exact_node_budget=0),
        )

        with pytest.raises(BudgetExceededError):
            exact_max_is(king_3x3)


@pytest.mark.unit
class TestLowerBounds:
    """Test the clamped triangle and local-sparsity bounds."""

    def test_trivial(self):
        assert trivial_lower_bound(81, 8) == pytest.approx(9.0)

    def test_ratio_clamped_at_one(self):
        """A triangle-free graph is evaluated as if T/|V| were 1."""
        assert aks_lower_bound(1000, 1024, 0) == pytest.approx(1000 / 10240 * 10)
        assert jv_lower_bound(1000, 1024, 0) == pytest.approx(1000 / 10240 * 10)

    def test_floor_by_trivial_bound(self):
        assert jv_lower_bound(100, 8, 12) == pytest.approx(100 / 9)
        assert aks_lower_bound(100, 8, 1000) == pytest.approx(100 / 9)

    def test_degree_below_one(self):
        assert jv_lower_bound(5, 0, 0) == pytest.approx(5.0)

    def test_jv_uses_t_over_three(self):
        value = jv_lower_bound(10**6, 2**20, 3 * 2**10)

        assert value == pytest.approx(10**6 / (10 * 2**20) * (20 - 5))

    @pytest.mark.parametrize("n, r, s", SUITE)
    def test_never_above_alpha(self, n, r, s, settings):
        g = build_graph(PackingParams(n=n, r=r, s=s), settings)
        alpha = exact_max_is(g).size

        assert aks_lower_bound(g.vertex_count, g.d_max, g.triangle_count) <= alpha
        assert jv_lower_bound(g.vertex_count, g.d_max, g.neighborhood_edge_max) <= alpha


@pytest.mark.unit
class TestDegeneracyOrder:
    """Test the smallest-last vertex order."""

    def test_starts_at_a_corner(self, king_3x3):
        order = degeneracy_order(king_3x3)

        assert sorted(order) == list(range(9))
        assert order[0] == 0
        assert order[-1] != 0

    @pytest.mark.parametrize("n, r, s", SUITE)
    def test_later_neighbors_within_degeneracy(self, n, r, s, settings):
        g = build_graph(PackingParams(n=n, r=r, s=s), settings)
        order = degeneracy_order(g)
        position = {v: i for i, v in enumerate(order)}
        degeneracy = max(nx.core_number(to_networkx(g)).values())

        assert sorted(order) == list(range(g.vertex_count))
        for v in order:
            later = sum(1 for u in g.neighbors(v) if position[int(u)] > position[v])
            assert later <= degeneracy
