"""Tests for the Monte Carlo and brute-force oracles."""

import math

import pytest

from src.config import PackingConfig
from src.errors import BudgetExceededError, GeometryDomainError
from src.geometry import CapGeometry, intersection_volume_exact
from src.independence import greedy_maximal_is
from src.lattice_graph import build_graph
from src.oracle import (
    BruteStats,
    _generator,
    brute_force_graph_equal,
    brute_stats,
    mc_ball_intersection,
    mc_packing_density,
)
from src.packing import assemble, make_packing
from src.params import PackingParams

SAMPLES = 200_000


@pytest.mark.unit
class TestBallIntersection:
    """Test the Monte Carlo intersection estimate."""

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_agrees_with_exact(self, n):
        estimate = mc_ball_intersection(n, 1.0, 0.25, SAMPLES, seed=11)
        exact = intersection_volume_exact(CapGeometry.from_delta(n, 1.0, 0.25))

        assert estimate.samples == SAMPLES
        assert estimate.std_error > 0
        assert estimate.agrees_with(exact)

    @pytest.mark.slow
    @pytest.mark.parametrize("rho", [1.0, 3.5])
    @pytest.mark.parametrize("delta", [0.1, 0.25, 0.49])
    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_full_volume_grid(self, n, delta, rho):
        """Every grid case at 10^6 samples; 4 sigma leaves room for 30 comparisons."""
        estimate = mc_ball_intersection(n, rho, delta, 1_000_000, seed=2024)
        exact = intersection_volume_exact(CapGeometry.from_delta(n, rho, delta))

        assert estimate.agrees_with(exact, sigmas=4.0)
        assert estimate.std_error < 0.01 * exact

    def test_same_seed_same_estimate_any_thread_count(self):
        one = mc_ball_intersection(3, 3.5, 0.1, 20_000, seed=5, workers=1)
        many = mc_ball_intersection(3, 3.5, 0.1, 20_000, seed=5, workers=8)

        assert one == many

    def test_different_seed_different_estimate(self):
        first = mc_ball_intersection(3, 1.0, 0.3, 20_000, seed=1)
        second = mc_ball_intersection(3, 1.0, 0.3, 20_000, seed=2)

        assert first.mean != second.mean

    def test_neighboring_seeds_give_different_estimates(self):
        """Seeds that differ only in their low bits must not share shard streams."""
        means = {mc_ball_intersection(3, 1.0, 0.3, 20_000, seed=seed).mean for seed in range(8)}

        assert len(means) > 4

    def test_every_seed_and_shard_has_its_own_stream(self):
        first_draws = {
            _generator(seed, shard).random()
            for seed in range(16)
            for shard in range(8)
        }

        assert len(first_draws) == 16 * 8

    def test_shard_count_changes_stream(self):
        config = PackingConfig(mc_shards=3)
        estimate = mc_ball_intersection(2, 1.0, 0.49, 30_000, seed=9, config=config)

        assert estimate.agrees_with(intersection_volume_exact(CapGeometry.from_delta(2, 1.0, 0.49)), sigmas=5)

    def test_too_few_samples(self):
        with pytest.raises(GeometryDomainError):
            mc_ball_intersection(2, 1.0, 0.25, 999)

    def test_dimension_limit(self):
        with pytest.raises(GeometryDomainError):
            mc_ball_intersection(9, 1.0, 0.25, 1000)

    def test_delta_domain(self):
        with pytest.raises(GeometryDomainError):
            mc_ball_intersection(2, 1.0, 1.5, 1000)


@pytest.mark.unit
class TestPackingDensity:
    """Test the Monte Carlo density estimate."""

    def test_king_packing(self, king_9x9):
        packing = assemble(king_9x9.params, greedy_maximal_is(king_9x9), king_9x9)
        estimate = mc_packing_density(packing, SAMPLES, seed=3)

        assert estimate.agrees_with(math.pi / 4)

    def test_path_fills_the_line(self, path_graph):
        packing = assemble(path_graph.params, greedy_maximal_is(path_graph), path_graph)
        estimate = mc_packing_density(packing, 10_000, seed=3)

        assert estimate.mean == pytest.approx(1.0)

    def test_neighboring_seeds_give_different_estimates(self, king_9x9):
        packing = assemble(king_9x9.params, greedy_maximal_is(king_9x9), king_9x9)
        means = {mc_packing_density(packing, 20_000, seed=seed).mean for seed in range(40, 48)}

        assert len(means) > 4

    def test_empty_packing_is_zero(self):
        estimate = mc_packing_density(make_packing(PackingParams(n=2, r=1, s=8), []), 1000)

        assert estimate.mean == 0.0
        assert estimate.std_error == 0.0

    def test_dimension_limit(self):
        packing = make_packing(PackingParams(n=5, r=1, s=0), [[0, 0, 0, 0, 0]])

        with pytest.raises(GeometryDomainError):
            mc_packing_density(packing, 1000)


@pytest.mark.unit
class TestBruteForce:
    """Test the all-pairs graph oracle."""

    def test_king_statistics(self, king_3x3):
        assert brute_stats(king_3x3) == BruteStats(d_max=8, edge_count=20, triangles=16, neighborhood_edge_max=12)

    @pytest.mark.parametrize("n, r, s", [(1, 2, 10), (2, 2, 6), (3, 1, 4), (3, 2, 4)])
    def test_fast_path_matches(self, n, r, s, settings):
        g = build_graph(PackingParams(n=n, r=r, s=s), settings)
        reference = brute_stats(g, settings)

        assert brute_force_graph_equal(g, settings)
        assert (reference.d_max, reference.edge_count, reference.triangles, reference.neighborhood_edge_max) == (
            g.d_max,
            g.edge_count,
            g.triangle_count,
            g.neighborhood_edge_max,
        )
        assert 3 * reference.triangles == int(g.neighborhood_edge_counts.sum())

    def test_size_limit(self, king_9x9):
        with pytest.raises(BudgetExceededError):
            brute_stats(king_9x9, PackingConfig(brute_force_limit=10))
