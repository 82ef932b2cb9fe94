"""
Independent sets in lattice graphs and lower bounds on their size.

Three extractors share one result type: a lexicographic greedy scan, a
minimum-degree greedy, and an exact branch-and-bound solver for small graphs.
The locally-sparse lower bounds are evaluated with a conservative clamp and
are never reported below the trivial |V|/(d+1) bound.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .config import get_packing_config
from .errors import BudgetExceededError
from .lattice_graph import LatticeGraph

logger = logging.getLogger(__name__)


class Algorithm(str, Enum):
    """Provenance of an independent set."""

    LEX_GREEDY = "lex-greedy"
    MIN_DEGREE_GREEDY = "min-degree-greedy"
    EXACT = "exact"


@dataclass(frozen=True)
class IndependentSet:
    """
    A set of pairwise non-adjacent vertices.

    Attributes:
        vertex_indices: Sorted vertex indices into the source graph
        is_maximal: True if no further vertex can be added
        algorithm: Which extractor produced the set
    """

    vertex_indices: tuple[int, ...]
    is_maximal: bool
    algorithm: Algorithm

    @property
    def size(self) -> int:
        return len(self.vertex_indices)

    def coordinates(self, g: LatticeGraph) -> np.ndarray:
        """Coordinates of the chosen vertices, in index order."""
        return g.vertices[list(self.vertex_indices)] if self.vertex_indices else g.vertices[:0]


def is_independent(g: LatticeGraph, indices: tuple[int, ...] | list[int]) -> bool:
    """True if no two listed vertices are adjacent."""
    chosen = np.zeros(g.vertex_count, dtype=bool)
    chosen[list(indices)] = True
    return not any(chosen[g.neighbors(v)].any() for v in indices)


def is_maximal(g: LatticeGraph, indices: tuple[int, ...] | list[int]) -> bool:
    """True if every unlisted vertex has a listed neighbor."""
    covered = np.zeros(g.vertex_count, dtype=bool)
    for v in indices:
        covered[v] = True
        covered[g.neighbors(v)] = True
    return bool(covered.all())


def greedy_maximal_is(g: LatticeGraph) -> IndependentSet:
    """
    Maximal independent set by a lexicographic scan.

    Each vertex is taken unless a neighbor was already taken. Any maximal set
    has at least |V|/(d_max+1) vertices.
    """
    blocked = np.zeros(g.vertex_count, dtype=bool)
    chosen: list[int] = []
    for v in range(g.vertex_count):
        if blocked[v]:
            continue
        chosen.append(v)
        blocked[g.neighbors(v)] = True
    logger.debug("Lexicographic greedy chose %d of %d vertices", len(chosen), g.vertex_count)
    return IndependentSet(tuple(chosen), True, Algorithm.LEX_GREEDY)


def min_degree_greedy_is(g: LatticeGraph) -> IndependentSet:
    """
    Maximal independent set by repeatedly taking a minimum-degree vertex.

    Degrees are taken in the graph that remains after deleting the closed
    neighborhoods of earlier picks; ties go to the lexicographically first vertex.
    """
    alive = np.ones(g.vertex_count, dtype=bool)
    degree = g.degrees.copy()
    heap = [(int(degree[v]), v) for v in range(g.vertex_count)]
    heapq.heapify(heap)
    chosen: list[int] = []

    while heap:
        current, v = heapq.heappop(heap)
        if not alive[v] or current != degree[v]:
            continue
        chosen.append(v)
        removed = [v] + [int(u) for u in g.neighbors(v) if alive[u]]
        alive[removed] = False
        for u in removed:
            for w in g.neighbors(u):
                if alive[w]:
                    degree[w] -= 1
                    heapq.heappush(heap, (int(degree[w]), int(w)))

    chosen.sort()
    logger.debug("Min-degree greedy chose %d of %d vertices", len(chosen), g.vertex_count)
    return IndependentSet(tuple(chosen), True, Algorithm.MIN_DEGREE_GREEDY)


def degeneracy_order(g: LatticeGraph) -> list[int]:
    """
    Vertices in smallest-last order.

    Each step removes a vertex of minimum degree in the remaining graph; ties
    go to the lexicographically first vertex.
    """
    alive = np.ones(g.vertex_count, dtype=bool)
    degree = g.degrees.copy()
    heap = [(int(degree[v]), v) for v in range(g.vertex_count)]
    heapq.heapify(heap)
    order: list[int] = []

    while heap:
        current, v = heapq.heappop(heap)
        if not alive[v] or current != degree[v]:
            continue
        order.append(v)
        alive[v] = False
        for u in g.neighbors(v):
            if alive[u]:
                degree[u] -= 1
                heapq.heappush(heap, (int(degree[u]), int(u)))
    return order


class _BranchAndBound:
    """Maximum independent set search with a greedy clique-cover bound.

    Vertices are bits of Python integers in smallest-last order. A partition of
    the candidates into cliques bounds how many of them an independent set can
    use, one per clique.
    """

    def __init__(self, g: LatticeGraph, node_budget: int) -> None:
        self.node_budget = node_budget
        self.nodes = 0
        self.order = degeneracy_order(g)
        position = {v: bit for bit, v in enumerate(self.order)}
        self.masks = [0] * g.vertex_count
        for v, bit in position.items():
            mask = 0
            for u in g.neighbors(v):
                mask |= 1 << position[int(u)]
            self.masks[bit] = mask
        self.position = position
        self.best: list[int] = []

    def clique_cover(self, candidates: int) -> list[tuple[int, int]]:
        cover: list[tuple[int, int]] = []
        remaining = candidates
        cliques = 0
        while remaining:
            cliques += 1
            pool = remaining
            while pool:
                low = pool & -pool
                v = low.bit_length() - 1
                cover.append((v, cliques))
                remaining &= ~low
                pool &= self.masks[v]
        return cover

    def expand(self, current: list[int], candidates: int) -> None:
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise BudgetExceededError("branch-and-bound nodes", self.nodes, self.node_budget)
        for v, bound in reversed(self.clique_cover(candidates)):
            if len(current) + bound <= len(self.best):
                return
            current.append(v)
            rest = candidates & ~self.masks[v] & ~(1 << v)
            if rest:
                self.expand(current, rest)
            elif len(current) > len(self.best):
                self.best = current.copy()
            current.pop()
            candidates &= ~(1 << v)

    def solve(self, incumbent: tuple[int, ...]) -> list[int]:
        self.best = [self.position[v] for v in incumbent]
        everything = (1 << len(self.masks)) - 1
        if everything:
            self.expand([], everything)
        return sorted(self.order[bit] for bit in self.best)


def exact_max_is(g: LatticeGraph, budget: int | None = None) -> IndependentSet:
    """
    Maximum independent set by branch and bound.

    The min-degree greedy set seeds the incumbent, so the search only has to
    prove or improve it.

    Args:
        g: Graph to solve (practical up to a few hundred vertices)
        budget: Node limit; defaults to the configured exact_node_budget

    Returns:
        A maximum independent set

    Raises:
        BudgetExceededError: When the node limit is reached before the proof completes
    """
    node_budget = budget if budget is not None else get_packing_config().exact_node_budget
    incumbent = min_degree_greedy_is(g).vertex_indices
    solver = _BranchAndBound(g, node_budget)
    best = solver.solve(incumbent)
    logger.info(
        "Exact independence number %d on %d vertices after %d nodes",
        len(best), g.vertex_count, solver.nodes,
    )
    return IndependentSet(tuple(best), True, Algorithm.EXACT)


def trivial_lower_bound(vertex_count: int, d: int) -> float:
    """Size guaranteed for any maximal independent set: |V|/(d+1)."""
    return vertex_count / (d + 1)


def _clamped_log_bound(vertex_count: int, d: int, ratio: float) -> float:
    trivial = trivial_lower_bound(vertex_count, max(d, 0))
    if d < 1:
        return trivial
    # clamping the ratio at 1 only lowers the bound
    ratio = max(ratio, 1.0)
    formula = vertex_count / (10.0 * d) * (math.log2(d) - 0.5 * math.log2(ratio))
    return max(formula, trivial)


def aks_lower_bound(vertex_count: int, d: int, T: int) -> float:
    """
    Triangle-count lower bound on the independence number.

    alpha >= (|V| / 10d) (log2 d - (1/2) log2(T/|V|)), with T/|V| clamped below
    at 1 and the result floored by |V|/(d+1).

    Args:
        vertex_count: |V|
        d: Maximum degree
        T: Number of triangles
    """
    ratio = T / vertex_count if vertex_count else 1.0
    return _clamped_log_bound(vertex_count, d, ratio)


def jv_lower_bound(vertex_count: int, d: int, t: int) -> float:
    """
    Local-sparsity lower bound: as aks_lower_bound with T/|V| replaced by t/3.

    Args:
        vertex_count: |V|
        d: Maximum degree
        t: Largest number of edges inside one neighborhood
    """
    return _clamped_log_bound(vertex_count, d, t / 3.0)
