"""
Lattice graphs on the integer points of a cube.

Vertices are the points of Z^n with |v_i| <= s/2 in lexicographic order; two
vertices are adjacent when their Euclidean distance is below 2r, which in
integer arithmetic is a squared distance of at most 4r^2 - 1. Pairs are found
with a cell list of bucket side 2r, so each point is only compared against the
3^n buckets around its own.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import TextIO

import numpy as np
from scipy import sparse

from .config import PackingConfig, get_packing_config, worker_count
from .errors import BudgetExceededError, InvalidParamsError
from .geometry import unit_ball_volume
from .params import PackingParams

logger = logging.getLogger(__name__)

__all__ = [
    "LatticeGraph",
    "PackingParams",
    "ShellProfile",
    "build_graph",
    "build_neighborhood_graph",
    "count_ball_lattice_points",
    "dump_graph",
    "edge_count",
    "enumerate_cube_points",
    "find_close_pairs",
    "max_degree",
    "neighborhood_edge_max",
    "shell_profile",
    "triangle_count",
]

# Points handled per cell-list task
_CHUNK_POINTS = 1 << 16
# Rows per block in the all-pairs fallback
_BRUTE_BLOCK_ROWS = 512
# Upper bound on the sparse products formed at once when counting neighborhood edges
_PRODUCT_BLOCK_ENTRIES = 1 << 22


@dataclass(frozen=True, eq=False)
class LatticeGraph:
    """
    Geometric graph on integer points with the edge rule d^2 <= 4r^2 - 1.

    Attributes:
        params: Parameters the graph was built from
        vertices: (N, n) int64 array of coordinates in lexicographic order
        adjacency: Symmetric N x N CSR matrix with sorted indices and no diagonal
        kind: "cube" for G_n, "neighborhood" for the origin's neighborhood graph H_n
    """

    params: PackingParams
    vertices: np.ndarray
    adjacency: sparse.csr_matrix
    kind: str = "cube"
    _index: dict[tuple[int, ...], int] = field(default_factory=dict, repr=False)

    @property
    def vertex_count(self) -> int:
        return int(self.vertices.shape[0])

    @cached_property
    def degrees(self) -> np.ndarray:
        """Degree of every vertex."""
        return np.diff(self.adjacency.indptr).astype(np.int64)

    @cached_property
    def d_max(self) -> int:
        """Maximum degree (0 for an edgeless or empty graph)."""
        return int(self.degrees.max()) if self.vertex_count else 0

    @cached_property
    def edge_count(self) -> int:
        return int(self.adjacency.nnz // 2)

    @cached_property
    def neighborhood_edge_counts(self) -> np.ndarray:
        """Number of edges induced by each vertex's open neighborhood."""
        count = self.vertex_count
        counts = np.zeros(count, dtype=np.int64)
        if count == 0:
            return counts
        a = self.adjacency.astype(np.int32)
        # a block of rows has at most rows * d_max^2 products
        block = max(1, _PRODUCT_BLOCK_ENTRIES // max(1, self.d_max * self.d_max))
        for start in range(0, count, block):
            rows = a[start : start + block]
            # (A @ A)[v, u] counts common neighbors; masking by A keeps edges inside N(v)
            closed_walks = (rows @ a).multiply(rows)
            counts[start : start + block] = np.asarray(closed_walks.sum(axis=1)).ravel() // 2
        return counts

    @cached_property
    def triangle_count(self) -> int:
        return int(self.neighborhood_edge_counts.sum() // 3)

    @cached_property
    def neighborhood_edge_max(self) -> int:
        counts = self.neighborhood_edge_counts
        return int(counts.max()) if counts.size else 0

    def neighbors(self, index: int) -> np.ndarray:
        """Sorted neighbor indices of a vertex."""
        start, stop = self.adjacency.indptr[index], self.adjacency.indptr[index + 1]
        return self.adjacency.indices[start:stop]

    def is_adjacent(self, i: int, j: int) -> bool:
        neighbors = self.neighbors(i)
        position = np.searchsorted(neighbors, j)
        return bool(position < neighbors.size and neighbors[position] == j)

    def index_of(self, point: tuple[int, ...] | list[int] | np.ndarray) -> int:
        """
        Index of a vertex given its coordinates.

        Raises:
            KeyError: If the point is not a vertex
        """
        if not self._index:
            self._index.update(
                (tuple(int(x) for x in row), i) for i, row in enumerate(self.vertices)
            )
        return self._index[tuple(int(x) for x in point)]


@dataclass(frozen=True)
class ShellProfile:
    """
    Number of lattice points at each squared distance from the origin.

    Attributes:
        params: Parameters whose ball of radius 2r is profiled
        counts: k -> |U_k| for k = 1 .. 4r^2 - 1 (zero entries kept)
    """

    params: PackingParams
    counts: dict[int, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def shell_volume_bound(self, k: int) -> float:
        """Volume bound V_n (sqrt(k) + sqrt(n)/2)^n on |U_k|."""
        n = self.params.n
        return unit_ball_volume(n) * (math.sqrt(k) + 0.5 * math.sqrt(n)) ** n


def _resolve_config(config: PackingConfig | None) -> PackingConfig:
    return config if config is not None else get_packing_config()


def _check_budget(quantity: str, predicted: int, budget: int) -> None:
    if predicted > budget:
        logger.info("Refusing instance: %s=%s over budget %d", quantity, predicted, budget)
        raise BudgetExceededError(quantity, predicted, budget)


def enumerate_cube_points(
    n: int, s: int, budget_vertices: int | None = None
) -> np.ndarray:
    """
    All integer points with |v_i| <= s/2, lexicographically sorted.

    Args:
        n: Dimension (>= 1)
        s: Even cube side (>= 0)
        budget_vertices: Cap on (s+1)^n; defaults to the configured budget

    Returns:
        (s+1)^n x n int64 array

    Raises:
        BudgetExceededError: If (s+1)^n exceeds the budget
    """
    if n < 1 or s < 0 or s % 2:
        raise InvalidParamsError(f"need n >= 1 and even s >= 0, got n={n}, s={s}")
    budget = budget_vertices if budget_vertices is not None else get_packing_config().budget_vertices
    _check_budget("vertices", (s + 1) ** n, budget)
    half = s // 2
    axis = np.arange(-half, half + 1, dtype=np.int64)
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([grid.ravel() for grid in grids], axis=1)


def _empty_pairs() -> tuple[np.ndarray, np.ndarray]:
    return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)


def _canonical_pairs(parts: list[tuple[np.ndarray, np.ndarray]]) -> tuple[np.ndarray, np.ndarray]:
    if not parts:
        return _empty_pairs()
    rows = np.concatenate([part[0] for part in parts])
    cols = np.concatenate([part[1] for part in parts])
    order = np.lexsort((cols, rows))
    return rows[order], cols[order]


def _brute_force_pairs(
    points: np.ndarray, limit_sq: int, workers: int
) -> tuple[np.ndarray, np.ndarray]:
    count = points.shape[0]

    def block(start: int) -> tuple[np.ndarray, np.ndarray]:
        stop = min(start + _BRUTE_BLOCK_ROWS, count)
        diff = points[start:stop, None, :] - points[None, start:, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        local_i, local_j = np.nonzero(d2 <= limit_sq)
        rows = local_i + start
        cols = local_j + start
        keep = rows < cols
        return rows[keep], cols[keep]

    starts = range(0, count, _BRUTE_BLOCK_ROWS)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(block, starts))
    return _canonical_pairs(parts)


def find_close_pairs(
    points: np.ndarray,
    limit_sq: int,
    bucket_side: int,
    workers: int | None = None,
    budget_comparisons: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    All index pairs i < j with squared distance at most limit_sq.

    Points are hashed into buckets of side bucket_side (>= sqrt(limit_sq)), so
    close pairs always lie in the same or adjacent buckets. When 3^n exceeds
    the number of occupied buckets the scan falls back to all pairs.

    Args:
        points: (N, n) integer array
        limit_sq: Largest squared distance that counts as close
        bucket_side: Cell side length
        workers: Thread count; the result does not depend on it
        budget_comparisons: Cap on the predicted number of distance evaluations

    Returns:
        (rows, cols) int64 arrays, sorted lexicographically

    Raises:
        BudgetExceededError: If the predicted comparisons exceed the budget
    """
    points = np.asarray(points, dtype=np.int64)
    count = points.shape[0]
    if count < 2 or limit_sq < 0:
        return _empty_pairs()
    if bucket_side < 1 or bucket_side * bucket_side < limit_sq:
        raise InvalidParamsError(f"bucket side {bucket_side} too small for squared limit {limit_sq}")
    workers = workers if workers is not None else worker_count()
    if budget_comparisons is None:
        budget_comparisons = get_packing_config().budget_comparisons
    n = points.shape[1]

    cells = (points - points.min(axis=0)) // bucket_side
    extents = cells.max(axis=0) + 1
    linear_span = math.prod(int(e) for e in extents)
    occupied = len(np.unique(cells, axis=0))
    offsets_count = 3**n

    if offsets_count > occupied or linear_span >= 2**62:
        _check_budget("comparisons", count * (count - 1) // 2, budget_comparisons)
        logger.debug("All-pairs scan over %d points", count)
        return _brute_force_pairs(points, limit_sq, workers)

    per_bucket = math.ceil(count / occupied)
    _check_budget("comparisons", count * min(count, offsets_count * per_bucket), budget_comparisons)

    strides = np.ones(n, dtype=np.int64)
    for axis in range(n - 2, -1, -1):
        strides[axis] = strides[axis + 1] * extents[axis + 1]
    linear = cells @ strides
    order = np.argsort(linear, kind="stable")
    sorted_linear = linear[order]

    def scan(task: tuple[tuple[int, ...], int]) -> tuple[np.ndarray, np.ndarray]:
        offset, start = task
        stop = min(start + _CHUNK_POINTS, count)
        source = np.arange(start, stop, dtype=np.int64)
        target_cells = cells[start:stop] + np.asarray(offset, dtype=np.int64)
        inside = np.all((target_cells >= 0) & (target_cells < extents), axis=1)
        source = source[inside]
        if source.size == 0:
            return _empty_pairs()
        target_linear = target_cells[inside] @ strides
        lo = np.searchsorted(sorted_linear, target_linear, side="left")
        hi = np.searchsorted(sorted_linear, target_linear, side="right")
        sizes = hi - lo
        total = int(sizes.sum())
        if total == 0:
            return _empty_pairs()
        rows = np.repeat(source, sizes)
        run_starts = np.repeat(np.cumsum(sizes) - sizes, sizes)
        positions = np.arange(total, dtype=np.int64) - run_starts + np.repeat(lo, sizes)
        cols = order[positions]
        keep = rows < cols
        rows, cols = rows[keep], cols[keep]
        diff = points[rows] - points[cols]
        close = np.einsum("ij,ij->i", diff, diff) <= limit_sq
        return rows[close], cols[close]

    tasks = [
        (offset, start)
        for offset in itertools.product((-1, 0, 1), repeat=n)
        for start in range(0, count, _CHUNK_POINTS)
    ]
    logger.debug(
        "Cell list: %d points, %d occupied buckets, %d tasks on %d workers",
        count, occupied, len(tasks), workers,
    )
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(scan, tasks))
    return _canonical_pairs(parts)


def _adjacency_from_pairs(count: int, rows: np.ndarray, cols: np.ndarray) -> sparse.csr_matrix:
    data = np.ones(2 * rows.size, dtype=np.int32)
    matrix = sparse.coo_matrix(
        (data, (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
        shape=(count, count),
    ).tocsr()
    matrix.sort_indices()
    return matrix


def _graph_from_points(
    params: PackingParams,
    points: np.ndarray,
    kind: str,
    config: PackingConfig,
    workers: int | None,
) -> LatticeGraph:
    rows, cols = find_close_pairs(
        points,
        params.edge_limit_sq,
        bucket_side=2 * params.r,
        workers=workers,
        budget_comparisons=config.budget_comparisons,
    )
    adjacency = _adjacency_from_pairs(points.shape[0], rows, cols)
    graph = LatticeGraph(params=params, vertices=points, adjacency=adjacency, kind=kind)
    logger.info(
        "Built %s graph n=%d r=%d s=%d: %d vertices, %d edges",
        kind, params.n, params.r, params.s, graph.vertex_count, graph.edge_count,
    )
    return graph


def build_graph(
    p: PackingParams, config: PackingConfig | None = None, workers: int | None = None
) -> LatticeGraph:
    """
    Build G_n on the lattice points of K0.

    Args:
        p: Packing parameters
        config: Budgets; defaults to the loaded configuration
        workers: Thread count; the graph is identical for every value

    Returns:
        The lattice graph

    Raises:
        BudgetExceededError: If the vertex or comparison budget is exceeded
    """
    config = _resolve_config(config)
    points = enumerate_cube_points(p.n, p.s, config.budget_vertices)
    return _graph_from_points(p, points, "cube", config, workers)


def max_degree(g: LatticeGraph) -> int:
    """Maximum vertex degree d_n."""
    return g.d_max


def edge_count(g: LatticeGraph) -> int:
    """Number of edges |E|."""
    return g.edge_count


def triangle_count(g: LatticeGraph) -> int:
    """Number of triangles T_n."""
    return g.triangle_count


def neighborhood_edge_max(g: LatticeGraph) -> int:
    """Largest number of edges induced by a single vertex's neighborhood (t_n)."""
    return g.neighborhood_edge_max


def count_ball_lattice_points(
    n: int, r: int, budget_comparisons: int | None = None
) -> int:
    """
    Number of integer points in the open ball of radius 2r about the origin.

    Counted exactly by dynamic programming over dimensions: the number of
    points of Z^m with squared norm <= b is the sum over the last coordinate x
    of the count in dimension m-1 with bound b - x^2.

    Args:
        n: Dimension (>= 1)
        r: Radius parameter (>= 1)
        budget_comparisons: Cap on the dynamic-programming work

    Returns:
        |{v in Z^n : sum v_i^2 <= 4r^2 - 1}| (this is d_n + 1 for an unclipped graph)

    Raises:
        BudgetExceededError: If the work estimate exceeds the budget
    """
    if n < 1 or r < 1:
        raise InvalidParamsError(f"need n >= 1 and r >= 1, got n={n}, r={r}")
    bound = 4 * r * r - 1
    root = math.isqrt(bound)
    budget = budget_comparisons if budget_comparisons is not None else get_packing_config().budget_comparisons
    _check_budget("comparisons", n * (bound + 1) * (2 * root + 1), budget)

    # table[b] = number of points of Z^m with squared norm <= b
    table = np.ones(bound + 1, dtype=object)
    squares = [x * x for x in range(root + 1)]
    for _ in range(n):
        updated = np.zeros(bound + 1, dtype=object)
        for x, square in enumerate(squares):
            weight = 1 if x == 0 else 2
            updated[square:] += weight * table[: bound + 1 - square]
        table = updated
    return int(table[bound])


def _neighborhood_points(p: PackingParams, budget_vertices: int) -> np.ndarray:
    reach = 2 * p.r - 1
    _check_budget("vertices", (2 * reach + 1) ** p.n, budget_vertices)
    box = enumerate_cube_points(p.n, 2 * reach, budget_vertices)
    norms = np.einsum("ij,ij->i", box, box)
    return box[(norms >= 1) & (norms <= p.edge_limit_sq)]


def build_neighborhood_graph(
    p: PackingParams, config: PackingConfig | None = None, workers: int | None = None
) -> LatticeGraph:
    """
    Build H_n, the graph induced by the origin's full neighborhood.

    Vertices are the nonzero integer points within distance < 2r of the origin;
    the result does not depend on s. Its edge count is t_n for any cube large
    enough that the origin's neighborhood is not clipped.

    Raises:
        BudgetExceededError: If the (4r-1)^n enumeration box exceeds the budget
    """
    config = _resolve_config(config)
    points = _neighborhood_points(p, config.budget_vertices)
    return _graph_from_points(p, points, "neighborhood", config, workers)


def shell_profile(p: PackingParams, config: PackingConfig | None = None) -> ShellProfile:
    """
    Count the lattice points on each squared-distance shell k = 1 .. 4r^2 - 1.

    Representation counts are the coefficients of the n-th power of the
    truncated theta series sum_x q^(x^2).

    Raises:
        BudgetExceededError: If the number of shells exceeds the vertex budget
    """
    config = _resolve_config(config)
    limit = p.edge_limit_sq
    _check_budget("vertices", limit, config.budget_vertices)
    series = np.zeros(limit + 1, dtype=object)
    series[0] = 1
    for _ in range(p.n):
        product = series.copy()
        for x in range(1, math.isqrt(limit) + 1):
            square = x * x
            product[square:] += 2 * series[: limit + 1 - square]
        series = product
    return ShellProfile(params=p, counts={k: int(series[k]) for k in range(1, limit + 1)})


def dump_graph(g: LatticeGraph, destination: str | Path | TextIO) -> None:
    """
    Write the debug dump: `v <index> <coords...>` lines, then `e <i> <j>` with i < j.
    """
    if isinstance(destination, (str, Path)):
        with Path(destination).open("w", encoding="utf-8") as handle:
            dump_graph(g, handle)
        return
    for index, row in enumerate(g.vertices):
        destination.write(f"v {index} {' '.join(str(int(x)) for x in row)}\n")
    upper = sparse.triu(g.adjacency, k=1).tocoo()
    order = np.lexsort((upper.col, upper.row))
    for i, j in zip(upper.row[order], upper.col[order], strict=True):
        destination.write(f"e {int(i)} {int(j)}\n")
