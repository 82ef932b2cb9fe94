"""
Slow independent verifiers used as ground truth.

Monte Carlo estimators for ball-intersection volumes and packing densities,
and brute-force graph statistics computed straight from coordinates. Sampling
is split into a fixed number of shards, each driven by a Philox counter-based
generator whose 128-bit key holds the seed and the shard index side by side.
Shard results are merged in shard order, so estimates depend on (seed,
samples, shards) and not on threads.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .config import PackingConfig, get_packing_config, worker_count
from .errors import BudgetExceededError, GeometryDomainError
from .geometry import unit_ball_volume
from .lattice_graph import LatticeGraph
from .packing import Packing

logger = logging.getLogger(__name__)

MIN_SAMPLES = 1000
MAX_BALL_DIM = 8
MAX_PACKING_DIM = 4
_BATCH = 1 << 16
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class McEstimate:
    """
    A Monte Carlo estimate.

    Attributes:
        mean: Estimated value
        std_error: Sample standard deviation / sqrt(samples)
        samples: Number of samples
        seed: Base seed
    """

    mean: float
    std_error: float
    samples: int
    seed: int

    def agrees_with(self, value: float, sigmas: float = 3.0) -> bool:
        """True if value lies within `sigmas` standard errors of the mean."""
        return abs(self.mean - value) <= sigmas * self.std_error


@dataclass(frozen=True)
class BruteStats:
    """Reference graph statistics: max degree, edges, triangles, max neighborhood edges."""

    d_max: int
    edge_count: int
    triangles: int
    neighborhood_edge_max: int


def _generator(seed: int, shard: int) -> np.random.Generator:
    # low 64 key bits hold the seed, high 64 bits the shard index
    return np.random.Generator(np.random.Philox(key=(seed & _SEED_MASK) | (shard << 64)))


def _shard_sizes(samples: int, shards: int) -> list[int]:
    base, extra = divmod(samples, shards)
    return [base + (1 if index < extra else 0) for index in range(shards)]


def _check_samples(samples: int) -> None:
    if samples < MIN_SAMPLES:
        raise GeometryDomainError(f"need at least {MIN_SAMPLES} samples, got {samples}")


def _run_shards(task, sizes: list[int], workers: int | None) -> list[int]:  # type: ignore[no-untyped-def]
    with ThreadPoolExecutor(max_workers=workers or worker_count()) as pool:
        return list(pool.map(task, range(len(sizes)), sizes))


def _bernoulli_estimate(hits: int, samples: int, scale: float, seed: int) -> McEstimate:
    fraction = hits / samples
    variance = fraction * (1.0 - fraction) * samples / (samples - 1)
    return McEstimate(
        mean=scale * fraction,
        std_error=scale * math.sqrt(variance / samples),
        samples=samples,
        seed=seed,
    )


def mc_ball_intersection(
    n: int,
    rho: float,
    delta: float,
    samples: int | None = None,
    seed: int = 0,
    config: PackingConfig | None = None,
    workers: int | None = None,
) -> McEstimate:
    """
    Estimate the volume of two radius-rho balls with centers 2*rho*delta apart.

    Points are drawn uniformly in the first ball (rejection from its bounding
    cube) and the hit fraction in the second ball is scaled by V_n rho^n.

    Raises:
        GeometryDomainError: For n > 8, too few samples, or delta outside [0, 1]
    """
    config = config if config is not None else get_packing_config()
    samples = samples if samples is not None else config.mc_samples
    _check_samples(samples)
    if not 1 <= n <= MAX_BALL_DIM:
        raise GeometryDomainError(f"ball sampling supports 1 <= n <= {MAX_BALL_DIM}, got {n}")
    if not 0.0 <= delta <= 1.0 or rho <= 0:
        raise GeometryDomainError(f"need rho > 0 and delta in [0, 1], got rho={rho}, delta={delta}")
    offset = 2.0 * rho * delta

    def shard(index: int, size: int) -> int:
        rng = _generator(seed, index)
        hits = 0
        remaining = size
        while remaining:
            cube = rng.uniform(-rho, rho, size=(_BATCH, n))
            inside = cube[np.einsum("ij,ij->i", cube, cube) < rho * rho][:remaining]
            remaining -= inside.shape[0]
            inside[:, 0] -= offset
            hits += int(np.count_nonzero(np.einsum("ij,ij->i", inside, inside) < rho * rho))
        return hits

    sizes = _shard_sizes(samples, config.mc_shards)
    hits = sum(_run_shards(shard, sizes, workers))
    estimate = _bernoulli_estimate(hits, samples, unit_ball_volume(n) * rho**n, seed)
    logger.debug("MC intersection n=%d delta=%g: %g +- %g", n, delta, estimate.mean, estimate.std_error)
    return estimate


def mc_packing_density(
    pk: Packing,
    samples: int | None = None,
    seed: int = 0,
    config: PackingConfig | None = None,
    workers: int | None = None,
) -> McEstimate:
    """
    Estimate the fraction of K1 covered by the open spheres of a packing.

    Raises:
        GeometryDomainError: For n > 4 or too few samples
    """
    config = config if config is not None else get_packing_config()
    samples = samples if samples is not None else config.mc_samples
    _check_samples(samples)
    n = pk.params.n
    if n > MAX_PACKING_DIM:
        raise GeometryDomainError(f"density sampling supports n <= {MAX_PACKING_DIM}, got {n}")
    if pk.count == 0:
        return McEstimate(mean=0.0, std_error=0.0, samples=samples, seed=seed)

    half = pk.params.half_side + pk.radius
    tree = cKDTree(pk.centers.astype(np.float64))

    def shard(index: int, size: int) -> int:
        rng = _generator(seed, index)
        hits = 0
        for start in range(0, size, _BATCH):
            batch = rng.uniform(-half, half, size=(min(_BATCH, size - start), n))
            distances, _ = tree.query(batch, k=1)
            hits += int(np.count_nonzero(distances < pk.radius))
        return hits

    sizes = _shard_sizes(samples, config.mc_shards)
    hits = sum(_run_shards(shard, sizes, workers))
    return _bernoulli_estimate(hits, samples, 1.0, seed)


def brute_adjacency(g: LatticeGraph, config: PackingConfig | None = None) -> np.ndarray:
    """
    Dense adjacency recomputed from coordinates by comparing all pairs.

    Raises:
        BudgetExceededError: If the graph is larger than brute_force_limit
    """
    config = config if config is not None else get_packing_config()
    if g.vertex_count > config.brute_force_limit:
        raise BudgetExceededError("vertices", g.vertex_count, config.brute_force_limit)
    points = g.vertices
    diff = points[:, None, :] - points[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    adjacency = d2 <= g.params.edge_limit_sq
    np.fill_diagonal(adjacency, False)
    return adjacency


def brute_force_graph_equal(g: LatticeGraph, config: PackingConfig | None = None) -> bool:
    """True if the cell-list adjacency equals the all-pairs adjacency."""
    return bool(np.array_equal(brute_adjacency(g, config), g.adjacency.toarray() != 0))


def brute_stats(g: LatticeGraph, config: PackingConfig | None = None) -> BruteStats:
    """
    Reference values for (d_max, |E|, T, t) from an all-pairs adjacency.

    Triangles are counted once each as i < j < k; neighborhood edges by
    summing each neighborhood's induced submatrix.
    """
    adjacency = brute_adjacency(g, config)
    count = adjacency.shape[0]
    degrees = adjacency.sum(axis=1)
    triangles = 0
    neighborhood_max = 0
    for i in range(count):
        neighbors = np.nonzero(adjacency[i])[0]
        inside = adjacency[np.ix_(neighbors, neighbors)]
        neighborhood_max = max(neighborhood_max, int(inside.sum()) // 2)
        for j in neighbors[neighbors > i]:
            common = adjacency[i, j + 1 :] & adjacency[j, j + 1 :]
            triangles += int(np.count_nonzero(common))
    return BruteStats(
        d_max=int(degrees.max()) if count else 0,
        edge_count=int(adjacency.sum()) // 2,
        triangles=triangles,
        neighborhood_edge_max=neighborhood_max,
    )
