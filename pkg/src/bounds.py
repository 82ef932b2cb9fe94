"""
Closed-form density, degree and neighborhood-sparsity bounds.

Every quantity is returned as a base-2 logarithm: the bounds involve factors
such as rho^(2n) and 2^-n that leave floating-point range long before the
dimensions where they become interesting. A value of None marks a bound whose
bracketed factor is not positive (or that does not apply to the parameters).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from .config import PackingConfig, get_packing_config
from .errors import BoundPreconditionError, InvalidParamsError
from .geometry import (
    LN2,
    CapGeometry,
    log2_d_n_upper,
    log2_intersection_volume_exact,
    log2_unit_ball_volume,
    rho_of,
)
from .lattice_graph import LatticeGraph
from .params import PackingParams

LOG2_TWO_OVER_ROOT3 = 1.0 - 0.5 * math.log2(3.0)
HEADLINE_CONSTANT = 0.01


def theorem1_constant() -> float:
    """The density constant log2(2/sqrt(3))/20 = 0.010375..."""
    return LOG2_TWO_OVER_ROOT3 / 20.0


def paper_curve(n: int) -> PackingParams:
    """Parameters r = 2n^2, s = 2n^4 used for the asymptotic statements."""
    return PackingParams(n=n, r=2 * n * n, s=2 * n**4, paper_regime=True)


def relaxed_curve(n: int, eps: float = 0.0) -> PackingParams:
    """Parameters r ~ n^(1.5+eps), s ~ n^(2.5+eps), rounded up to even integers."""
    if not eps >= 0.0:
        raise InvalidParamsError(f"eps must be >= 0, got {eps}")

    def even_ceil(x: float) -> int:
        value = math.ceil(x)
        return value + (value % 2)

    return PackingParams(
        n=n,
        r=max(2, even_ceil(n ** (1.5 + eps))),
        s=max(2, even_ceil(n ** (2.5 + eps))),
        paper_regime=True,
    )


def is_paper_curve(p: PackingParams) -> bool:
    return p.r == 2 * p.n * p.n and p.s == 2 * p.n**4


def _log2_side_ratio(p: PackingParams, plus_one: bool) -> float:
    """n log2(s'/(s+2r)) with s' = s or s+1."""
    numerator = p.s + 1 if plus_one else p.s
    if numerator == 0:
        return -math.inf
    return -p.n * math.log1p((p.outer_side - numerator) / numerator) / LN2


def _log2_radius_ratio(p: PackingParams) -> float:
    """n log2(r / (2r + sqrt(n)/2)) = -n - n log2(1 + sqrt(n)/(4r))."""
    return -p.n - p.n * math.log1p(math.sqrt(p.n) / (4.0 * p.r)) / LN2


def minkowski_density_guarantee(p: PackingParams, plus_one: bool = False) -> float:
    """
    log2 of the trivial-bound density guarantee.

    s^n V_n r^n / ((s+2r)^n V_n (2r + sqrt(n)/2)^n)
        = 1 / (2^n (1 + 2r/s)^n (1 + sqrt(n)/4r)^n)

    Args:
        p: Packing parameters
        plus_one: Use the (s+1)^n vertex count instead of s^n in the numerator

    Returns:
        log2 of the density lower bound (tends to -n on the asymptotic curve)
    """
    return _log2_side_ratio(p, plus_one) + _log2_radius_ratio(p)


def _log2_bracket(p: PackingParams) -> float | None:
    """log2 of log2(2/sqrt(3)) - log2(n rho^2)/n, or None when that is <= 0."""
    rho = rho_of(p)
    bracket = LOG2_TWO_OVER_ROOT3 - (math.log2(p.n) + 2.0 * math.log2(rho)) / p.n
    return math.log2(bracket) if bracket > 0.0 else None


def improved_density_guarantee(p: PackingParams, plus_one: bool = False) -> float | None:
    """
    log2 of the locally-sparse density guarantee, before asymptotics.

    (n/20) (s/(s+2r))^n (r/(2r+sqrt(n)/2))^n (log2(2/sqrt(3)) - log2(n (2r+sqrt(n)/2)^2)/n)

    Returns:
        The log2 value, or None when the bracketed factor is not positive
        (every dimension that can actually be constructed)
    """
    log2_bracket = _log2_bracket(p)
    if log2_bracket is None:
        return None
    return (
        math.log2(p.n / 20.0)
        + _log2_side_ratio(p, plus_one)
        + _log2_radius_ratio(p)
        + log2_bracket
    )


def headline_density(n: int) -> float:
    """log2 of 0.01 n 2^-n."""
    return math.log2(HEADLINE_CONSTANT * n) - n


def alpha_lower_display(p: PackingParams) -> float | None:
    """
    log2 of the independence-number bound with d and t replaced by their upper bounds.

    (s+1)^n / (10 V_n rho^n) * (n/2) (log2(2/sqrt(3)) - log2(n rho^2)/n)
    """
    log2_bracket = _log2_bracket(p)
    if log2_bracket is None:
        return None
    return (
        p.n * math.log2(p.s + 1)
        - math.log2(10.0)
        - log2_d_n_upper(p)
        + math.log2(p.n / 2.0)
        + log2_bracket
    )


def crossing_dimension(start: int = 2, limit: int = 200_000) -> int:
    """
    Least n on the asymptotic curve where the improved guarantee reaches 0.01 n 2^-n.

    Raises:
        BoundPreconditionError: If no crossing occurs below limit
    """
    for n in range(start, limit + 1):
        improved = improved_density_guarantee(paper_curve(n))
        if improved is not None and improved >= headline_density(n):
            return n
    raise BoundPreconditionError(f"no crossing dimension below {limit}")


def _logsumexp2(values: list[float]) -> float:
    finite = [v for v in values if v != -math.inf]
    if not finite:
        return -math.inf
    return float(np.logaddexp2.reduce(np.asarray(finite, dtype=np.float64)))


@dataclass(frozen=True)
class TBoundParts:
    """
    Pieces of the generic upper bound on t_n.

    Attributes:
        log2_first: Shells k < r^2/4, every degree bounded by V_n rho^n
        log2_second: Shells k >= r^2/4, degrees bounded by the two-ball intersection
        log2_t: log2 of (first + second)/2
        mode: "exact-shell" (term-by-term sum) or "closed-form" (worst shell times count)
    """

    log2_first: float
    log2_second: float
    log2_t: float
    mode: str


def _log2_shell_count_bound(n: int, k: int) -> float:
    """log2 of V_n (sqrt(k) + sqrt(n)/2)^n, which bounds |U_k| and the points inside shell k."""
    return log2_unit_ball_volume(n) + n * math.log2(math.sqrt(k) + 0.5 * math.sqrt(n))


def _log2_degree_bound(p: PackingParams, rho: float, k: int, log2_cap: float) -> float:
    distance = math.sqrt(k)
    if p.n == 1:
        return min(math.log2(2.0 * rho - distance), log2_cap)
    g = CapGeometry.from_distance(p.n, rho, distance, paper_regime=True)
    return min(log2_intersection_volume_exact(g), log2_cap)


def t_upper_generic_parts(
    p: PackingParams, config: PackingConfig | None = None
) -> TBoundParts:
    """
    Upper bound on t_n valid for any r >= sqrt(n)/2, split into the two shell sums.

    Shells below r^2/4 contribute at most V_n rho^n per point. For the outer
    shells each point's degree is bounded by the volume of two intersecting
    radius-rho balls; with few shells the sum is taken term by term with the
    exact volume, otherwise the worst shell (delta = 1/2) is multiplied by the
    number of shells.

    Raises:
        BoundPreconditionError: If r < sqrt(n)/2
    """
    if 4 * p.r * p.r < p.n:
        raise BoundPreconditionError(f"generic t bound needs r >= sqrt(n)/2, got n={p.n}, r={p.r}")
    config = config if config is not None else get_packing_config()
    n = p.n
    rho = rho_of(p)
    log2_degree_cap = log2_d_n_upper(p)
    top = 4 * p.r * p.r - 1
    split = max(1, math.ceil(p.r * p.r / 4))

    if split > 1:
        log2_first = _log2_shell_count_bound(n, split - 1) + log2_degree_cap
    else:
        log2_first = -math.inf

    shells = top - split + 1
    if shells <= config.exact_shell_limit:
        mode = "exact-shell"
        terms = [
            _log2_shell_count_bound(n, k) + _log2_degree_bound(p, rho, k, log2_degree_cap)
            for k in range(split, top + 1)
        ]
        log2_second = _logsumexp2(terms)
    else:
        mode = "closed-form"
        log2_second = (
            math.log2(shells)
            + math.log2(n)
            + 2.0 * log2_unit_ball_volume(n)
            + 2.0 * n * math.log2(rho)
            + n
            + n * math.log1p(math.sqrt(n) / p.r) / LN2
            + 0.5 * n * math.log2(3.0 / 16.0)
        )

    log2_t = _logsumexp2([log2_first, log2_second]) - 1.0
    return TBoundParts(log2_first, log2_second, log2_t, mode)


def t_upper_generic(p: PackingParams, config: PackingConfig | None = None) -> float:
    """log2 of a valid upper bound on t_n for the given parameters."""
    return t_upper_generic_parts(p, config).log2_t


def t_upper_paper(n: int) -> float:
    """
    log2 of the closed-form bound (sqrt(3)/2)^n n V_n^2 rho^(2n+2) at r = 2n^2.
    """
    if n < 1:
        raise BoundPreconditionError(f"dimension must be >= 1, got {n}")
    rho = 4.0 * n * n + 0.5 * math.sqrt(n)
    return (
        n * math.log2(math.sqrt(3.0) / 2.0)
        + math.log2(n)
        + 2.0 * log2_unit_ball_volume(n)
        + (2 * n + 2) * math.log2(rho)
    )


@dataclass(frozen=True)
class ComplexityEstimate:
    """
    Predicted cost of constructing the packing.

    Attributes:
        vertex_count: (s+1)^n when it fits in 63 bits, else None
        log2_vertex_count: n log2(s+1)
        log2_work: log2 of d_av |E| + |V| with d_av <= d_upper and |E| <= |V| d_upper / 2
        gamma_ratio: log2_work / (n log2 n), or None for n = 1
        log2_paper_comparison: n log2(64 pi e n^7) on the asymptotic curve, else None
        measured_work: d_av |E| + |V| of an actually built graph, if one was given
    """

    vertex_count: int | None
    log2_vertex_count: float
    log2_work: float
    gamma_ratio: float | None
    log2_paper_comparison: float | None
    measured_work: float | None


def complexity_estimate(p: PackingParams, graph: LatticeGraph | None = None) -> ComplexityEstimate:
    """
    Work estimate for building G_n and extracting an independent set.

    Args:
        p: Packing parameters
        graph: Optional built graph whose measured work is reported alongside

    Returns:
        ComplexityEstimate
    """
    log2_vertices = p.n * math.log2(p.s + 1)
    log2_degree = log2_d_n_upper(p)
    log2_work = log2_vertices + float(np.logaddexp2(2.0 * log2_degree - 1.0, 0.0))
    vertex_count = p.vertex_count if log2_vertices < 63 else None
    gamma_ratio = log2_work / (p.n * math.log2(p.n)) if p.n > 1 else None
    comparison = (
        p.n * math.log2(64.0 * math.pi * math.e * float(p.n) ** 7) if is_paper_curve(p) else None
    )
    measured = None
    if graph is not None and graph.vertex_count:
        edges = graph.edge_count
        measured = 2.0 * edges * edges / graph.vertex_count + graph.vertex_count
    return ComplexityEstimate(
        vertex_count=vertex_count,
        log2_vertex_count=log2_vertices,
        log2_work=log2_work,
        gamma_ratio=gamma_ratio,
        log2_paper_comparison=comparison,
        measured_work=measured,
    )


def _finite_or_none(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _finite_or_none(item) for key, item in value.items()}
    return value


@dataclass(frozen=True)
class BoundReport:
    """
    Every bound for one parameter set, as log2 values.

    None marks a bound that is invalid (non-positive bracket) or not applicable.
    """

    params: PackingParams
    d_upper: float
    t_upper_generic: float | None
    t_upper_paper: float | None
    minkowski_density: float
    improved_density: float | None
    alpha_lower_trivial: float
    alpha_lower_jv: float | None
    theorem1_constant: float
    complexity: ComplexityEstimate

    @property
    def improved_density_valid(self) -> bool:
        return self.improved_density is not None

    def to_dict(self) -> dict[str, Any]:
        return _finite_or_none(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def bound_report(
    p: PackingParams, config: PackingConfig | None = None, graph: LatticeGraph | None = None
) -> BoundReport:
    """Evaluate every bound for the given parameters."""
    try:
        t_generic: float | None = t_upper_generic(p, config)
    except BoundPreconditionError:
        t_generic = None
    d_upper = log2_d_n_upper(p)
    return BoundReport(
        params=p,
        d_upper=d_upper,
        t_upper_generic=t_generic,
        t_upper_paper=t_upper_paper(p.n) if p.r == 2 * p.n * p.n else None,
        minkowski_density=minkowski_density_guarantee(p),
        improved_density=improved_density_guarantee(p),
        alpha_lower_trivial=p.n * math.log2(p.s + 1) - d_upper,
        alpha_lower_jv=alpha_lower_display(p),
        theorem1_constant=theorem1_constant(),
        complexity=complexity_estimate(p, graph),
    )
