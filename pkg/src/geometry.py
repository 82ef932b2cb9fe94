"""
Ball volumes, spherical sector integrals and two-ball intersection volumes.

All quantities have a log2 counterpart so that bounds in dimensions of several
thousand stay finite. Two balls of radius rho whose centers are 2*rho*delta
apart are parameterized by CapGeometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate, special

from .errors import GeometryDomainError
from .params import PackingParams

LN2 = math.log(2.0)

# Above this dimension the sector integral uses the incomplete-beta identity
QUADRATURE_MAX_DIM = 64
QUADRATURE_REL_TOL = 1e-12

# math.gamma overflows past this argument
_DIRECT_GAMMA_MAX_DIM = 340


@dataclass(frozen=True)
class CapGeometry:
    """
    Two radius-rho balls with centers 2*rho*delta apart.

    Attributes:
        n: Dimension (>= 2)
        rho: Ball radius
        delta: Center distance divided by 2*rho, in (0, 1)
        theta: Half-opening angle arccos(delta)
        paper_regime: If True, delta must also be below 1/2
    """

    n: int
    rho: float
    delta: float
    theta: float
    paper_regime: bool = False

    def __post_init__(self) -> None:
        if self.n < 2:
            raise GeometryDomainError(f"cap geometry needs n >= 2, got {self.n}")
        if not self.rho > 0:
            raise GeometryDomainError(f"rho must be positive, got {self.rho}")
        if not 0.0 < self.delta < 1.0:
            raise GeometryDomainError(f"delta must lie in (0, 1), got {self.delta}")
        if not 0.0 < self.theta < math.pi / 2:
            raise GeometryDomainError(f"theta must lie in (0, pi/2), got {self.theta}")
        if abs(math.cos(self.theta) - self.delta) > 1e-12:
            raise GeometryDomainError("theta does not match arccos(delta)")
        if self.paper_regime and not self.delta < 0.5:
            raise GeometryDomainError(f"neighbor distances give delta < 1/2, got {self.delta}")

    @classmethod
    def from_delta(
        cls, n: int, rho: float, delta: float, paper_regime: bool = False
    ) -> CapGeometry:
        """Build the geometry from the normalized center distance."""
        if not 0.0 < delta < 1.0:
            raise GeometryDomainError(f"delta must lie in (0, 1), got {delta}")
        return cls(n=n, rho=float(rho), delta=float(delta), theta=math.acos(delta),
                   paper_regime=paper_regime)

    @classmethod
    def from_distance(
        cls, n: int, rho: float, distance: float, paper_regime: bool = False
    ) -> CapGeometry:
        """Build the geometry from the actual distance between the two centers."""
        return cls.from_delta(n, rho, distance / (2.0 * rho), paper_regime)


def log2_unit_ball_volume(n: int) -> float:
    """log2 of V_n = pi^(n/2) / Gamma(n/2 + 1)."""
    if n < 0:
        raise GeometryDomainError(f"dimension must be >= 0, got {n}")
    return 0.5 * n * math.log2(math.pi) - float(special.gammaln(0.5 * n + 1.0)) / LN2


def unit_ball_volume(n: int) -> float:
    """
    Volume of the unit ball in R^n.

    Args:
        n: Dimension (>= 0)

    Returns:
        V_n; underflows to 0.0 in very high dimension (use log2_unit_ball_volume)

    Example:
        >>> round(unit_ball_volume(2), 8)
        3.14159265
    """
    if n < 0:
        raise GeometryDomainError(f"dimension must be >= 0, got {n}")
    if n <= _DIRECT_GAMMA_MAX_DIM:
        return math.pi ** (0.5 * n) / math.gamma(0.5 * n + 1.0)
    return 2.0 ** log2_unit_ball_volume(n)


def _check_sector_args(n: int, theta: float) -> None:
    if n < 2:
        raise GeometryDomainError(f"sector integral needs n >= 2, got {n}")
    if not 0.0 <= theta <= math.pi / 2:
        raise GeometryDomainError(f"theta must lie in [0, pi/2], got {theta}")


def _sector_integral_beta(n: int, theta: float) -> float:
    # int_0^theta sin^m = B((m+1)/2, 1/2) * I_{sin^2 theta}((m+1)/2, 1/2) / 2
    a = 0.5 * (n - 1)
    x = math.sin(theta) ** 2
    return 0.5 * math.exp(float(special.betaln(a, 0.5))) * float(special.betainc(a, 0.5, x))


def sector_integral(n: int, theta: float) -> float:
    """
    Integral of sin(phi)^(n-2) over [0, theta].

    Args:
        n: Dimension (>= 2)
        theta: Upper limit in [0, pi/2]

    Returns:
        The integral to relative accuracy ~1e-10

    Raises:
        GeometryDomainError: Outside the domain above
    """
    _check_sector_args(n, theta)
    if theta == 0.0:
        return 0.0
    if n == 2:
        return theta
    if n == 3:
        return 1.0 - math.cos(theta)
    if n > QUADRATURE_MAX_DIM:
        return _sector_integral_beta(n, theta)
    value, _ = integrate.quad(
        lambda phi: math.sin(phi) ** (n - 2),
        0.0,
        theta,
        epsabs=0.0,
        epsrel=QUADRATURE_REL_TOL,
        limit=200,
    )
    return float(value)


def log2_sector_integral(n: int, theta: float) -> float:
    """log2 of sector_integral, evaluable for any n via the beta identity."""
    _check_sector_args(n, theta)
    if theta == 0.0:
        return -math.inf
    if n <= QUADRATURE_MAX_DIM:
        return math.log2(sector_integral(n, theta))
    a = 0.5 * (n - 1)
    x = math.sin(theta) ** 2
    ratio = float(special.betainc(a, 0.5, x))
    if ratio <= 0.0:
        return -math.inf
    return math.log2(0.5) + float(special.betaln(a, 0.5)) / LN2 + math.log2(ratio)


def intersection_volume_exact(g: CapGeometry) -> float:
    """
    Exact volume of the intersection of the two balls.

    Twice a spherical sector of angle 2*theta minus twice the right cone on
    the same base.

    Args:
        g: The two-ball geometry

    Returns:
        (2 rho^n V_{n-1} / n) * ((n-1) * int_0^theta sin^(n-2) - delta * sin(theta)^(n-1))
    """
    n = g.n
    bracket = (n - 1) * sector_integral(n, g.theta) - g.delta * math.sin(g.theta) ** (n - 1)
    return 2.0 * g.rho**n * unit_ball_volume(n - 1) / n * bracket


def log2_intersection_volume_exact(g: CapGeometry) -> float:
    """log2 of intersection_volume_exact, stable in high dimension."""
    n = g.n
    log2_sector = log2_sector_integral(n, g.theta) + math.log2(n - 1)
    log2_cone = math.log2(g.delta) + (n - 1) * math.log2(math.sin(g.theta))
    # bracket = 2^a - 2^b with a > b
    gap = log2_cone - log2_sector
    log2_bracket = log2_sector + math.log2(-math.expm1(gap * LN2))
    return 1.0 + n * math.log2(g.rho) + log2_unit_ball_volume(n - 1) - math.log2(n) + log2_bracket


def log2_intersection_volume_cylinder_bound(g: CapGeometry) -> float:
    """log2 of the enclosing-cylinder bound."""
    n = g.n
    return (
        1.0
        + math.log2(g.rho)
        + math.log2(1.0 - g.delta)
        + log2_unit_ball_volume(n - 1)
        + (n - 1) * math.log2(g.rho * math.sin(g.theta))
    )


def intersection_volume_cylinder_bound(g: CapGeometry) -> float:
    """
    Volume of a cylinder containing the intersection.

    Height 2*rho*(1 - delta), base an (n-1)-ball of radius rho*sin(theta).

    Returns:
        2 rho (1 - delta) V_{n-1} rho^(n-1) sin(theta)^(n-1)
    """
    n = g.n
    return (
        2.0
        * g.rho
        * (1.0 - g.delta)
        * unit_ball_volume(n - 1)
        * (g.rho * math.sin(g.theta)) ** (n - 1)
    )


def log2_intersection_volume_relaxed_bound(g: CapGeometry) -> float:
    """log2 of the relaxed cylinder bound."""
    n = g.n
    return (
        0.5 * n * math.log2(1.0 - g.delta**2)
        + math.log2(n)
        + log2_unit_ball_volume(n)
        + n * math.log2(g.rho)
    )


def intersection_volume_relaxed_bound(g: CapGeometry) -> float:
    """
    Relaxed form of the cylinder bound, using 2 V_{n-1} <= n V_n.

    Returns:
        (1 - delta^2)^(n/2) n V_n rho^n
    """
    n = g.n
    return (1.0 - g.delta**2) ** (0.5 * n) * n * unit_ball_volume(n) * g.rho**n


def rho_of(p: PackingParams) -> float:
    """Inflated radius 2r + sqrt(n)/2 used by the fundamental-domain argument."""
    return 2.0 * p.r + 0.5 * math.sqrt(p.n)


def log2_d_n_upper(p: PackingParams) -> float:
    """log2 of the upper bound on d_n + 1."""
    return log2_unit_ball_volume(p.n) + p.n * math.log2(rho_of(p))


def d_n_upper(p: PackingParams) -> float:
    """
    Upper bound on d_n + 1, the number of lattice points in the open ball of radius 2r.

    Unit cubes around those points are disjoint and lie in the ball of radius
    2r + sqrt(n)/2, so their count is at most that ball's volume.

    Returns:
        V_n (2r + sqrt(n)/2)^n
    """
    return unit_ball_volume(p.n) * rho_of(p) ** p.n
