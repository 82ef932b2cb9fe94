"""Packing parameters shared by every module."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidParamsError


@dataclass(frozen=True)
class PackingParams:
    """
    Dimension and cube/sphere sizes of one construction.

    Attributes:
        n: Dimension (>= 1)
        r: Sphere radius (integer >= 1)
        s: Side of the inner cube K0 (even integer >= 0), so K0 holds (s+1)^n lattice points
        paper_regime: If True, r must be even as well
    """

    n: int
    r: int
    s: int
    paper_regime: bool = False

    def __post_init__(self) -> None:
        for name in ("n", "r", "s"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise InvalidParamsError(f"{name} must be an integer, got {value!r}")
        if self.n < 1:
            raise InvalidParamsError(f"dimension n must be >= 1, got {self.n}")
        if self.r < 1:
            raise InvalidParamsError(f"radius r must be >= 1, got {self.r}")
        if self.s < 0 or self.s % 2:
            raise InvalidParamsError(f"cube side s must be a non-negative even integer, got {self.s}")
        if self.paper_regime and self.r % 2:
            raise InvalidParamsError(f"paper_regime requires even r, got {self.r}")

    @property
    def half_side(self) -> int:
        """Largest coordinate magnitude of a vertex, s/2."""
        return self.s // 2

    @property
    def vertex_count(self) -> int:
        """Exact number of lattice points in K0, (s+1)^n."""
        return (self.s + 1) ** self.n

    @property
    def outer_side(self) -> int:
        """Side of the outer cube K1, s + 2r."""
        return self.s + 2 * self.r

    @property
    def edge_limit_sq(self) -> int:
        """Largest squared distance of an edge: d < 2r becomes d^2 <= 4r^2 - 1."""
        return 4 * self.r * self.r - 1
