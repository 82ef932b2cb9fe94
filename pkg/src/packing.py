"""
Sphere packings assembled from independent sets.

Spheres of radius r about the points of an independent set of G_n do not
overlap and lie in the cube K1 of side s + 2r, which tiles space, so the
packing density is |I| V_n r^n / (s + 2r)^n exactly.
"""

from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import TextIO

import numpy as np

from .config import PackingConfig, get_packing_config, worker_count
from .errors import IndependenceViolationError, InvalidParamsError, PackingFormatError, VerificationError
from .geometry import log2_unit_ball_volume
from .independence import IndependentSet, is_independent
from .lattice_graph import LatticeGraph, find_close_pairs
from .params import PackingParams

logger = logging.getLogger(__name__)

_PAIR_BLOCK_ROWS = 1024
_HEADER_KEYS = ("n", "r", "s", "count")


@dataclass(frozen=True, eq=False)
class Packing:
    """
    Equal spheres about integer centers inside one K1 cell.

    Attributes:
        params: Construction parameters
        centers: (count, n) int64 array of sphere centers
        radius: Sphere radius r
        density_parts: (count, r^n, (s+2r)^n); density = count * V_n * r^n / (s+2r)^n
        density: The same value evaluated as a float (0.0 once it underflows)
        log2_density: log2 of the density, finite in any dimension (-inf when empty)
    """

    params: PackingParams
    centers: np.ndarray
    radius: int
    density_parts: tuple[int, int, int]
    density: float
    log2_density: float

    @property
    def count(self) -> int:
        return int(self.centers.shape[0])

    @property
    def density_over_ball_volume(self) -> Fraction:
        """Exact rational density divided by V_n."""
        count, radius_power, cell_volume = self.density_parts
        return Fraction(count * radius_power, cell_volume)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Packing):
            return NotImplemented
        mine, theirs = self.params, other.params
        return (
            (mine.n, mine.r, mine.s) == (theirs.n, theirs.r, theirs.s)
            and self.radius == other.radius
            and self.density_parts == other.density_parts
            and np.array_equal(self.centers, other.centers)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class VerificationReport:
    """
    Outcome of checking a packing.

    Attributes:
        separated: Every pair of centers is at squared distance >= 4r^2
        contained: Every center satisfies |c_i| <= s/2
        min_squared_distance: Smallest squared distance found (None if fewer than two
            centers, or no pair within 4r on the cell-list path)
        violations: ((i, j), squared distance) for overlapping pairs, sorted
        outside: Indices of centers outside K0
        method: "all-pairs" or "cell-list"
    """

    separated: bool
    contained: bool
    min_squared_distance: int | None
    violations: tuple[tuple[tuple[int, int], int], ...]
    outside: tuple[int, ...]
    method: str

    @property
    def passed(self) -> bool:
        return self.separated and self.contained

    def describe(self, pk: Packing | None = None) -> str:
        """One-line summary naming the first culprit."""
        if self.passed:
            return f"pass (min squared distance {self.min_squared_distance})"
        parts = []
        if self.violations:
            (i, j), d2 = self.violations[0]
            where = f"centers {i} and {j}"
            if pk is not None:
                where += f" {tuple(int(x) for x in pk.centers[i])} / {tuple(int(x) for x in pk.centers[j])}"
            parts.append(f"{len(self.violations)} overlapping pair(s), first {where} at squared distance {d2}")
        if self.outside:
            parts.append(f"{len(self.outside)} center(s) outside K0, first index {self.outside[0]}")
        return "fail: " + "; ".join(parts)


def make_packing(p: PackingParams, centers: np.ndarray | list[list[int]]) -> Packing:
    """
    Build a Packing with its exact density; performs no geometric checks.
    """
    array = np.asarray(centers, dtype=np.int64).reshape(-1, p.n)
    count = int(array.shape[0])
    parts = (count, p.r**p.n, p.outer_side**p.n)
    if count:
        log2_density = math.log2(count * parts[1]) - math.log2(parts[2]) + log2_unit_ball_volume(p.n)
    else:
        log2_density = -math.inf
    return Packing(
        params=p,
        centers=array,
        radius=p.r,
        density_parts=parts,
        density=2.0**log2_density,
        log2_density=log2_density,
    )


def assemble(p: PackingParams, iset: IndependentSet, g: LatticeGraph) -> Packing:
    """
    Turn an independent set of G_n into a packing.

    Centers at distance exactly 2r are allowed: the open spheres touch but
    their interiors are disjoint.

    Raises:
        InvalidParamsError: If g was not built from p
        IndependenceViolationError: If the set contains an edge of g
    """
    if g.params != p or g.kind != "cube":
        raise InvalidParamsError("independent set must come from the cube graph of the same parameters")
    if not is_independent(g, iset.vertex_indices):
        raise IndependenceViolationError(f"{iset.algorithm.value} set is not independent")
    packing = make_packing(p, iset.coordinates(g))
    logger.info("Assembled packing with %d spheres, density %.6g", packing.count, packing.density)
    return packing


def _all_pairs_scan(centers: np.ndarray, limit_sq: int) -> tuple[int | None, list[tuple[tuple[int, int], int]]]:
    count = centers.shape[0]
    smallest: int | None = None
    violations: list[tuple[tuple[int, int], int]] = []
    for start in range(0, count - 1, _PAIR_BLOCK_ROWS):
        stop = min(start + _PAIR_BLOCK_ROWS, count)
        diff = centers[start:stop, None, :] - centers[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        rows = np.arange(start, stop)[:, None]
        upper = np.arange(count)[None, :] > rows
        if not upper.any():
            continue
        block_min = int(d2[upper].min())
        smallest = block_min if smallest is None else min(smallest, block_min)
        bad_i, bad_j = np.nonzero((d2 < limit_sq) & upper)
        violations.extend(((int(i) + start, int(j)), int(d2[i, j])) for i, j in zip(bad_i, bad_j, strict=True))
    return smallest, violations


def verify(pk: Packing, config: PackingConfig | None = None) -> VerificationReport:
    """
    Check separation (squared distances >= 4r^2) and containment in K0.

    All pairs are compared for small packings; larger ones use the cell list.
    Failures are reported, never raised.

    Raises:
        BudgetExceededError: If the cell list would exceed config.budget_comparisons
    """
    config = config if config is not None else get_packing_config()
    centers = pk.centers
    separation_sq = 4 * pk.radius * pk.radius

    if pk.count <= config.verify_all_pairs_limit:
        method = "all-pairs"
        smallest, violations = _all_pairs_scan(centers, separation_sq)
    else:
        method = "cell-list"
        rows, cols = find_close_pairs(
            centers,
            4 * separation_sq,
            bucket_side=4 * pk.radius,
            workers=worker_count(),
            budget_comparisons=config.budget_comparisons,
        )
        diff = centers[rows] - centers[cols]
        d2 = np.einsum("ij,ij->i", diff, diff)
        smallest = int(d2.min()) if d2.size else None
        bad = d2 < separation_sq
        violations = [
            ((int(i), int(j)), int(d)) for i, j, d in zip(rows[bad], cols[bad], d2[bad], strict=True)
        ]

    violations.sort()
    outside = tuple(int(i) for i in np.nonzero(np.abs(centers).max(axis=1, initial=0) > pk.params.half_side)[0])
    report = VerificationReport(
        separated=not violations,
        contained=not outside,
        min_squared_distance=smallest,
        violations=tuple(violations),
        outside=outside,
        method=method,
    )
    logger.debug("Verified %d centers via %s: %s", pk.count, method, report.describe())
    return report


def _canonical_body(pk: Packing) -> str:
    p = pk.params
    lines = [f"n={p.n} r={p.r} s={p.s} count={pk.count}"]
    lines.extend(" ".join(str(int(x)) for x in row) for row in pk.centers)
    return "\n".join(lines) + "\n"


def export_packing(pk: Packing, destination: str | Path | TextIO) -> None:
    """
    Write a packing file: header, one line of n integers per center, then sha256 of the body.
    """
    body = _canonical_body(pk)
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    text = f"{body}sha256={digest}\n"
    if isinstance(destination, (str, Path)):
        Path(destination).write_text(text, encoding="utf-8")
    else:
        destination.write(text)
    logger.debug("Exported %d centers", pk.count)


def _parse_int(token: str, line: int, field: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise PackingFormatError(f"expected an integer, got {token!r}", line, field) from None


def _parse_header(line_text: str) -> dict[str, int]:
    tokens = line_text.split()
    if len(tokens) != len(_HEADER_KEYS):
        raise PackingFormatError(f"header needs {len(_HEADER_KEYS)} fields, got {len(tokens)}", 1, "header")
    values: dict[str, int] = {}
    for token, key in zip(tokens, _HEADER_KEYS, strict=True):
        name, sep, raw = token.partition("=")
        if not sep or name != key:
            raise PackingFormatError(f"expected '{key}=<int>', got {token!r}", 1, key)
        values[key] = _parse_int(raw, 1, key)
    return values


def parse_packing(text: str, check_digest: bool = True) -> Packing:
    """
    Parse packing-file text without verifying the geometry.

    With check_digest=False a wrong sha256 line is accepted, so an edited
    file can still be checked geometrically.

    Raises:
        PackingFormatError: With line and field of the first problem
    """
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise PackingFormatError("empty document", 0, "header")
    header = _parse_header(lines[0])
    count = header["count"]
    if count < 0:
        raise PackingFormatError("count must be non-negative", 1, "count")
    try:
        params = PackingParams(n=header["n"], r=header["r"], s=header["s"])
    except InvalidParamsError as error:
        raise PackingFormatError(str(error), 1, "header") from None
    if len(lines) != count + 2:
        raise PackingFormatError(
            f"expected {count} center lines and a checksum, found {len(lines) - 1} lines after the header",
            len(lines), "count",
        )

    rows: list[list[int]] = []
    for offset, line_text in enumerate(lines[1 : count + 1], start=2):
        tokens = line_text.split()
        if len(tokens) != params.n:
            raise PackingFormatError(f"expected {params.n} coordinates, got {len(tokens)}", offset, "center")
        rows.append([_parse_int(token, offset, "center") for token in tokens])

    checksum_line = lines[count + 1]
    name, sep, digest = checksum_line.partition("=")
    if name != "sha256" or not sep:
        raise PackingFormatError(f"expected 'sha256=<hex>', got {checksum_line!r}", count + 2, "sha256")
    packing = make_packing(params, rows)
    expected = hashlib.sha256(_canonical_body(packing).encode("utf-8")).hexdigest()
    if check_digest and digest != expected:
        raise PackingFormatError("checksum mismatch", count + 2, "sha256")
    return packing


def import_packing(source: str | Path | TextIO, config: PackingConfig | None = None) -> Packing:
    """
    Read and re-verify a packing file. Densities are recomputed, never read.

    Raises:
        PackingFormatError: If the document is malformed
        VerificationError: If the packing overlaps or leaves K0
    """
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    packing = parse_packing(text)
    report = verify(packing, config)
    if not report.passed:
        raise VerificationError(report.describe(packing), report)
    return packing
