"""
Command implementations for the packing front end.

Each command takes a RunConfig, writes one report document and returns an
exit code. Library errors propagate to App.run, which maps them to codes.
"""

from __future__ import annotations

import math
import sys
import time
from collections.abc import Callable
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, TextIO

from ..bounds import bound_report, complexity_estimate, t_upper_generic
from ..config import PackingConfig
from ..errors import BudgetExceededError, InvalidParamsError, PackingFormatError
from ..geometry import (
    CapGeometry,
    intersection_volume_cylinder_bound,
    intersection_volume_exact,
    intersection_volume_relaxed_bound,
    log2_d_n_upper,
)
from ..independence import (
    IndependentSet,
    aks_lower_bound,
    exact_max_is,
    greedy_maximal_is,
    jv_lower_bound,
    min_degree_greedy_is,
    trivial_lower_bound,
)
from ..lattice_graph import (
    LatticeGraph,
    build_graph,
    build_neighborhood_graph,
    count_ball_lattice_points,
    dump_graph,
)
from ..oracle import brute_force_graph_equal, brute_stats, mc_ball_intersection, mc_packing_density
from ..packing import assemble, export_packing, parse_packing, verify
from ..params import PackingParams
from .reporting import bounds_payload, emit, make_document, packing_payload

COMMANDS = ("build", "bounds", "verify", "check", "bench")

ALGORITHMS: dict[str, Callable[..., IndependentSet]] = {
    "lex-greedy": greedy_maximal_is,
    "min-degree": min_degree_greedy_is,
    "exact": exact_max_is,
}

EXIT_OK = 0
EXIT_BAD_ARGUMENTS = 1
EXIT_BUDGET = 2
EXIT_FAILED = 3

# exact independence numbers are only attempted up to this many vertices
EXACT_VERTEX_LIMIT = 200
_REL_TOL = 1e-12


@dataclass(frozen=True)
class RunConfig:
    """
    One validated command invocation.

    Attributes:
        command: build, bounds, verify, check or bench
        params: Packing parameters (None for verify and check)
        algorithm: Independent-set extractor name for build
        seed: Base seed for sampling
        output: Destination file (packing file for build, report otherwise)
        fmt: "text" or "json"
        deterministic: Suppress timestamps and timings
        settings: Resolved configuration
        input_path: Packing file to verify
        grid: Instance grid for check
        dump_path: Optional graph dump destination for build
    """

    command: str
    params: PackingParams | None = None
    algorithm: str = "lex-greedy"
    seed: int = 0
    output: Path | None = None
    fmt: str = "text"
    deterministic: bool = False
    settings: PackingConfig = field(default_factory=PackingConfig)
    input_path: Path | None = None
    grid: str = "small"
    dump_path: Path | None = None

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise InvalidParamsError(f"unknown command {self.command!r}")
        if self.command in ("build", "bounds", "bench") and self.params is None:
            raise InvalidParamsError(f"{self.command} needs --dim")
        if self.algorithm not in ALGORITHMS:
            raise InvalidParamsError(f"unknown algorithm {self.algorithm!r}")
        if self.command == "verify" and self.input_path is None:
            raise InvalidParamsError("verify needs a packing file")
        if self.grid not in GRIDS:
            raise InvalidParamsError(f"unknown grid {self.grid!r}")

    def require_params(self) -> PackingParams:
        if self.params is None:
            raise InvalidParamsError(f"{self.command} needs --dim")
        return self.params


@contextmanager
def _report_stream(config: RunConfig, use_output: bool) -> Iterator[TextIO]:
    if use_output and config.output is not None:
        with config.output.open("w", encoding="utf-8") as handle:
            yield handle
    else:
        yield sys.stdout


def _emit(config: RunConfig, document: dict[str, Any], use_output: bool = True) -> None:
    with _report_stream(config, use_output) as stream:
        emit(document, config.fmt, config.settings.text_significant_digits, stream)


def _graph_stats(g: LatticeGraph) -> dict[str, int]:
    return {
        "vertices": g.vertex_count,
        "edges": g.edge_count,
        "d_max": g.d_max,
        "triangles": g.triangle_count,
        "t": g.neighborhood_edge_max,
    }


def _extract(algorithm: str, g: LatticeGraph, settings: PackingConfig) -> IndependentSet:
    if algorithm == "exact":
        if g.vertex_count > EXACT_VERTEX_LIMIT:
            raise BudgetExceededError("vertices for exact search", g.vertex_count, EXACT_VERTEX_LIMIT)
        return exact_max_is(g, settings.exact_node_budget)
    return ALGORITHMS[algorithm](g)


def cmd_build(config: RunConfig) -> int:
    """
    Build G_n, extract an independent set, assemble and verify the packing.

    The packing file goes to --out, and only once verification passes; the
    report (packing summary, graph statistics and bounds) goes to stdout.
    """
    p = config.require_params()
    started = time.perf_counter()
    g = build_graph(p, config.settings)
    built = time.perf_counter()
    if config.dump_path is not None:
        dump_graph(g, config.dump_path)
    iset = _extract(config.algorithm, g, config.settings)
    pk = assemble(p, iset, g)
    report = verify(pk, config.settings)
    finished = time.perf_counter()

    if not report.passed:
        print(f"FAILED {report.describe(pk)}", file=sys.stderr)
    elif config.output is not None:
        export_packing(pk, config.output)

    payload = packing_payload(pk, report)
    payload["algorithm"] = config.algorithm
    payload["seed"] = config.seed
    payload["graph"] = _graph_stats(g)
    payload["bounds"] = bounds_payload(bound_report(p, config.settings, g))
    timings = {"graph": built - started, "packing": finished - built}
    _emit(config, make_document("build", payload, config.deterministic, timings), use_output=False)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_bounds(config: RunConfig) -> int:
    """Evaluate every closed-form bound; works for any dimension."""
    p = config.require_params()
    payload = bounds_payload(bound_report(p, config.settings))
    _emit(config, make_document("bounds", payload, config.deterministic))
    return EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    """
    Re-validate a packing file, recomputing its density.

    Returns:
        0 if every center pair is separated and inside K0, else 3
    """
    if config.input_path is None:
        raise InvalidParamsError("verify needs a packing file")
    text = config.input_path.read_text(encoding="utf-8")
    try:
        parse_packing(text)
        digest_ok = True
    except PackingFormatError as error:
        if error.field != "sha256":
            raise
        digest_ok = False
    pk = parse_packing(text, check_digest=False)
    report = verify(pk, config.settings)
    payload = packing_payload(pk, report)
    payload["file"] = config.input_path.name
    payload["checksum_ok"] = digest_ok
    _emit(config, make_document("verify", payload, config.deterministic))
    if not report.passed:
        print(f"FAILED {report.describe(pk)}", file=sys.stderr)
    if not digest_ok:
        print("FAILED checksum mismatch", file=sys.stderr)
    return EXIT_OK if report.passed and digest_ok else EXIT_FAILED


@dataclass(frozen=True)
class CheckGrid:
    """Instances swept by `check`."""

    graphs: tuple[tuple[int, int, int], ...]
    degree_cases: tuple[tuple[int, int], ...]
    volume_dims: tuple[int, ...]
    deltas: tuple[float, ...]
    rhos: tuple[float, ...]
    density_cases: tuple[tuple[int, int, int], ...]
    mc_samples: int | None = None


GRIDS: dict[str, CheckGrid] = {
    "small": CheckGrid(
        graphs=((1, 1, 8), (2, 1, 2), (2, 1, 8), (2, 2, 6), (3, 1, 2)),
        degree_cases=tuple((n, r) for n in (1, 2, 3) for r in (1, 2)),
        volume_dims=(2, 3),
        deltas=(0.25,),
        rhos=(1.0,),
        density_cases=((2, 1, 8),),
        mc_samples=200_000,
    ),
    "standard": CheckGrid(
        graphs=((1, 1, 8), (1, 2, 10), (2, 1, 8), (2, 2, 6), (2, 3, 10), (3, 1, 2), (3, 2, 6)),
        degree_cases=tuple((n, r) for n in (1, 2, 3) for r in (1, 2, 3, 4)),
        volume_dims=(2, 3, 4, 5, 6),
        deltas=(0.1, 0.25, 0.49),
        rhos=(1.0, 3.5),
        density_cases=((1, 1, 8), (2, 1, 8), (3, 1, 4)),
    ),
}


class _PropertyLog:
    """Collects pass/fail rows for `check`."""

    def __init__(self) -> None:
        self.rows: list[dict[str, Any]] = []

    def record(self, name: str, instance: str, passed: bool, detail: str = "") -> None:
        self.rows.append({"property": name, "instance": instance, "passed": bool(passed), "detail": detail})

    @property
    def failures(self) -> list[dict[str, Any]]:
        return [row for row in self.rows if not row["passed"]]


def _check_degree_bounds(grid: CheckGrid, settings: PackingConfig, log: _PropertyLog) -> None:
    for n, r in grid.degree_cases:
        p = PackingParams(n=n, r=r, s=0)
        count = count_ball_lattice_points(n, r, settings.budget_comparisons)
        passed = math.log2(count) <= log2_d_n_upper(p) + _REL_TOL
        log.record("degree_volume_bound", f"n={n} r={r}", passed, f"count={count}")

        if 4 * r * r >= n:
            h = build_neighborhood_graph(p, settings)
            measured = h.edge_count
            bound = t_upper_generic(p, settings)
            passed = measured == 0 or math.log2(measured) <= bound + _REL_TOL
            log.record("t_upper_generic", f"n={n} r={r}", passed, f"t={measured} log2_bound={bound:.6g}")


def _check_graph(n: int, r: int, s: int, settings: PackingConfig, log: _PropertyLog) -> None:
    p = PackingParams(n=n, r=r, s=s)
    instance = f"n={n} r={r} s={s}"
    g = build_graph(p, settings)

    if g.vertex_count <= settings.brute_force_limit:
        log.record("graph_equals_brute_force", instance, brute_force_graph_equal(g, settings))
        reference = brute_stats(g, settings)
        fast = (g.d_max, g.edge_count, g.triangle_count, g.neighborhood_edge_max)
        slow = (reference.d_max, reference.edge_count, reference.triangles, reference.neighborhood_edge_max)
        log.record("statistics_equal_brute_force", instance, fast == slow, f"fast={fast} brute={slow}")

    triangles = g.triangle_count
    neighborhood_sum = int(g.neighborhood_edge_counts.sum())
    log.record("triangle_identity", instance, 3 * triangles == neighborhood_sum,
               f"3T={3 * triangles} sum={neighborhood_sum}")
    log.record("triangle_vs_t", instance, 3 * triangles <= g.vertex_count * g.neighborhood_edge_max)

    floor = trivial_lower_bound(g.vertex_count, g.d_max)
    lex = greedy_maximal_is(g)
    greedy = min_degree_greedy_is(g)
    log.record("lex_greedy_floor", instance, lex.size >= floor, f"size={lex.size} floor={floor:.6g}")
    log.record("min_degree_floor", instance, greedy.size >= floor, f"size={greedy.size} floor={floor:.6g}")

    if g.vertex_count <= EXACT_VERTEX_LIMIT:
        best = exact_max_is(g, settings.exact_node_budget)
        aks = aks_lower_bound(g.vertex_count, g.d_max, triangles)
        jv = jv_lower_bound(g.vertex_count, g.d_max, g.neighborhood_edge_max)
        log.record("exact_dominates_greedy", instance, best.size >= greedy.size,
                   f"alpha={best.size} greedy={greedy.size}")
        log.record("clamped_bounds_below_alpha", instance, max(aks, jv) <= best.size,
                   f"aks={aks:.6g} jv={jv:.6g} alpha={best.size}")

    report = verify(assemble(p, lex, g), settings)
    log.record("packing_verifies", instance, report.passed, report.describe())


def _check_volumes(grid: CheckGrid, seed: int, settings: PackingConfig, log: _PropertyLog) -> None:
    samples = grid.mc_samples or settings.mc_samples
    case = 0
    for n in grid.volume_dims:
        for delta in grid.deltas:
            for rho in grid.rhos:
                instance = f"n={n} delta={delta} rho={rho}"
                geometry = CapGeometry.from_delta(n, rho, delta)
                exact = intersection_volume_exact(geometry)
                cylinder = intersection_volume_cylinder_bound(geometry)
                relaxed = intersection_volume_relaxed_bound(geometry)
                ordered = exact <= cylinder * (1 + _REL_TOL) and cylinder <= relaxed * (1 + _REL_TOL)
                log.record("volume_bound_chain", instance, ordered,
                           f"exact={exact:.6g} cylinder={cylinder:.6g} relaxed={relaxed:.6g}")
                if n == 2:
                    lens = 2.0 * rho * rho * (geometry.theta - delta * math.sqrt(1.0 - delta * delta))
                    log.record("lens_closed_form", instance, abs(exact - lens) <= 1e-10 * max(1.0, lens))
                estimate = mc_ball_intersection(n, rho, delta, samples, seed + case, settings)
                log.record("volume_monte_carlo", instance, estimate.agrees_with(exact),
                           f"exact={exact:.6g} mc={estimate.mean:.6g}+-{estimate.std_error:.2g}")
                case += 1


def _check_densities(grid: CheckGrid, seed: int, settings: PackingConfig, log: _PropertyLog) -> None:
    samples = grid.mc_samples or settings.mc_samples
    for case, (n, r, s) in enumerate(grid.density_cases):
        p = PackingParams(n=n, r=r, s=s)
        g = build_graph(p, settings)
        pk = assemble(p, greedy_maximal_is(g), g)
        estimate = mc_packing_density(pk, samples, seed + case, settings)
        log.record("density_monte_carlo", f"n={n} r={r} s={s}", estimate.agrees_with(pk.density),
                   f"exact={pk.density:.6g} mc={estimate.mean:.6g}+-{estimate.std_error:.2g}")


def cmd_check(config: RunConfig) -> int:
    """
    Sweep the invariant grid and report pass/fail per property.

    Returns:
        0 if every property holds, else 3
    """
    grid = GRIDS[config.grid]
    settings = config.settings
    log = _PropertyLog()
    _check_degree_bounds(grid, settings, log)
    for n, r, s in grid.graphs:
        _check_graph(n, r, s, settings, log)
    _check_volumes(grid, config.seed, settings, log)
    _check_densities(grid, config.seed, settings, log)

    payload = {
        "grid": config.grid,
        "seed": config.seed,
        "properties": log.rows,
        "passed": not log.failures,
        "failed_count": len(log.failures),
    }
    _emit(config, make_document("check", payload, config.deterministic))
    for row in log.failures:
        print(f"FAILED {row['property']} [{row['instance']}] {row['detail']}", file=sys.stderr)
    return EXIT_OK if not log.failures else EXIT_FAILED


def cmd_bench(config: RunConfig) -> int:
    """Time graph construction and each independent-set extractor."""
    p = config.require_params()
    started = time.perf_counter()
    g = build_graph(p, config.settings)
    timings = {"graph": time.perf_counter() - started}
    sizes: dict[str, int] = {}
    for name in ALGORITHMS:
        if name == "exact" and g.vertex_count > EXACT_VERTEX_LIMIT:
            continue
        started = time.perf_counter()
        iset = _extract(name, g, config.settings)
        timings[name] = time.perf_counter() - started
        sizes[name] = iset.size

    estimate = complexity_estimate(p, g)
    payload = {
        "params": {"n": p.n, "r": p.r, "s": p.s},
        "graph": _graph_stats(g),
        "independent_set_sizes": sizes,
        "log2_predicted_work": estimate.log2_work,
        "measured_work": estimate.measured_work,
    }
    _emit(config, make_document("bench", payload, config.deterministic, timings))
    return EXIT_OK


DISPATCH: dict[str, Callable[[RunConfig], int]] = {
    "build": cmd_build,
    "bounds": cmd_bounds,
    "verify": cmd_verify,
    "check": cmd_check,
    "bench": cmd_bench,
}
