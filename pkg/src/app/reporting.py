"""
Report documents for the command-line front end.

Commands assemble a plain dictionary; this module renders it either as an
aligned text table (numbers rounded to a few significant digits) or as JSON
with full precision and sorted keys, so equal inputs give equal bytes.
"""

from __future__ import annotations

import datetime
import json
import math
from typing import Any, TextIO

from ..bounds import BoundReport, headline_density
from ..packing import Packing, VerificationReport

VERSION = "1.0.0"
FORMATS = ("text", "json")


def format_value(value: Any, digits: int) -> str:
    """Render one value for the text table."""
    if value is None:
        return "invalid"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        if math.isinf(value):
            return "-inf" if value < 0 else "inf"
        return f"{value:.{digits}g}"
    return str(value)


def make_document(
    command: str,
    payload: dict[str, Any],
    deterministic: bool,
    timings: dict[str, float] | None = None,
) -> dict[str, Any]:
    """
    Wrap a command's payload with the common header fields.

    The timestamp and any timings are left out in deterministic mode.
    """
    document: dict[str, Any] = {"command": command, "version": VERSION, "result": payload}
    if not deterministic:
        document["timestamp"] = datetime.datetime.now().isoformat(timespec="seconds")
        if timings:
            document["timings_seconds"] = timings
    return document


def _flatten(prefix: str, value: Any, rows: list[tuple[str, Any]]) -> None:
    if isinstance(value, dict):
        for key, item in value.items():
            _flatten(f"{prefix}.{key}" if prefix else str(key), item, rows)
    elif isinstance(value, list) and value and isinstance(value[0], dict):
        for index, item in enumerate(value):
            _flatten(f"{prefix}[{index}]", item, rows)
    else:
        rows.append((prefix, value))


def render_text(document: dict[str, Any], digits: int) -> str:
    """Two-column key/value table of a document, nested keys joined by dots."""
    rows: list[tuple[str, Any]] = []
    _flatten("", document, rows)
    width = max((len(key) for key, _ in rows), default=0)
    lines = []
    for key, value in rows:
        if isinstance(value, list):
            shown = ", ".join(format_value(item, digits) for item in value)
        else:
            shown = format_value(value, digits)
        lines.append(f"{key.ljust(width)}  {shown}")
    return "\n".join(lines) + "\n"


def render_json(document: dict[str, Any]) -> str:
    return json.dumps(document, indent=2, sort_keys=True, allow_nan=False) + "\n"


def emit(document: dict[str, Any], fmt: str, digits: int, stream: TextIO) -> None:
    """Write a document to the stream in the requested format."""
    if fmt == "json":
        stream.write(render_json(document))
    else:
        stream.write(render_text(document, digits))
    stream.flush()


def bounds_payload(report: BoundReport) -> dict[str, Any]:
    """
    Bound report fields plus the derived comparisons shown by `bounds`.

    Adds the t/d^2 decay exponent and, where the improved guarantee is valid,
    its margin over log2(0.01 n 2^-n).
    """
    payload = report.to_dict()
    p = report.params
    payload["params"] = {"n": p.n, "r": p.r, "s": p.s}
    if report.t_upper_generic is not None:
        payload["log2_t_over_d_squared"] = report.t_upper_generic - 2.0 * report.d_upper
    else:
        payload["log2_t_over_d_squared"] = None
    headline = headline_density(p.n)
    payload["log2_headline_density"] = headline
    payload["improved_minus_headline"] = (
        report.improved_density - headline if report.improved_density is not None else None
    )
    return payload


def packing_payload(pk: Packing, report: VerificationReport) -> dict[str, Any]:
    """Summary of a packing and its verification."""
    count, radius_power, cell_volume = pk.density_parts
    ratio = pk.density_over_ball_volume
    return {
        "params": {"n": pk.params.n, "r": pk.params.r, "s": pk.params.s},
        "centers": count,
        "density": pk.density,
        "log2_density": pk.log2_density if math.isfinite(pk.log2_density) else None,
        "density_exact": f"{ratio.numerator}/{ratio.denominator} * V_{pk.params.n}",
        "density_parts": {"count": count, "r_power_n": radius_power, "cell_volume": cell_volume},
        "verification": {
            "passed": report.passed,
            "method": report.method,
            "min_squared_distance": report.min_squared_distance,
            "violations": len(report.violations),
            "outside": len(report.outside),
            "summary": report.describe(pk),
        },
    }
