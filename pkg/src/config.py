"""
Configuration for the packing toolkit.

Defaults live as module constants (used when no config file is present) and
in config/packing_config.json, whose entries carry default/min/max/description
fields. The worker count comes from the PACKING_FORGE_THREADS environment
variable.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

from .errors import InvalidParamsError

logger = logging.getLogger(__name__)

# Configuration constants
BUDGET_VERTICES = 10_000_000
BUDGET_COMPARISONS = 1_000_000_000
EXACT_NODE_BUDGET = 10_000_000
BRUTE_FORCE_LIMIT = 5000
MC_SAMPLES = 1_000_000
MC_SHARDS = 8
VERIFY_ALL_PAIRS_LIMIT = 10_000
EXACT_SHELL_LIMIT = 10_000
TEXT_SIGNIFICANT_DIGITS = 6

THREADS_ENV_VAR = "PACKING_FORGE_THREADS"
DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "config" / "packing_config.json"


@dataclass(frozen=True)
class PackingConfig:
    """Resolved configuration values."""

    budget_vertices: int = BUDGET_VERTICES
    budget_comparisons: int = BUDGET_COMPARISONS
    exact_node_budget: int = EXACT_NODE_BUDGET
    brute_force_limit: int = BRUTE_FORCE_LIMIT
    mc_samples: int = MC_SAMPLES
    mc_shards: int = MC_SHARDS
    verify_all_pairs_limit: int = VERIFY_ALL_PAIRS_LIMIT
    exact_shell_limit: int = EXACT_SHELL_LIMIT
    text_significant_digits: int = TEXT_SIGNIFICANT_DIGITS

    def with_overrides(self, **overrides: Any) -> PackingConfig:
        """Return a copy with the non-None overrides applied."""
        values = {key: value for key, value in overrides.items() if value is not None}
        return replace(self, **values)


def get_packing_config(path: str | Path | None = None) -> PackingConfig:
    """
    Load configuration from a JSON file.

    Args:
        path: Config file; defaults to config/packing_config.json

    Returns:
        PackingConfig with every value range-checked

    Raises:
        InvalidParamsError: If a value lies outside its declared min/max
    """
    config_path = Path(path) if path is not None else DEFAULT_CONFIG_PATH
    if not config_path.exists():
        logger.debug("No config file at %s, using built-in defaults", config_path)
        return PackingConfig()

    with config_path.open(encoding="utf-8") as handle:
        document = json.load(handle)

    values: dict[str, int] = {}
    for section in document.values():
        if not isinstance(section, dict):
            continue
        for key, entry in section.items():
            if key not in PackingConfig.__dataclass_fields__ or not isinstance(entry, dict):
                continue
            value = int(entry["default"])
            low, high = entry.get("min"), entry.get("max")
            if (low is not None and value < low) or (high is not None and value > high):
                raise InvalidParamsError(
                    f"Config value {key}={value} outside [{low}, {high}] in {config_path}"
                )
            values[key] = value

    logger.debug("Loaded %d config values from %s", len(values), config_path)
    return PackingConfig(**values)


def worker_count() -> int:
    """
    Number of worker threads, capped by PACKING_FORGE_THREADS.

    Returns:
        At least 1
    """
    available = os.cpu_count() or 1
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or raw.strip() == "":
        return available
    try:
        cap = int(raw)
    except ValueError:
        logger.warning("Ignoring non-integer %s=%r", THREADS_ENV_VAR, raw)
        return available
    return max(1, min(cap, available)) if cap > 0 else 1
