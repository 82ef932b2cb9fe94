"""Command-line application module."""

from .app import App
from .commands import RunConfig, cmd_bench, cmd_bounds, cmd_build, cmd_check, cmd_verify

__all__ = ["App", "RunConfig", "cmd_bench", "cmd_bounds", "cmd_build", "cmd_check", "cmd_verify"]
