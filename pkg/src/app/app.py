#!/usr/bin/env python3
"""
Packing toolkit application

Turns parsed command-line arguments into a RunConfig, dispatches to the
command, and maps library errors to exit codes.
"""

from __future__ import annotations

import argparse
import datetime
import logging
import sys
import traceback
from pathlib import Path

from ..bounds import paper_curve, relaxed_curve
from ..config import get_packing_config
from ..errors import (
    BoundPreconditionError,
    BudgetExceededError,
    GeometryDomainError,
    IndependenceViolationError,
    InvalidParamsError,
    PackingFormatError,
    VerificationError,
)
from ..params import PackingParams
from .commands import (
    DISPATCH,
    EXIT_BAD_ARGUMENTS,
    EXIT_BUDGET,
    EXIT_FAILED,
    RunConfig,
)

LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s: %(message)s"


class App:
    """Main application class."""

    def __init__(self, args: argparse.Namespace) -> None:
        """Initialize the application.

        Args:
            args: Parsed command-line arguments (see main.parse_arguments)
        """
        self.args = args
        self.setup_logging(getattr(args, "verbose", False))

    def setup_logging(self, verbose: bool) -> None:
        """Route library logging to stderr; stdout carries only reports."""
        logging.basicConfig(
            level=logging.DEBUG if verbose else logging.WARNING,
            format=LOG_FORMAT,
            stream=sys.stderr,
            force=True,
        )

    def log_action(self, action: str, details: str = "") -> None:
        """Log command actions to stderr with timestamp."""
        timestamp = datetime.datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        log_message = f"[{timestamp}] Action: {action}"
        if details:
            log_message += f" - {details}"
        print(log_message, file=sys.stderr)

    def resolve_params(self) -> PackingParams | None:
        """Packing parameters from --dim/--r/--s, or from one of the parameter curves."""
        args = self.args
        if getattr(args, "dim", None) is None:
            return None
        if getattr(args, "paper_curve", False):
            return paper_curve(args.dim)
        if getattr(args, "relaxed_curve", False):
            return relaxed_curve(args.dim, args.eps)
        return PackingParams(n=args.dim, r=args.r, s=args.s)

    def build_run_config(self) -> RunConfig:
        """Validate the arguments into a RunConfig.

        Raises:
            InvalidParamsError: If any argument is out of range
        """
        args = self.args
        settings = get_packing_config()
        if getattr(args, "budget_vertices", None) is not None:
            if args.budget_vertices < 1:
                raise InvalidParamsError(f"--budget-vertices must be >= 1, got {args.budget_vertices}")
            settings = settings.with_overrides(budget_vertices=args.budget_vertices)
        return RunConfig(
            command=args.command,
            params=self.resolve_params(),
            algorithm=getattr(args, "algo", "lex-greedy"),
            seed=args.seed,
            output=Path(args.out) if args.out else None,
            fmt=args.format,
            deterministic=args.deterministic,
            settings=settings,
            input_path=Path(args.path) if getattr(args, "path", None) else None,
            grid=getattr(args, "grid", "small"),
            dump_path=Path(args.dump_graph) if getattr(args, "dump_graph", None) else None,
        )

    def run(self) -> int:
        """Run the selected command with comprehensive error handling.

        Returns:
            Exit code: 0 success, 1 bad arguments, 2 budget exceeded,
            3 verification or property failure
        """
        try:
            config = self.build_run_config()
            details = f"n={config.params.n} r={config.params.r} s={config.params.s}" if config.params else ""
            self.log_action(f"Command {config.command}", details)
            code = DISPATCH[config.command](config)
            self.log_action(f"Command {config.command} finished", f"exit {code}")
            return code
        except BudgetExceededError as e:
            self.log_action("Budget Exceeded", str(e))
            return EXIT_BUDGET
        except (VerificationError, PackingFormatError, IndependenceViolationError) as e:
            self.log_action("Verification Failed", f"{type(e).__name__}: {e}")
            return EXIT_FAILED
        except (InvalidParamsError, GeometryDomainError, BoundPreconditionError) as e:
            self.log_action("Invalid Arguments", str(e))
            return EXIT_BAD_ARGUMENTS
        except OSError as e:
            self.log_action("File Error", f"{type(e).__name__}: {e}")
            return EXIT_BAD_ARGUMENTS
        except KeyboardInterrupt:
            self.log_action("Interrupted", "Interrupted by user")
            return EXIT_BAD_ARGUMENTS
        except Exception as e:
            self.log_action("Application Error", f"{type(e).__name__}: {e}")
            traceback.print_exc()
            return EXIT_BAD_ARGUMENTS
