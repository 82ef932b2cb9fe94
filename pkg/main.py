#!/usr/bin/env python3
"""
Packing toolkit entry point

Minimal entry point that parses arguments and runs the application.
"""

import argparse
import sys

from src.app import App
from src.app.reporting import FORMATS, VERSION
from src.app.commands import ALGORITHMS, EXIT_BAD_ARGUMENTS, GRIDS


class ArgumentParser(argparse.ArgumentParser):
    """Argument parser that exits with the bad-arguments code."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_BAD_ARGUMENTS)


def _common_options() -> argparse.ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--dim", "-n", type=int, help="Dimension n")
    common.add_argument("--r", type=int, default=1, help="Sphere radius r (default: 1)")
    common.add_argument("--s", type=int, default=8, help="Even cube side s (default: 8)")
    common.add_argument("--seed", type=int, default=0, help="Base seed for sampling (default: 0)")
    common.add_argument("--out", help="Output file (packing file for build, report otherwise)")
    common.add_argument("--format", choices=FORMATS, default="text", help="Report format")
    curves = common.add_mutually_exclusive_group()
    curves.add_argument(
        "--paper-curve",
        action="store_true",
        help="Use r=2n^2, s=2n^4 (build refuses it beyond the budget)",
    )
    curves.add_argument(
        "--relaxed-curve",
        action="store_true",
        help="Use r=n^(1.5+eps), s=n^(2.5+eps) rounded up to even integers",
    )
    common.add_argument("--eps", type=float, default=0.0, help="Exponent offset for --relaxed-curve")
    common.add_argument(
        "--deterministic",
        action="store_true",
        help="Omit timestamps and timings so reruns give identical output",
    )
    common.add_argument("--budget-vertices", type=int, help="Override the vertex budget")
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging on stderr")
    return common


def parse_arguments(argv: list[str] | None = None) -> argparse.Namespace:
    """Parse command line arguments."""
    parser = ArgumentParser(
        description="Verified sphere packings from lattice graphs",
        prog="packing-forge",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py build --dim 2 --r 1 --s 8 --algo lex-greedy --out p.txt
  python main.py bounds --dim 1000 --paper-curve --format json
  python main.py verify p.txt
  python main.py check --grid small --seed 42
  python main.py bench --dim 3 --r 1 --s 10

Exit codes: 0 success, 1 bad arguments, 2 budget exceeded,
3 verification or property failure. PACKING_FORGE_THREADS caps worker threads.
        """,
    )
    parser.add_argument("--version", action="version", version=f"packing-forge v{VERSION}")

    common = _common_options()
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    build = commands.add_parser("build", parents=[common], help="Construct and verify a packing")
    build.add_argument("--algo", choices=list(ALGORITHMS), default="lex-greedy",
                       help="Independent-set algorithm (default: lex-greedy)")
    build.add_argument("--dump-graph", help="Write the lattice graph dump to this file")

    commands.add_parser("bounds", parents=[common], help="Evaluate the closed-form bounds")

    verify = commands.add_parser("verify", parents=[common], help="Re-verify a packing file")
    verify.add_argument("path", help="Packing file")

    check = commands.add_parser("check", parents=[common], help="Run the invariant grid")
    check.add_argument("--grid", choices=list(GRIDS), default="small", help="Instance grid")

    commands.add_parser("bench", parents=[common], help="Time construction and extraction")

    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    """Application entry point."""
    args = parse_arguments(argv)
    app = App(args)
    return app.run()


if __name__ == "__main__":
    sys.exit(main())
