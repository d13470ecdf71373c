"""
Command-line router.
Combines all subcommand parsers under one ``vacuumflow`` entry point.
"""
import argparse
from pathlib import Path
from typing import List, Optional

from vacuumflow.cli.commands import convergence, darcy, decay, identities, simulate
from vacuumflow.core.config import settings
from vacuumflow.schemas.experiment import SEED_LIMIT


def seed_value(text: str) -> int:
    """Unsigned 64-bit seed."""
    try:
        seed = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= seed < SEED_LIMIT:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2**64)")
    return seed


def build_parser() -> argparse.ArgumentParser:
    """
    Parser with the global flags and one subparser per command.

    Returns:
        Configured parser; ``args.handler`` is the command to run
    """
    parser = argparse.ArgumentParser(
        prog=settings.PROJECT_NAME,
        description="Damped Euler flows with a physical vacuum boundary: simulations and checks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.VERSION}")
    parser.add_argument("--config", help="experiment file (key = value lines under [section] headers)")
    parser.add_argument("--out", help=f"output directory (default: config output_dir or {settings.DEFAULT_OUTPUT_DIR})")
    parser.add_argument("--seed", type=seed_value, help="seed override, 0 <= seed < 2**64")
    parser.add_argument("--quiet", action="store_true", help="log warnings and errors only")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        metavar="SECTION.KEY=VALUE",
        help="override a config key (repeatable)",
    )

    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for command in (simulate, decay, identities, convergence, darcy):
        command.register(subparsers)
    return parser


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    args = build_parser().parse_args(argv)
    args.output_path = Path(args.out) if args.out else None
    return args
