"""
``verify-identities``: seeded checks of the flow-map identities.
"""
import argparse
from typing import Tuple

from vacuumflow.cli.common import emit, load_spec, output_path
from vacuumflow.core.errors import CheckFailedError, ConfigError
from vacuumflow.physics.identities import run_identity_suite
from vacuumflow.storage.output import output_directory
from vacuumflow.storage.writers import write_json


def parse_dims(text: str) -> Tuple[int, ...]:
    """``"2,3"`` -> ``(2, 3)``; only 2 and 3 are supported."""
    try:
        dims = tuple(sorted({int(part) for part in text.split(",") if part.strip()}))
    except ValueError:
        raise ConfigError(f"--dims must list integers, got {text!r}", key="dims") from None
    if not dims or any(d not in (2, 3) for d in dims):
        raise ConfigError("--dims accepts 2 and 3", key="dims")
    return dims


def handle(args: argparse.Namespace) -> None:
    if args.config is not None:
        spec = load_spec(args)
        seed, out = spec.seed, args.output_path
    else:
        seed, out = args.seed or 0, output_path(args)
    report = run_identity_suite(
        dims=parse_dims(args.dims),
        seed=seed,
        n_samples=args.samples,
        n_points=args.points,
    )
    with output_directory(out) as directory:
        write_json(directory / "identities.json", report)
    emit({
        "command": "verify-identities",
        "out": str(out),
        "seed": report.seed,
        "dims": report.dims,
        "passed": report.passed,
        "failures": report.failures,
    })
    if not report.passed:
        raise CheckFailedError("identity checks failed", failures=report.failures)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("verify-identities", help="check the flow-map identities on random fields")
    parser.add_argument("--dims", default="2,3", help="comma-separated dimensions (default: 2,3)")
    parser.add_argument("--samples", type=int, default=20, help="random fields per dimension (default: 20)")
    parser.add_argument("--points", type=int, default=16, help="grid points per dimension (default: 16)")
    parser.set_defaults(handler=handle)
