"""
``darcy-compare``: damped Euler and Darcy twin runs from the same ω₀.
"""
import argparse

from vacuumflow.cli.common import emit, load_spec
from vacuumflow.core.errors import CheckFailedError
from vacuumflow.physics.studies import darcy_compare
from vacuumflow.schemas.experiment import DarcyReport, ExperimentSpec
from vacuumflow.storage.output import output_directory
from vacuumflow.storage.writers import write_csv, write_json


def execute(spec: ExperimentSpec) -> DarcyReport:
    """Run both models and write ``darcy.json`` and ``darcy_series.csv``."""
    report = darcy_compare(spec.run_config, spec.darcy_times, spec.name, spec.darcy_max_ratio)
    with output_directory(spec.output_dir) as out:
        write_json(out / "darcy.json", report)
        write_csv(out / "darcy_series.csv", ("t", "deviation"), zip(report.times, report.deviation))
    return report


def handle(args: argparse.Namespace) -> None:
    spec = load_spec(args)
    report = execute(spec)
    emit({
        "command": "darcy-compare",
        "name": spec.name,
        "out": spec.output_dir,
        "deviation_early": report.deviation_early,
        "deviation_late": report.deviation_late,
        "ratio": report.ratio,
        "passed": report.passed,
    })
    if not report.passed:
        raise CheckFailedError(
            f"late/early deviation ratio {report.ratio:.3g} exceeds {report.max_ratio}",
            ratio=report.ratio,
        )


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("darcy-compare", help="compare damped Euler against Darcy flow")
    parser.set_defaults(handler=handle)
