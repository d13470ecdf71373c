"""
``convergence``: refine N → 2N → 4N … and report observed orders.
"""
import argparse

from vacuumflow.cli.common import emit, load_spec
from vacuumflow.core.errors import CheckFailedError
from vacuumflow.physics.studies import convergence_study
from vacuumflow.schemas.experiment import ConvergenceReport, ExperimentSpec
from vacuumflow.storage.output import output_directory
from vacuumflow.storage.writers import write_json


def execute(spec: ExperimentSpec) -> ConvergenceReport:
    """Run the study and write ``convergence.json``."""
    report = convergence_study(spec.run_config, spec.levels, spec.name, spec.min_order)
    with output_directory(spec.output_dir) as out:
        write_json(out / "convergence.json", report)
    return report


def handle(args: argparse.Namespace) -> None:
    spec = load_spec(args)
    report = execute(spec)
    emit({
        "command": "convergence",
        "name": spec.name,
        "out": spec.output_dir,
        "n_cells": report.n_cells,
        "orders": {q: report.orders[q] for q in ("omega_sup", "vel_sup")},
        "passed": report.passed,
    })
    if not report.passed:
        raise CheckFailedError(
            f"observed order below {spec.min_order}",
            orders=report.orders,
        )


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("convergence", help="grid-refinement study of the configured run")
    parser.set_defaults(handler=handle)
