"""
``simulate``: run one experiment and write its series, summary and requested analyses.
"""
import argparse
import logging
from typing import Optional, Tuple

import numpy as np

from vacuumflow.cli.common import emit, load_spec
from vacuumflow.cli.commands import convergence, darcy
from vacuumflow.core.errors import CheckFailedError
from vacuumflow.physics.energy import envelope_ratio_max, fit_decay, pointwise_summary
from vacuumflow.physics.solver1d import run
from vacuumflow.schemas.energy import DecayFit
from vacuumflow.schemas.experiment import ExperimentSpec, PointwiseSummary, RunResult, SimulationSummary
from vacuumflow.storage.output import output_directory
from vacuumflow.storage.writers import plot_energy_svg, write_json, write_series

logger = logging.getLogger(__name__)


def summarize(
    spec: ExperimentSpec,
    result: RunResult,
    decay_fit: Optional[DecayFit] = None,
    pointwise: Optional[PointwiseSummary] = None,
) -> SimulationSummary:
    """
    Build ``summary.json`` from a finished run.

    Args:
        spec: Experiment that was run
        result: Recorded trajectory
        decay_fit: Fitted decay, if requested and defined
        pointwise: Pointwise ratios, if requested and defined

    Returns:
        Summary document
    """
    config = result.config
    energies = result.e_total
    return SimulationSummary(
        name=spec.name,
        model=config.model,
        scheme=config.scheme,
        n_cells=config.grid.n_cells,
        spacing=config.grid.spacing,
        gamma=config.params.gamma,
        g=config.params.g,
        total_mass=config.params.total_mass,
        dt=result.dt,
        n_steps=result.n_steps,
        t_final=config.t_final,
        n_records=len(result.reports),
        e0=float(energies[0]),
        e_final=float(energies[-1]),
        boundary_final=float(result.boundary[-1]),
        max_abs_v_final=float(result.max_abs_v[-1]),
        mass_rel_err_final=float(result.mass_rel_err[-1]),
        decay_fit=decay_fit,
        envelope_max=envelope_ratio_max(result.times, energies, decay_fit) if decay_fit is not None else None,
        pointwise=pointwise,
    )


def analyse(spec: ExperimentSpec, result: RunResult) -> Tuple[Optional[DecayFit], Optional[PointwiseSummary]]:
    """Decay fit and pointwise ratios as requested; both need E(0) > 0."""
    decay_fit = None
    pointwise = None
    wants_fit = "decay_fit" in spec.analyses or "pointwise_bounds" in spec.analyses
    if wants_fit and result.e_total[0] > 0.0:
        decay_fit = fit_decay(result.times, result.e_total, spec.window())
        logger.info("Decay fit: delta=%.6g, R2=%.6f", decay_fit.delta, decay_fit.r_squared)
        if "pointwise_bounds" in spec.analyses:
            pointwise = pointwise_summary(result, decay_fit, spec.window())
    elif wants_fit:
        logger.warning("E(0) = 0: decay fit and pointwise ratios are undefined, skipped")
    return decay_fit, pointwise


def handle(args: argparse.Namespace) -> None:
    """Run the configured simulation and every analysis it lists."""
    spec = load_spec(args)
    result = run(spec.run_config)
    decay_fit, pointwise = analyse(spec, result)
    summary = summarize(spec, result, decay_fit, pointwise)

    with output_directory(spec.output_dir) as out:
        write_series(out / "series.csv", result)
        write_json(out / "summary.json", summary)
        if spec.svg:
            envelope = None
            if decay_fit is not None:
                envelope = decay_fit.amplitude * np.exp(-decay_fit.delta * result.times)
            plot_energy_svg(out / "energy.svg", result.times, result.e_total, envelope)

    payload = {
        "command": "simulate",
        "name": spec.name,
        "out": spec.output_dir,
        "n_records": summary.n_records,
        "e_final": summary.e_final,
        "delta": decay_fit.delta if decay_fit is not None else None,
    }
    failures = []
    # Study analyses write their own artifacts next to the series
    if "convergence" in spec.analyses:
        report = convergence.execute(spec)
        payload["convergence_passed"] = report.passed
        if not report.passed:
            failures.append("convergence")
    if "darcy_compare" in spec.analyses:
        report = darcy.execute(spec)
        payload["darcy_passed"] = report.passed
        if not report.passed:
            failures.append("darcy_compare")
    emit(payload)
    if failures:
        raise CheckFailedError("analysis gates failed", failures=failures)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("simulate", help="run an experiment and write series.csv and summary.json")
    parser.set_defaults(handler=handle)
