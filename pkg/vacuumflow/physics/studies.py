"""
Multi-run studies: grid refinement and Euler/Darcy twin runs.

Runs are independent and fan out over a thread pool; results are collected in
submission order so every artifact is independent of scheduling.
"""
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from vacuumflow.core.config import settings
from vacuumflow.core.errors import DomainError
from vacuumflow.physics.solver1d import DEFAULT_STEP_FRACTION, initial_state, plan_steps, run, stable_dt
from vacuumflow.physics.weighted_calc import make_grid
from vacuumflow.schemas.experiment import ConvergenceReport, DarcyReport, RunResult
from vacuumflow.schemas.state import RunConfig

logger = logging.getLogger(__name__)

QUANTITIES = ("omega_sup", "vel_sup", "gamma_boundary", "e_total", "mass_rel_err")
# Orders of these quantities are gated by min_order
GATED_QUANTITIES = ("omega_sup", "vel_sup")
DARCY_RECORDS = 100


def worker_count(n_jobs: int) -> int:
    """Threads for ``n_jobs`` runs, capped by ``VEL_NUM_THREADS`` (0 = one per CPU)."""
    cap = settings.NUM_THREADS or os.cpu_count() or 1
    return max(1, min(cap, n_jobs))


def run_many(configs: Sequence[RunConfig], record_times: Optional[Sequence[float]] = None) -> List[RunResult]:
    """
    Run independent simulations concurrently.

    Args:
        configs: One configuration per run
        record_times: Shared explicit record instants

    Returns:
        Results in the order of ``configs``
    """
    with ThreadPoolExecutor(max_workers=worker_count(len(configs))) as pool:
        return list(pool.map(lambda config: run(config, record_times=record_times), configs))


def refinement_configs(config: RunConfig, levels: int) -> List[RunConfig]:
    """
    Configurations with N·2^k cells and a step divided by 2^k (4^k for Darcy).

    Only the initial and final states are recorded.
    """
    if levels < 2:
        raise ValueError("a refinement study needs at least two levels")
    base_dt = config.dt
    if base_dt is None:
        base_dt = DEFAULT_STEP_FRACTION * stable_dt(config, initial_state(config))
    n_base, base_dt = plan_steps(config.t_final, base_dt)
    shrink = 4 if config.model == "darcy" else 2

    configs = []
    for k in range(levels):
        grid = make_grid(config.params, config.grid.n_cells * 2 ** k, config.grid.spacing)
        configs.append(
            RunConfig(
                params=config.params,
                grid=grid,
                dt=base_dt / shrink ** k,
                t_final=config.t_final,
                model=config.model,
                init=config.init,
                cfl_safety=config.cfl_safety,
                output_every=n_base * shrink ** k,
                scheme=config.scheme,
            )
        )
    return configs


def _final_quantities(result: RunResult, stride: int) -> Dict[str, np.ndarray]:
    """Final-time quantities; nodal ones on the interior nodes of the coarsest grid."""
    final = result.final
    return {
        "omega_sup": final.omega[::stride][1:-1],
        "vel_sup": final.vel[::stride][1:-1],
        "gamma_boundary": np.array([result.boundary[-1]]),
        "e_total": np.array([result.reports[-1].e_total]),
        "mass_rel_err": np.array([result.mass_rel_err[-1]]),
    }


def observed_orders(differences: Sequence[float]) -> List[float]:
    """log₂(d_k / d_{k+1}); NaN where a difference vanishes."""
    orders = []
    for coarse, fine in zip(differences, differences[1:]):
        if coarse > 0.0 and fine > 0.0:
            orders.append(math.log2(coarse / fine))
        else:
            orders.append(float("nan"))
    return orders


def convergence_study(
    config: RunConfig,
    levels: int = 3,
    name: str = "convergence",
    min_order: Optional[float] = None,
) -> ConvergenceReport:
    """
    Refine space and time together and report observed orders at t_final.

    The finest level is the reference: every coarser level is compared with it
    on the interior nodes of the coarsest grid, which every finer grid contains.

    Args:
        config: Level-0 configuration
        levels: Number of levels (orders need at least three)
        name: Experiment name
        min_order: Gate on the orders of ω and v

    Returns:
        Errors against the reference and orders per quantity
    """
    configs = refinement_configs(config, levels)
    results = run_many(configs)
    samples = [_final_quantities(result, 2 ** k) for k, result in enumerate(results)]
    reference = samples[-1]

    differences: Dict[str, List[float]] = {}
    orders: Dict[str, List[float]] = {}
    for quantity in QUANTITIES:
        errors = [
            float(np.max(np.abs(samples[k][quantity] - reference[quantity])))
            for k in range(levels - 1)
        ]
        differences[quantity] = errors
        orders[quantity] = observed_orders(errors)

    passed = True
    if min_order is not None:
        gated = [order for q in GATED_QUANTITIES for order in orders[q]]
        passed = all(order >= min_order for order in gated)
    logger.info("Convergence %s: orders %s", name, {q: orders[q] for q in GATED_QUANTITIES})
    return ConvergenceReport(
        name=name,
        n_cells=[c.grid.n_cells for c in configs],
        dt=[c.dt for c in configs],
        t_final=config.t_final,
        differences=differences,
        orders=orders,
        min_order=min_order,
        passed=passed,
    )


def darcy_compare(
    config: RunConfig,
    times: Tuple[float, float] = (1.0, 20.0),
    name: str = "darcy",
    max_ratio: Optional[float] = None,
) -> DarcyReport:
    """
    Twin runs (damped Euler, Darcy) from the same ω₀ and the series ‖ω_e − ω_d‖_∞(t).

    Args:
        config: Shared configuration; its model and step are replaced per run
        times: (t_early, t_late); the runs end at t_late
        name: Experiment name
        max_ratio: Gate on deviation(t_late) / deviation(t_early)

    Returns:
        Deviation series and the late/early ratio
    """
    t_early, t_late = times
    if not 0.0 < t_early < t_late:
        raise DomainError("comparison times must satisfy 0 < t_early < t_late", times=list(times))
    record_times = sorted(set(np.linspace(0.0, t_late, DARCY_RECORDS + 1)[1:].tolist()) | {t_early, t_late})
    twins = [
        config.model_copy(update={"model": model, "t_final": t_late, "dt": None, "output_every": None})
        for model in ("euler_damped", "darcy")
    ]
    euler, darcy = run_many(twins, record_times=record_times)

    times_out = euler.times.tolist()
    deviation = [
        float(np.max(np.abs(a.omega - b.omega))) for a, b in zip(euler.snapshots, darcy.snapshots)
    ]
    early = deviation[times_out.index(t_early)]
    late = deviation[times_out.index(t_late)]
    ratio = late / early if early > 0.0 else 0.0
    passed = max_ratio is None or ratio <= max_ratio
    logger.info("Darcy compare %s: deviation %.3g at t=%g, %.3g at t=%g", name, early, t_early, late, t_late)
    return DarcyReport(
        name=name,
        n_cells=config.grid.n_cells,
        times=times_out,
        deviation=deviation,
        t_early=t_early,
        t_late=t_late,
        deviation_early=early,
        deviation_late=late,
        ratio=ratio,
        max_ratio=max_ratio,
        passed=passed,
    )
