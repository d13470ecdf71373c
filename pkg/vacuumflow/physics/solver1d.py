"""
Time integration of the 1D Lagrangian perturbation equation

    σ^ι(∂ₜ²ω + ∂ₜω) + ∂_y(σ^{ι+1}((1+∂_yω)^{−γ} − 1)) = 0,   ω(t, 0) = 0,

and of its inertialess Darcy reduction σ^ι∂ₜω = −∂_y(σ^{ι+1}((1+∂_yω)^{−γ} − 1)).
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from vacuumflow.core.errors import (
    CFLViolationError,
    DomainError,
    NonFiniteStateError,
    SolverError,
)
from vacuumflow.physics.discretization import LagrangianOperator, time_derivatives
from vacuumflow.physics.energy import energy_report
from vacuumflow.physics.model import mass_relative_error, reconstruct_eulerian
from vacuumflow.physics.weighted_calc import derivative
from vacuumflow.schemas.energy import EnergyReport
from vacuumflow.schemas.experiment import RunResult
from vacuumflow.schemas.params import GasParams
from vacuumflow.schemas.grid import Grid1D
from vacuumflow.schemas.state import RunConfig, SchemeName, State1D

logger = logging.getLogger(__name__)

# Initial data must satisfy max|∂_yω₀| <= SMALLNESS_GATE
SMALLNESS_GATE = 0.4
# Default step as a fraction of the admissible one
DEFAULT_STEP_FRACTION = 0.8
# Records per run when output_every is not given
DEFAULT_RECORDS = 200

# (steps, step size, time at the end of the segment)
Segment = Tuple[int, float, float]


def initial_state(config: RunConfig) -> State1D:
    """
    Build (ω₀, v₀) on the grid from ``config.init``.

    Args:
        config: Run configuration

    Returns:
        State at t = 0
    """
    init = config.init
    grid = config.grid
    y = grid.nodes
    if init.family == "sine_mode":
        shape = np.sin((init.mode - 0.5) * np.pi * y / grid.hbar)
        omega = init.amplitude * shape
        vel = init.vel_amplitude * shape
    elif init.family == "polynomial_bump":
        r = y / grid.hbar
        shape = r * r * (3.0 - 2.0 * r)
        omega = init.amplitude * shape
        vel = init.vel_amplitude * shape
    else:
        table_y = np.asarray(init.table_y, dtype=float)
        if table_y[0] > 0.0 or table_y[-1] < grid.hbar:
            raise DomainError("custom table must cover [0, hbar]", hbar=grid.hbar)
        table_vel = init.table_vel if init.table_vel is not None else np.zeros(table_y.size)
        omega = np.interp(y, table_y, np.asarray(init.table_omega, dtype=float))
        vel = np.interp(y, table_y, np.asarray(table_vel, dtype=float))
        if omega[0] != 0.0 or vel[0] != 0.0:
            raise DomainError("initial data must vanish at y = 0")

    omega = np.array(omega, dtype=float)
    vel = np.array(vel, dtype=float)
    omega[0] = 0.0
    vel[0] = 0.0
    slope = float(np.max(np.abs(derivative(grid, omega, 1))))
    if slope > SMALLNESS_GATE:
        raise DomainError(
            f"initial data too large: max|∂_yω₀| = {slope:.3g} exceeds {SMALLNESS_GATE}",
            key="amplitude",
        )
    if config.model == "darcy":
        # Darcy data is ω₀ alone; its velocity is the flux divergence
        vel = LagrangianOperator(config.params, grid, config.scheme).force(omega)
    return State1D(time=0.0, omega=omega, vel=vel)


def rhs_acceleration(
    params: GasParams,
    grid: Grid1D,
    state: State1D,
    damping: bool = True,
    scheme: SchemeName = "product_rule",
) -> np.ndarray:
    """
    a = −v − (σ∂_yΦ − ν(ι+1)Φ) at the nodes, Φ = (1+∂_yω)^{−γ} − 1.

    The product-rule form is the pointwise evaluation; ``scheme="flux"`` gives
    the acceleration the conservative integrator uses instead.

    Args:
        params: Gas parameters
        grid: Grid of the state
        state: Current state
        damping: Keep the −v term
        scheme: Force discretization

    Returns:
        Nodal acceleration
    """
    operator = LagrangianOperator(params, grid, scheme)
    accel, _ = time_derivatives(operator, state.omega, state.vel, damping=damping)
    return accel


def force_rate(
    params: GasParams,
    grid: Grid1D,
    omega: np.ndarray,
    vel: np.ndarray,
    scheme: SchemeName = "product_rule",
) -> np.ndarray:
    """Time derivative of the pressure-gravity force along ∂ₜω = vel."""
    return LagrangianOperator(params, grid, scheme).force_rate(omega, vel)


def physical_energy(params: GasParams, grid: Grid1D, state: State1D) -> float:
    """
    ½Σ m_j v_j² + Σ Δ σ^{ι+1} W(∂_yω); decreases at the rate Σ m_j v_j² under damping.
    """
    operator = LagrangianOperator(params, grid)
    return operator.kinetic_energy(state.vel) + operator.stored_energy(state.omega)


def stable_dt(config: RunConfig, state: State1D) -> float:
    """
    Largest admissible step for the configured model at ``state``.

    Euler: cfl_safety · min Δy / c_max.  Darcy: cfl_safety · min Δy² / (2γσ_max).
    """
    operator = LagrangianOperator(config.params, config.grid, config.scheme)
    return _limit(operator, config.model, config.cfl_safety, state.omega)


def _limit(operator: LagrangianOperator, model: str, safety: float, omega: np.ndarray) -> float:
    if model == "darcy":
        return operator.parabolic_limit(safety)
    return operator.hyperbolic_limit(omega, safety)


def _check_finite(omega: np.ndarray, vel: np.ndarray, time: float) -> None:
    if not (np.all(np.isfinite(omega)) and np.all(np.isfinite(vel))):
        raise NonFiniteStateError("state contains non-finite values", time=time)


def _check_cfl(operator: LagrangianOperator, model: str, safety: float, omega: np.ndarray, dt: float, time: float) -> None:
    limit = _limit(operator, model, safety, omega)
    if dt > limit * (1.0 + 1e-12):
        raise CFLViolationError(
            f"dt = {dt:.6g} exceeds the stability limit {limit:.6g}",
            time=time,
            dt=dt,
            limit=limit,
        )


def _check_step(operator: LagrangianOperator, model: str, safety: float, omega: np.ndarray, dt: float, time: float) -> None:
    # sound_speed_bound >= max_sound_speed, so passing it settles the check
    if model != "darcy" and dt * operator.sound_speed_bound(omega) <= safety * operator.min_width:
        return
    _check_cfl(operator, model, safety, omega, dt, time)


def _euler_substep(
    operator: LagrangianOperator,
    omega: np.ndarray,
    vel: np.ndarray,
    force: np.ndarray,
    dt: float,
    decay: float,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Strang split: half damping, velocity Verlet, half damping."""
    vel = vel * decay
    vel = vel + 0.5 * dt * force
    omega = omega + dt * vel
    omega[0] = 0.0
    force = operator.force(omega)
    vel = vel + 0.5 * dt * force
    vel = vel * decay
    vel[0] = 0.0
    return omega, vel, force


def _darcy_substep(operator: LagrangianOperator, omega: np.ndarray, force: np.ndarray, dt: float) -> Tuple[np.ndarray, np.ndarray]:
    omega = omega + dt * force
    omega[0] = 0.0
    return omega, operator.force(omega)


def _resolve_step(operator: LagrangianOperator, config: RunConfig, model: str, dt: Optional[float], state: State1D) -> float:
    if dt is not None:
        return dt
    if config.dt is not None:
        return config.dt
    return DEFAULT_STEP_FRACTION * _limit(operator, model, config.cfl_safety, state.omega)


def step_euler_damped(config: RunConfig, state: State1D, dt: Optional[float] = None, damping: bool = True) -> State1D:
    """
    Advance (ω, v) by one step of the damped Euler scheme.

    The damping factor e^{−dt/2} is applied exactly around a velocity-Verlet
    step of the pressure-gravity force; the bottom is re-imposed afterwards.

    Args:
        config: Run configuration (``dt`` used unless given explicitly)
        state: Current state
        dt: Step size override
        damping: Keep the damping term

    Returns:
        State at t + dt
    """
    operator = LagrangianOperator(config.params, config.grid, config.scheme)
    try:
        step = _resolve_step(operator, config, "euler_damped", dt, state)
        _check_cfl(operator, "euler_damped", config.cfl_safety, state.omega, step, state.time)
        decay = math.exp(-0.5 * step) if damping else 1.0
        force = operator.force(state.omega)
        omega, vel, _ = _euler_substep(operator, state.omega.copy(), state.vel.copy(), force, step, decay)
        _check_finite(omega, vel, state.time + step)
    except SolverError as exc:
        raise exc.at_time(state.time)
    return State1D(time=state.time + step, omega=omega, vel=vel)


def step_darcy(config: RunConfig, state: State1D, dt: Optional[float] = None) -> State1D:
    """
    Advance the Darcy flow ∂ₜω = F(ω) by one explicit Euler step.

    Args:
        config: Run configuration
        state: Current state (its ``vel`` is ignored)
        dt: Step size override

    Returns:
        State at t + dt with ``vel`` = F(ω) at the new time
    """
    operator = LagrangianOperator(config.params, config.grid, config.scheme)
    try:
        step = _resolve_step(operator, config, "darcy", dt, state)
        _check_cfl(operator, "darcy", config.cfl_safety, state.omega, step, state.time)
        omega, vel = _darcy_substep(operator, state.omega.copy(), operator.force(state.omega), step)
        _check_finite(omega, vel, state.time + step)
    except SolverError as exc:
        raise exc.at_time(state.time)
    return State1D(time=state.time + step, omega=omega, vel=vel)


def plan_steps(t_final: float, dt: float) -> Tuple[int, float]:
    """
    Number of steps and the step that lands exactly on ``t_final``.

    A ``dt`` that divides ``t_final`` is kept; otherwise it is shrunk.
    """
    ratio = t_final / dt
    n_steps = int(round(ratio))
    if n_steps >= 1 and abs(n_steps * dt - t_final) <= 1e-9 * t_final:
        return n_steps, dt
    n_steps = max(1, math.ceil(ratio))
    return n_steps, t_final / n_steps


def run(
    config: RunConfig,
    damping: bool = True,
    record_times: Optional[Sequence[float]] = None,
) -> RunResult:
    """
    Integrate from the configured initial data to ``t_final``.

    Records are taken every ``output_every`` steps (and at the final step), or
    exactly at ``record_times`` when given; in that case each interval between
    records is split into equal steps no larger than the base step.

    Args:
        config: Run configuration
        damping: Keep the damping term (Euler only)
        record_times: Explicit record instants in (0, t_final]

    Returns:
        Recorded trajectory with energy reports and boundary positions
    """
    params, grid = config.params, config.grid
    operator = LagrangianOperator(params, grid, config.scheme)
    state = initial_state(config)
    base_dt = _resolve_step(operator, config, config.model, None, state)
    n_steps, dt = plan_steps(config.t_final, base_dt)

    if record_times is None:
        every = config.output_every or max(1, n_steps // DEFAULT_RECORDS)
        segments = _uniform_segments(n_steps, every, dt, config.t_final)
    else:
        segments = _segments_for(record_times, config.t_final, base_dt)

    logger.info(
        "Run %s: N=%d, dt=%.4g, steps=%d, t_final=%g",
        config.model, grid.n_cells, dt, sum(n for n, _, _ in segments), config.t_final,
    )

    recorder = _Recorder(config, operator, damping)
    recorder.add(state)
    omega = state.omega.copy()
    vel = state.vel.copy()
    time = 0.0
    force = operator.force(omega)
    decay_cache = {}
    taken = 0
    for count, step, t_end in segments:
        if step not in decay_cache:
            decay_cache[step] = math.exp(-0.5 * step) if damping else 1.0
        try:
            for _ in range(count):
                _check_step(operator, config.model, config.cfl_safety, omega, step, time)
                if config.model == "darcy":
                    omega, force = _darcy_substep(operator, omega, force, step)
                else:
                    omega, vel, force = _euler_substep(operator, omega, vel, force, step, decay_cache[step])
                time += step
                taken += 1
                _check_finite(omega, force, time)
        except SolverError as exc:
            raise exc.at_time(time)
        time = t_end
        if config.model == "darcy":
            vel = force.copy()
        recorder.add(State1D(time=time, omega=omega.copy(), vel=vel.copy()))
        logger.debug("t=%.4g E_total=%.6g", time, recorder.reports[-1].e_total)

    return recorder.result(dt=dt, n_steps=taken)


def _uniform_segments(n_steps: int, every: int, dt: float, t_final: float) -> List[Segment]:
    ends = list(range(every, n_steps + 1, every))
    if not ends or ends[-1] != n_steps:
        ends.append(n_steps)
    segments = []
    previous = 0
    for end in ends:
        segments.append((end - previous, dt, t_final if end == n_steps else end * dt))
        previous = end
    return segments


def _segments_for(record_times: Sequence[float], t_final: float, base_dt: float) -> List[Segment]:
    times = sorted({float(t) for t in record_times if 0.0 < t <= t_final} | {t_final})
    segments = []
    previous = 0.0
    for t in times:
        span = t - previous
        count = max(1, math.ceil(span / base_dt - 1e-9))
        segments.append((count, span / count, t))
        previous = t
    return segments


class _Recorder:
    """Collects snapshots, energy reports and diagnostics of one run."""

    def __init__(self, config: RunConfig, operator: LagrangianOperator, damping: bool) -> None:
        self.config = config
        self.operator = operator
        self.damping = damping
        self.snapshots: List[State1D] = []
        self.reports: List[EnergyReport] = []
        self.boundary: List[float] = []
        self.max_abs_v: List[float] = []
        self.mass_rel_err: List[float] = []

    def add(self, state: State1D) -> None:
        params, grid = self.config.params, self.config.grid
        accel, jerk = time_derivatives(
            self.operator, state.omega, state.vel, model=self.config.model, damping=self.damping,
        )
        field = reconstruct_eulerian(params, grid, state)
        self.snapshots.append(state)
        self.reports.append(energy_report(params, grid, state, accel, jerk=jerk))
        self.boundary.append(grid.hbar + float(state.omega[-1]))
        self.max_abs_v.append(float(np.max(np.abs(state.vel))))
        self.mass_rel_err.append(mass_relative_error(params, field))

    def result(self, dt: float, n_steps: int) -> RunResult:
        return RunResult(
            config=self.config,
            dt=dt,
            n_steps=n_steps,
            times=np.array([s.time for s in self.snapshots]),
            snapshots=self.snapshots,
            reports=self.reports,
            boundary=np.array(self.boundary),
            max_abs_v=np.array(self.max_abs_v),
            mass_rel_err=np.array(self.mass_rel_err),
        )
