"""
Weighted energy and dissipation functionals of discrete states, and decay-rate fits.
"""
import logging
import math
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from vacuumflow.core.errors import DomainError, GridMismatchError, ZeroDenominatorError
from vacuumflow.physics.discretization import LagrangianOperator, time_derivatives
from vacuumflow.physics.model import reconstruct_eulerian
from vacuumflow.physics.weighted_calc import derivative, integrate, make_cutoffs, sigma_power
from vacuumflow.schemas.energy import NORM_INDICES, DecayFit, EnergyReport, PointwiseRatios
from vacuumflow.schemas.experiment import PointwiseSummary, RunResult
from vacuumflow.schemas.grid import Grid1D
from vacuumflow.schemas.params import GasParams
from vacuumflow.schemas.state import State1D

logger = logging.getLogger(__name__)

MIN_FIT_SAMPLES = 10


def energy_report(
    params: GasParams,
    grid: Grid1D,
    state: State1D,
    accel: np.ndarray,
    jerk: Optional[np.ndarray] = None,
    model: str = "euler_damped",
) -> EnergyReport:
    """
    Discrete E^{m,i}, D^{m,i} and their cut-off localizations for m + i ≤ 2.

    E^{m,i} = ‖σ^{(ι+i)/2}∂ₜ^{m+1}∂_y^iω‖² + ‖σ^{(ι+i)/2}∂ₜ^m∂_y^iω‖² + ‖σ^{(ι+i+1)/2}∂ₜ^m∂_y^{i+1}ω‖²
    and D^{m,i} keeps the first and last of these. Norms use trapezoid quadrature.

    Args:
        params: Gas parameters
        grid: Grid of the state
        state: State (ω, ∂ₜω)
        accel: ∂ₜ²ω from the equation of motion
        jerk: ∂ₜ³ω; derived from the time-differentiated equation when omitted
        model: Equation the state evolves under (for the derived ∂ₜ³ω)

    Returns:
        Energy report at ``state.time``
    """
    if state.omega.shape != (grid.size,) or np.shape(accel) != (grid.size,):
        raise GridMismatchError("state does not live on this grid", expected=grid.size)
    if jerk is None:
        operator = LagrangianOperator(params, grid)
        if model == "darcy":
            jerk = operator.force_accel(state.omega, state.vel, accel)
        else:
            jerk = operator.force_rate(state.omega, state.vel) - accel

    rates = (state.omega, state.vel, np.asarray(accel, dtype=float), np.asarray(jerk, dtype=float))
    cutoffs = make_cutoffs(grid)
    zeta1_sq = cutoffs.zeta1 ** 2
    zeta2_sq = cutoffs.zeta2 ** 2
    space = {}

    def spatial(m: int, i: int) -> np.ndarray:
        if (m, i) not in space:
            space[(m, i)] = derivative(grid, rates[m], i)
        return space[(m, i)]

    e_parts: Dict[Tuple[int, int], Tuple[float, float, float]] = {}
    e_table: Dict[Tuple[int, int], float] = {}
    d_table: Dict[Tuple[int, int], float] = {}
    d1_table: Dict[Tuple[int, int], float] = {}
    d2_table: Dict[Tuple[int, int], float] = {}
    for m, i in NORM_INDICES:
        weight = sigma_power(grid, params.iota + i)
        weight_up = sigma_power(grid, params.iota + i + 1)
        rate_sq = spatial(m + 1, i) ** 2
        value_sq = spatial(m, i) ** 2
        slope_sq = spatial(m, i + 1) ** 2

        parts = (
            integrate(grid, weight * rate_sq),
            integrate(grid, weight * value_sq),
            integrate(grid, weight_up * slope_sq),
        )
        e_parts[(m, i)] = parts
        e_table[(m, i)] = parts[0] + parts[1] + parts[2]
        d_table[(m, i)] = parts[0] + parts[2]
        d1_table[(m, i)] = integrate(grid, zeta1_sq * rate_sq) + integrate(grid, zeta1_sq * slope_sq)
        d2_table[(m, i)] = (
            integrate(grid, zeta2_sq * weight * rate_sq) + integrate(grid, zeta2_sq * weight_up * slope_sq)
        )

    return EnergyReport(
        time=state.time,
        e_parts=e_parts,
        e_table=e_table,
        d_table=d_table,
        d1_table=d1_table,
        d2_table=d2_table,
        e_total=sum(e_table.values()),
        d_total=sum(d_table.values()),
    )


def fit_decay(
    times: Sequence[float],
    energies: Sequence[float],
    window: Optional[Tuple[float, float]] = None,
) -> DecayFit:
    """
    Least-squares fit of log E(t) = log C − δt over a window.

    Args:
        times: Sample times
        energies: E_total at the sample times
        window: (t_lo, t_hi), inclusive; all samples when omitted

    Returns:
        Fitted δ, C and R² (R² = 0 by convention for a flat series)
    """
    t = np.asarray(times, dtype=float)
    e = np.asarray(energies, dtype=float)
    if t.shape != e.shape or t.ndim != 1:
        raise DomainError("times and energies must be 1-D sequences of equal length")
    if window is None:
        window = (float(t.min()), float(t.max()))
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise DomainError("fit window must satisfy t_lo < t_hi", window=[lo, hi])

    inside = (t >= lo) & (t <= hi)
    t, e = t[inside], e[inside]
    if t.size < MIN_FIT_SAMPLES:
        raise DomainError(
            f"need at least {MIN_FIT_SAMPLES} samples in the fit window, got {t.size}",
            window=[lo, hi],
        )
    if np.any(e <= 0.0) or not np.all(np.isfinite(e)):
        raise DomainError("energies in the fit window must be positive and finite", window=[lo, hi])

    log_e = np.log(e)
    if np.ptp(log_e) == 0.0:
        return DecayFit(delta=0.0, amplitude=float(e[0]), r_squared=0.0, window=(lo, hi), n_samples=int(t.size))

    fit = stats.linregress(t, log_e)
    r_squared = min(1.0, max(0.0, float(fit.rvalue) ** 2))
    logger.debug("Decay fit on [%g, %g]: delta=%.6g, R2=%.6f", lo, hi, -fit.slope, r_squared)
    return DecayFit(
        delta=-float(fit.slope),
        amplitude=math.exp(float(fit.intercept)),
        r_squared=r_squared,
        window=(lo, hi),
        n_samples=int(t.size),
    )


def envelope_ratio_max(times: Sequence[float], energies: Sequence[float], decay_fit: DecayFit) -> float:
    """
    max E(t) / (C·e^{−δt}) over the fit window of ``decay_fit``.

    Values near 1 mean the fitted envelope bounds the series from above.
    """
    t = np.asarray(times, dtype=float)
    e = np.asarray(energies, dtype=float)
    lo, hi = decay_fit.window
    inside = (t >= lo) & (t <= hi)
    if not np.any(inside):
        raise DomainError("no samples inside the fit window", window=[lo, hi])
    envelope = decay_fit.amplitude * np.exp(-decay_fit.delta * t[inside])
    return float(np.max(e[inside] / envelope))


def pointwise_bound_report(
    params: GasParams,
    grid: Grid1D,
    state: State1D,
    decay_fit: DecayFit,
    e0: float,
    accel: Optional[np.ndarray] = None,
    jerk: Optional[np.ndarray] = None,
    model: str = "euler_damped",
    scheme: str = "flux",
) -> PointwiseRatios:
    """
    Pointwise quantities of the vacuum problem against sqrt(e^{−δt}·E(0)).

    The density ratio uses ρ − ρ̄ = −ρ̄∂_yω/(1+∂_yω), so that
    |ρ − ρ̄|/(ℏ−y)^ι = ν^ι|∂_yω/(1+∂_yω)| stays finite at the vacuum node.

    Args:
        params: Gas parameters
        grid: Grid of the state
        state: State at time t
        decay_fit: Fitted rate δ
        e0: E_total(0) > 0
        accel, jerk: ∂ₜ²ω and ∂ₜ³ω (derived when omitted)
        model: Equation the state evolves under
        scheme: Force discretization for the derived time derivatives

    Returns:
        Ratios, including |dᵐΓ/dtᵐ| for m = 1, 2, 3
    """
    if e0 <= 0.0:
        raise DomainError("E(0) must be positive", e0=e0)
    field = reconstruct_eulerian(params, grid, state)
    if accel is None or jerk is None:
        operator = LagrangianOperator(params, grid, scheme)
        accel, jerk = time_derivatives(operator, state.omega, state.vel, model=model)

    scale = math.sqrt(math.exp(-decay_fit.delta * state.time) * e0)
    strain = derivative(grid, state.omega, 1)
    density = params.nu ** params.iota * float(np.max(np.abs(strain / (1.0 + strain))))
    rates = (abs(float(state.vel[-1])), abs(float(accel[-1])), abs(float(jerk[-1])))
    return PointwiseRatios(
        time=state.time,
        scale=scale,
        density=density / scale,
        velocity=float(np.max(np.abs(field.velocity))) / scale,
        boundary=abs(float(state.omega[-1])) / scale,
        boundary_rates=tuple(r / scale for r in rates),
    )


def pointwise_summary(result: RunResult, decay_fit: DecayFit, window: Tuple[float, float]) -> PointwiseSummary:
    """
    Pointwise ratios over the records inside ``window`` and at the last record.

    Args:
        result: Recorded run
        decay_fit: Fitted decay
        window: (t_lo, t_hi)

    Returns:
        Max, min and median density ratio, max boundary ratio, final ratios
    """
    config = result.config
    e0 = result.reports[0].e_total
    ratios = [
        pointwise_bound_report(
            config.params, config.grid, state, decay_fit, e0, model=config.model, scheme=config.scheme,
        )
        for state in result.snapshots
        if window[0] <= state.time <= window[1]
    ]
    if not ratios:
        raise DomainError("no records inside the pointwise window", window=list(window))
    final = pointwise_bound_report(
        config.params, config.grid, result.final, decay_fit, e0, model=config.model, scheme=config.scheme,
    )
    density = np.array([r.density for r in ratios])
    return PointwiseSummary(
        final=final,
        density_max=float(density.max()),
        density_min=float(density.min()),
        density_median=float(np.median(density)),
        boundary_max=max(r.boundary for r in ratios),
    )


def linf_embedding_report(params: GasParams, grid: Grid1D, state: State1D, accel: np.ndarray) -> float:
    """
    Σ_{m+i≤2} ‖σ^{max(0, (m+2i−3)/2)}∂ₜ^m∂_y^iω‖²_∞ / E(t).

    Sampled evidence that the energy controls these sup norms; no constant is certified.
    """
    report = energy_report(params, grid, state, accel)
    if report.e_total == 0.0:
        raise ZeroDenominatorError("energy vanishes", time=state.time)
    rates = (state.omega, state.vel, np.asarray(accel, dtype=float))
    total = 0.0
    for m, i in NORM_INDICES:
        weight = sigma_power(grid, max(0.0, (m + 2 * i - 3) / 2.0))
        total += float(np.max(np.abs(weight * derivative(grid, rates[m], i)))) ** 2
    return total / report.e_total
