"""
Physical parameters, the stationary solution and Eulerian reconstruction.
"""
import logging
import math
from typing import Union

import numpy as np
from scipy import integrate as sp_integrate

from vacuumflow.core.errors import DomainError, GridMismatchError, ParticleCrossingError
from vacuumflow.physics.weighted_calc import derivative
from vacuumflow.schemas.grid import Grid1D
from vacuumflow.schemas.params import (
    GAMMA_MAX,
    GAMMA_MIN,
    GasParams,
    density_exponent,
    domain_height,
    slope_constant,
)
from vacuumflow.schemas.state import EulerianField, State1D

logger = logging.getLogger(__name__)

MASS_RTOL = 1e-10

ArrayLike = Union[float, np.ndarray]


def derive_constants(gamma: float, g: float, total_mass: float) -> GasParams:
    """
    Compute ν, ℏ and ι from (γ, g, M) and check the mass of the stationary profile.

    Args:
        gamma: Adiabatic exponent, 1 < γ ≤ 10 (supported: γ > 1.001)
        g: Gravitational acceleration
        total_mass: Total mass M

    Returns:
        Validated gas parameters
    """
    values = {"gamma": gamma, "g": g, "total_mass": total_mass}
    for name, value in values.items():
        if not math.isfinite(value):
            raise DomainError(f"{name} must be finite", key=name)
    if gamma <= 1.0:
        raise DomainError("gamma must exceed 1", key="gamma")
    if gamma <= GAMMA_MIN:
        raise DomainError(f"gamma must exceed {GAMMA_MIN} (supported range)", key="gamma")
    if gamma > GAMMA_MAX:
        raise DomainError(f"gamma must not exceed {GAMMA_MAX:g}", key="gamma")
    if g <= 0:
        raise DomainError("g must be positive", key="g")
    if total_mass <= 0:
        raise DomainError("total_mass must be positive", key="total_mass")

    params = GasParams(
        gamma=gamma,
        g=g,
        total_mass=total_mass,
        nu=slope_constant(gamma, g),
        hbar=domain_height(gamma, g, total_mass),
        iota=density_exponent(gamma),
    )
    mass = stationary_mass(params)
    if abs(mass - total_mass) > MASS_RTOL * total_mass:
        raise DomainError(
            "stationary profile does not integrate to the total mass",
            mass=mass,
            total_mass=total_mass,
        )
    return params


def stationary_mass(params: GasParams) -> float:
    """
    ∫₀^ℏ (ν(ℏ−y))^ι dy by adaptive quadrature.

    The integrand is evaluated as (νℏ)^ι·(1−u)^ι with y = ℏu.
    """
    scale = params.hbar * (params.nu * params.hbar) ** params.iota
    value, _ = sp_integrate.quad(
        lambda u: (1.0 - u) ** params.iota,
        0.0,
        1.0,
        epsabs=0.0,
        epsrel=1e-12,
        limit=200,
    )
    return scale * value


def stationary_profile(params: GasParams, y: ArrayLike) -> ArrayLike:
    """
    ρ̄(y) = (ν(ℏ−y))^{1/(γ−1)}.

    Args:
        params: Gas parameters
        y: Height(s) in [0, ℏ]

    Returns:
        Density with the shape of ``y``
    """
    heights = np.asarray(y, dtype=float)
    if np.any(heights < 0.0) or np.any(heights > params.hbar):
        raise DomainError("y must lie in [0, hbar]", hbar=params.hbar)
    density = np.power(params.nu * (params.hbar - heights), params.iota)
    if density.ndim == 0:
        return float(density)
    return density


def physical_vacuum_slope(params: GasParams) -> float:
    """
    Normal derivative of c² = γρ̄^{γ−1} = γν(ℏ−x) at the vacuum boundary.

    Finite and strictly negative for every admissible gas.
    """
    return -params.gamma * params.nu


def lagrangian_density(params: GasParams, grid: Grid1D, state: State1D) -> np.ndarray:
    """
    ρ(t, x(t, y)) = ρ̄(y) / (1 + ∂_yω) at the nodes.

    Args:
        params: Gas parameters
        grid: Grid of the state
        state: Lagrangian state

    Returns:
        Nodal density
    """
    if state.omega.shape != (grid.size,):
        raise GridMismatchError("state does not live on this grid", expected=grid.size)
    stretch = 1.0 + derivative(grid, state.omega, 1)
    if np.any(stretch <= 0.0):
        node = int(np.argmin(stretch))
        raise ParticleCrossingError(
            "flow map is not invertible (1 + ∂_yω <= 0)",
            time=state.time,
            node=node,
        )
    return stationary_profile(params, grid.nodes) / stretch


def reconstruct_eulerian(params: GasParams, grid: Grid1D, state: State1D) -> EulerianField:
    """
    Eulerian density, velocity and boundary at the particle positions.

    Args:
        params: Gas parameters
        grid: Grid of the state
        state: Lagrangian state

    Returns:
        Eulerian field sampled at x_j = y_j + ω_j
    """
    density = lagrangian_density(params, grid, state)
    positions = grid.nodes + state.omega
    if not np.all(np.diff(positions) > 0.0):
        raise ParticleCrossingError("particle positions are not increasing", time=state.time)
    return EulerianField(
        positions=positions,
        density=density,
        velocity=np.array(state.vel, dtype=float),
        boundary=float(positions[-1]),
    )


def mass_relative_error(params: GasParams, field: EulerianField) -> float:
    """|∫ρ dx − M| / M."""
    return abs(field.mass - params.total_mass) / params.total_mass
