"""
Pydantic schemas for Lagrangian states, initial data and run configuration.
"""
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.integrate import trapezoid

from vacuumflow.schemas.grid import Grid1D
from vacuumflow.schemas.params import GasParams

ModelName = Literal["euler_damped", "darcy"]
InitialFamily = Literal["sine_mode", "polynomial_bump", "custom_table"]
SchemeName = Literal["flux", "product_rule"]


class State1D(BaseModel):
    """
    Lagrangian perturbation ω = x − y and velocity v = ∂ₜω at one instant.

    The bottom particle is fixed: omega[0] and vel[0] are exactly zero.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    time: float = 0.0
    omega: np.ndarray
    vel: np.ndarray

    @model_validator(mode="after")
    def check_bottom(self) -> "State1D":
        if self.omega.shape != self.vel.shape or self.omega.ndim != 1:
            raise ValueError("omega and vel must be 1-D arrays of equal length")
        if self.omega[0] != 0.0 or self.vel[0] != 0.0:
            raise ValueError("bottom particle must stay fixed: omega[0] = vel[0] = 0")
        return self

    @classmethod
    def zero(cls, grid: Grid1D, time: float = 0.0) -> "State1D":
        """The stationary solution in perturbation variables."""
        return cls(time=time, omega=np.zeros(grid.size), vel=np.zeros(grid.size))


class EulerianField(BaseModel):
    """
    Eulerian picture of a Lagrangian state, sampled at the particles.

    Attributes:
        positions: Particle positions x(t, y_j)
        density: ρ(t, x(t, y_j))
        velocity: u(t, x(t, y_j))
        boundary: Vacuum boundary Γ(t) = x(t, ℏ)
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    positions: np.ndarray
    density: np.ndarray
    velocity: np.ndarray
    boundary: float

    @model_validator(mode="after")
    def check_physical(self) -> "EulerianField":
        if np.any(self.density < 0) or self.density[-1] != 0.0:
            raise ValueError("density must be non-negative and vanish at the vacuum boundary")
        if not np.all(np.diff(self.positions) > 0):
            raise ValueError("particle positions must be strictly increasing")
        return self

    @property
    def mass(self) -> float:
        """Trapezoid mass ∫ρ dx over the particle positions."""
        return float(trapezoid(self.density, self.positions))


class InitialData(BaseModel):
    """
    Perturbation of the stationary state at t = 0.

    Attributes:
        family: Shape family of ω₀ and v₀
        amplitude: ε, amplitude of ω₀
        mode: k ≥ 1, mode number of ``sine_mode``
        vel_amplitude: ε_v, amplitude of v₀
        table_y, table_omega, table_vel: Samples for ``custom_table``
    """
    model_config = ConfigDict(frozen=True)

    family: InitialFamily = "sine_mode"
    amplitude: float = 1e-3
    mode: int = Field(1, ge=1)
    vel_amplitude: float = 0.0
    table_y: Optional[List[float]] = None
    table_omega: Optional[List[float]] = None
    table_vel: Optional[List[float]] = None

    @model_validator(mode="after")
    def check_table(self) -> "InitialData":
        if self.family != "custom_table":
            return self
        if self.table_y is None or self.table_omega is None:
            raise ValueError("custom_table needs table_y and table_omega")
        size = len(self.table_y)
        vel = self.table_vel if self.table_vel is not None else [0.0] * size
        if size < 2 or len(self.table_omega) != size or len(vel) != size:
            raise ValueError("custom_table columns must have equal length >= 2")
        if any(b <= a for a, b in zip(self.table_y, self.table_y[1:])):
            raise ValueError("custom_table y column must be strictly increasing")
        return self


class RunConfig(BaseModel):
    """
    Everything one simulation needs.

    ``dt = None`` means: derive the step from the stability restriction of the
    initial state.  ``output_every = None`` means: about 200 records per run.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    params: GasParams
    grid: Grid1D
    dt: Optional[float] = Field(None, gt=0)
    t_final: float = Field(40.0, gt=0)
    model: ModelName = "euler_damped"
    init: InitialData = InitialData()
    cfl_safety: float = Field(0.5, gt=0, le=1)
    output_every: Optional[int] = Field(None, ge=1)
    scheme: SchemeName = "flux"

    @field_validator("t_final")
    @classmethod
    def finite_horizon(cls, v: float) -> float:
        if not np.isfinite(v):
            raise ValueError("t_final must be finite")
        return v

    @model_validator(mode="after")
    def check_grid_matches(self) -> "RunConfig":
        if self.grid.hbar != self.params.hbar or self.grid.nu != self.params.nu:
            raise ValueError("grid was built for different gas parameters")
        return self
