"""
Spatial discretizations of the pressure-gravity force.

The term F(ω) = −σ^{−ι}∂_y(σ^{ι+1}Φ(∂_yω)), Φ(s) = (1+s)^{−γ} − 1, comes in two schemes.

``flux`` (conservative, used by the time integrator by default) works per dual cell:

    m_j F_j = −(Flux_{j+1/2} − Flux_{j−1/2}),   Flux_{j+1/2} = σ_{j+1/2}^{ι+1} Φ(s_{j+1/2}),

with s_{j+1/2} = (ω_{j+1} − ω_j)/Δ_{j+1/2}, m_j the exact integral of σ^ι over the
dual cell and no flux through the vacuum boundary. At the top node this equals
ν(ι+1)Φ_{N−1/2}, the regular value of the product-rule form at σ = 0.

``product_rule`` evaluates the expanded form at the nodes:

    F_j = −σ_j (Φ_{j+1/2} − Φ_{j−1/2}) / Δ̄_j + ν(ι+1) Φ(s_j),

where s_j is the second-order nodal derivative of ω and Δ̄_j the dual-cell width.
The σ-term vanishes at the vacuum node, so F_N = ν(ι+1)Φ(s_N).
"""
import math
from typing import Callable, Tuple, get_args

import numpy as np

from vacuumflow.core.errors import DomainError, GridMismatchError, ParticleCrossingError
from vacuumflow.physics.weighted_calc import derivative, dual_cell_weights
from vacuumflow.schemas.grid import Grid1D
from vacuumflow.schemas.params import GasParams
from vacuumflow.schemas.state import SchemeName

SCHEMES = get_args(SchemeName)

# Floor added to the largest sound speed
SOUND_SPEED_FLOOR = 1e-12


class LagrangianOperator:
    """
    Precomputed weights of one force discretization on one grid.

    Attributes:
        gamma, iota, nu: Gas constants
        scheme: ``flux`` or ``product_rule``
        widths: Cell widths Δ_{j+1/2}
        flux_weight: σ_{j+1/2}^{ι+1} at cell midpoints
        sigma_mid: σ_{j+1/2}
        sigma: σ_j at the nodes
        masses: Lumped masses m_j = ∫ σ^ι over dual cells
    """

    def __init__(self, params: GasParams, grid: Grid1D, scheme: SchemeName = "flux") -> None:
        if scheme not in SCHEMES:
            raise DomainError(f"unknown scheme {scheme!r}", key="scheme")
        self.scheme = scheme
        self.grid = grid
        self.gamma = params.gamma
        self.iota = params.iota
        self.nu = params.nu
        self.size = grid.size
        self.widths = grid.widths
        self.dual_widths = 0.5 * (grid.widths[:-1] + grid.widths[1:])
        self.sigma = np.asarray(grid.sigma, dtype=float)
        self.sigma_mid = params.nu * (params.hbar - grid.midpoints)
        self.flux_weight = np.power(self.sigma_mid, params.iota + 1.0)
        self.masses = dual_cell_weights(grid, params.iota)
        self.lower_order_weight = params.nu * (params.iota + 1.0)
        self.min_width = float(self.widths.min())
        self.sigma_max = float(self.sigma.max())

    def strain(self, omega: np.ndarray) -> np.ndarray:
        """Half-node strains s_{j+1/2}; raises if any 1 + s ≤ 0."""
        if omega.shape != (self.size,):
            raise GridMismatchError("field does not live on this grid", expected=self.size)
        return _checked(np.diff(omega) / self.widths)

    def nodal_strain(self, omega: np.ndarray) -> np.ndarray:
        """Nodal strains s_j = ∂_yω (second order, one-sided at the ends)."""
        if omega.shape != (self.size,):
            raise GridMismatchError("field does not live on this grid", expected=self.size)
        return _checked(derivative(self.grid, omega, 1))

    def pressure_defect(self, s: np.ndarray) -> np.ndarray:
        """Φ(s) = (1+s)^{−γ} − 1, accurate for small s."""
        return np.expm1(-self.gamma * np.log1p(s))

    def defect_slope(self, s: np.ndarray) -> np.ndarray:
        """Φ′(s) = −γ(1+s)^{−γ−1}."""
        return -self.gamma * np.power(1.0 + s, -self.gamma - 1.0)

    def defect_curvature(self, s: np.ndarray) -> np.ndarray:
        """Φ″(s) = γ(γ+1)(1+s)^{−γ−2}."""
        return self.gamma * (self.gamma + 1.0) * np.power(1.0 + s, -self.gamma - 2.0)

    def divergence(self, flux: np.ndarray) -> np.ndarray:
        """−(Flux_{j+1/2} − Flux_{j−1/2}) / m_j with the bottom node held fixed."""
        out = np.zeros(self.size)
        out[1:-1] = -(flux[1:] - flux[:-1]) / self.masses[1:-1]
        out[-1] = flux[-1] / self.masses[-1]
        return out

    def product_rule(self, half: np.ndarray, nodal: np.ndarray) -> np.ndarray:
        """−σ_j ∂_yQ + ν(ι+1)Q_j from half-node and nodal values of Q; zero at the bottom."""
        out = np.zeros(self.size)
        out[1:-1] = (
            -self.sigma[1:-1] * (half[1:] - half[:-1]) / self.dual_widths
            + self.lower_order_weight * nodal[1:-1]
        )
        out[-1] = self.lower_order_weight * nodal[-1]
        return out

    def _assemble(self, defect: Callable[..., np.ndarray], omega: np.ndarray, *rates: np.ndarray) -> np.ndarray:
        half = defect(self.strain(omega), *(np.diff(r) / self.widths for r in rates))
        if self.scheme == "flux":
            return self.divergence(self.flux_weight * half)
        nodal = defect(self.nodal_strain(omega), *(derivative(self.grid, r, 1) for r in rates))
        return self.product_rule(half, nodal)

    def force(self, omega: np.ndarray) -> np.ndarray:
        """Pressure-gravity acceleration F(ω)."""
        return self._assemble(self.pressure_defect, omega)

    def linear_force(self, omega: np.ndarray) -> np.ndarray:
        """F with Φ replaced by its linearization −γs."""
        return self._assemble(lambda s: -self.gamma * s, omega)

    def force_rate(self, omega: np.ndarray, vel: np.ndarray) -> np.ndarray:
        """d/dt F(ω) along ∂ₜω = vel: Φ′(s)·s_t."""
        return self._assemble(lambda s, s_t: self.defect_slope(s) * s_t, omega, vel)

    def force_accel(self, omega: np.ndarray, vel: np.ndarray, accel: np.ndarray) -> np.ndarray:
        """d²/dt² F(ω) along the motion: Φ″(s)s_t² + Φ′(s)s_tt."""
        return self._assemble(
            lambda s, s_t, s_tt: self.defect_curvature(s) * s_t * s_t + self.defect_slope(s) * s_tt,
            omega, vel, accel,
        )

    def _speed_inputs(self, omega: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        if self.scheme == "flux":
            return self.sigma_mid, self.strain(omega)
        return self.sigma, self.nodal_strain(omega)

    def max_sound_speed(self, omega: np.ndarray) -> float:
        """max sqrt(γσ(1+s)^{−γ−1}) over the cells (nodes for ``product_rule``), plus a floor."""
        sigma, s = self._speed_inputs(omega)
        speed2 = self.gamma * sigma * np.power(1.0 + s, -self.gamma - 1.0)
        return float(np.sqrt(speed2.max())) + SOUND_SPEED_FLOOR

    def sound_speed_bound(self, omega: np.ndarray) -> float:
        """sqrt(γσ_max(1 + min s)^{−γ−1}) + floor, never below ``max_sound_speed``."""
        _, s = self._speed_inputs(omega)
        return math.sqrt(self.gamma * self.sigma_max * (1.0 + float(s.min())) ** (-self.gamma - 1.0)) + SOUND_SPEED_FLOOR

    def hyperbolic_limit(self, omega: np.ndarray, safety: float) -> float:
        """safety · min Δy / c_max."""
        return safety * self.min_width / self.max_sound_speed(omega)

    def parabolic_limit(self, safety: float) -> float:
        """safety · min Δy² / (2γσ_max)."""
        return safety * self.min_width ** 2 / (2.0 * self.gamma * self.sigma_max)

    def stored_energy(self, omega: np.ndarray) -> float:
        """Σ Δ σ^{ι+1} W(s), W(s) = ι((1+s)^{1−γ} − 1 − (1−γ)s) ≥ 0, on half-node strains."""
        s = self.strain(omega)
        w = self.iota * (np.expm1((1.0 - self.gamma) * np.log1p(s)) - (1.0 - self.gamma) * s)
        return float(np.sum(self.widths * self.flux_weight * w))

    def kinetic_energy(self, vel: np.ndarray) -> float:
        """½ Σ m_j v_j²."""
        return 0.5 * float(np.sum(self.masses * vel * vel))

    def dissipation(self, vel: np.ndarray) -> float:
        """Σ m_j v_j², the rate at which damping removes energy."""
        return float(np.sum(self.masses * vel * vel))


def _checked(s: np.ndarray) -> np.ndarray:
    if np.any(s <= -1.0):
        raise ParticleCrossingError(
            "flow map is not invertible (1 + ∂_yω <= 0)",
            cell=int(np.argmin(s)),
        )
    return s


def time_derivatives(
    operator: LagrangianOperator,
    omega: np.ndarray,
    vel: np.ndarray,
    model: str = "euler_damped",
    damping: bool = True,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    ∂ₜ²ω and ∂ₜ³ω from the equation of motion, never from stored time series.

    Euler: ∂ₜ²ω = −v + F(ω), ∂ₜ³ω = −∂ₜ²ω + Ḟ.
    Darcy: ∂ₜω = F(ω), so ∂ₜ²ω = Ḟ and ∂ₜ³ω = F̈.

    Args:
        operator: Force discretization of the grid
        omega: ω
        vel: ∂ₜω
        model: ``euler_damped`` or ``darcy``
        damping: Keep the −v term (Euler only)

    Returns:
        (∂ₜ²ω, ∂ₜ³ω)
    """
    if model == "darcy":
        accel = operator.force_rate(omega, vel)
        jerk = operator.force_accel(omega, vel, accel)
        return accel, jerk
    friction = 1.0 if damping else 0.0
    accel = operator.force(omega) - friction * vel
    jerk = operator.force_rate(omega, vel) - friction * accel
    return accel, jerk
