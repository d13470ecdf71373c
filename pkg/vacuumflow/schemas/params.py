"""
Pydantic schema for the gas parameters and the derived equilibrium constants.
"""
import math

from pydantic import BaseModel, ConfigDict, Field, model_validator

# Supported adiabatic exponents: (GAMMA_MIN, GAMMA_MAX]
GAMMA_MIN = 1.0 + 1e-3
GAMMA_MAX = 10.0


def slope_constant(gamma: float, g: float) -> float:
    """ν = g·γ⁻¹·(γ−1)."""
    return g / gamma * (gamma - 1.0)


def domain_height(gamma: float, g: float, total_mass: float) -> float:
    """ℏ = γ·(γ−1)⁻¹·g⁻¹·(M·g)^((γ−1)/γ)."""
    return gamma / (gamma - 1.0) / g * (total_mass * g) ** ((gamma - 1.0) / gamma)


def density_exponent(gamma: float) -> float:
    """ι = 1/(γ−1)."""
    return 1.0 / (gamma - 1.0)


class GasParams(BaseModel):
    """
    Polytropic gas under gravity and its stationary-state constants.

    Attributes:
        gamma: Adiabatic exponent
        g: Gravitational acceleration
        total_mass: Total mass M
        nu: Slope constant of the weight σ
        hbar: Height of the stationary domain
        iota: Exponent 1/(γ−1)
    """
    model_config = ConfigDict(frozen=True)

    gamma: float = Field(..., gt=GAMMA_MIN, le=GAMMA_MAX)
    g: float = Field(..., gt=0)
    total_mass: float = Field(..., gt=0)
    nu: float = Field(..., gt=0)
    hbar: float = Field(..., gt=0)
    iota: float = Field(..., gt=0)

    @model_validator(mode="after")
    def check_closed_forms(self) -> "GasParams":
        """Derived constants must be exactly the closed forms of (γ, g, M)."""
        gamma, g, mass = self.gamma, self.g, self.total_mass
        if not all(math.isfinite(v) for v in (gamma, g, mass)):
            raise ValueError("gas parameters must be finite")
        if self.nu != slope_constant(gamma, g):
            raise ValueError("nu does not match g·(γ−1)/γ")
        if self.hbar != domain_height(gamma, g, mass):
            raise ValueError("hbar does not match γ(γ−1)⁻¹g⁻¹(Mg)^((γ−1)/γ)")
        if self.iota != density_exponent(gamma):
            raise ValueError("iota does not match 1/(γ−1)")
        return self
