"""
Pydantic schemas for weighted energy tables, decay fits and pointwise ratios.
"""
import math
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

Index = Tuple[int, int]

# Norm indices (m, i) with m + i <= ORDER_CAP, in CSV column order
ORDER_CAP = 2
NORM_INDICES: List[Index] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


def column_name(prefix: str, index: Index) -> str:
    """``("E", (1, 0)) -> "E_10"``."""
    return f"{prefix}_{index[0]}{index[1]}"


class EnergyReport(BaseModel):
    """
    Discrete E^{m,i}, D^{m,i} and cut-off localized dissipations at one instant.

    Attributes:
        time: Time t
        e_parts: The three squared norms forming each E^{m,i}
        e_table: E^{m,i} = sum of its three parts
        d_table: D^{m,i}
        d1_table: D^{m,i} localized to the bottom with ζ₁ (unweighted)
        d2_table: D^{m,i} localized to the top with ζ₂
        e_total: Σ E^{m,i}
        d_total: Σ D^{m,i}
    """
    model_config = ConfigDict(frozen=True)

    time: float
    e_parts: Dict[Index, Tuple[float, float, float]]
    e_table: Dict[Index, float]
    d_table: Dict[Index, float]
    d1_table: Dict[Index, float]
    d2_table: Dict[Index, float]
    e_total: float
    d_total: float

    @model_validator(mode="after")
    def check_sums(self) -> "EnergyReport":
        tables = (self.e_table, self.d_table, self.d1_table, self.d2_table)
        if any(value < 0 for table in tables for value in table.values()):
            raise ValueError("energy entries must be non-negative")
        for index, parts in self.e_parts.items():
            if self.e_table[index] != parts[0] + parts[1] + parts[2]:
                raise ValueError(f"E^{index} is not the sum of its parts")
        if self.e_total != sum(self.e_table.values()):
            raise ValueError("e_total must equal the sum of e_table")
        return self

    def flat(self) -> Dict[str, float]:
        """Row for ``series.csv``: E_total, E_mi…, D_total."""
        row = {"E_total": self.e_total}
        for index in self.e_table:
            row[column_name("E", index)] = self.e_table[index]
        row["D_total"] = self.d_total
        return row


class DecayFit(BaseModel):
    """
    Least-squares fit of log E(t) ≈ log C − δt over a time window.

    Attributes:
        delta: Fitted rate δ
        amplitude: Fitted constant C
        r_squared: Coefficient of determination of the linear fit (0 for a flat series)
        window: Time window (t_lo, t_hi)
        n_samples: Samples used
    """
    model_config = ConfigDict(frozen=True)

    delta: float
    amplitude: float
    r_squared: float = Field(..., ge=0, le=1)
    window: Tuple[float, float]
    n_samples: int = Field(..., ge=2)

    @model_validator(mode="after")
    def check_window(self) -> "DecayFit":
        if not self.window[0] < self.window[1]:
            raise ValueError("fit window must satisfy t_lo < t_hi")
        return self

    def envelope(self, t: float) -> float:
        """C·e^{−δt}."""
        return self.amplitude * math.exp(-self.delta * t)


class PointwiseRatios(BaseModel):
    """
    Pointwise convergence quantities divided by sqrt(e^{−δt}·E(0)).

    Attributes:
        time: Time t
        scale: The normaliser sqrt(e^{−δt}·E(0))
        density: sup_y |ρ − ρ̄| / (ℏ−y)^ι / scale
        velocity: sup_y |u| / scale
        boundary: |Γ − ℏ| / scale
        boundary_rates: |dᵐΓ/dtᵐ| / scale for m = 1, 2, 3 (when available)
    """
    model_config = ConfigDict(frozen=True)

    time: float
    scale: float
    density: float
    velocity: float
    boundary: float
    boundary_rates: Optional[Tuple[float, float, float]] = None
