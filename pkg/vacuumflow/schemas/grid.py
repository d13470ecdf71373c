"""
Pydantic schemas for the one-dimensional Lagrangian grid and cut-off functions.
"""
from typing import List, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

Spacing = Literal["uniform", "top-refined"]


def readonly(values: np.ndarray) -> np.ndarray:
    """Return a float copy of ``values`` that cannot be written to."""
    out = np.array(values, dtype=float)
    out.flags.writeable = False
    return out


class Grid1D(BaseModel):
    """
    Nodes on [0, ℏ] with the degenerate weight σ(y) = ν(ℏ−y).

    Attributes:
        n_cells: Number of cells N (nodes y_0 … y_N)
        spacing: Node distribution
        hbar: Domain height ℏ
        nu: Slope of the weight
        nodes: Node coordinates
        sigma: σ at the nodes
        quad_weights: Trapezoid quadrature weights
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n_cells: int = Field(..., ge=1)
    spacing: Spacing = "uniform"
    hbar: float = Field(..., gt=0)
    nu: float = Field(..., gt=0)
    nodes: np.ndarray
    sigma: np.ndarray
    quad_weights: np.ndarray

    @model_validator(mode="after")
    def check_layout(self) -> "Grid1D":
        """Nodes increase strictly between exact endpoints; σ vanishes at the top."""
        nodes = self.nodes
        if nodes.shape != (self.n_cells + 1,):
            raise ValueError("nodes must have n_cells + 1 entries")
        if nodes[0] != 0.0 or nodes[-1] != self.hbar:
            raise ValueError("grid endpoints must be exactly 0 and hbar")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("nodes must be strictly increasing")
        if self.sigma.shape != nodes.shape or self.sigma[-1] != 0.0:
            raise ValueError("sigma must match the nodes and vanish at the top")
        if self.quad_weights.shape != nodes.shape or not np.all(self.quad_weights > 0):
            raise ValueError("quadrature weights must be positive, one per node")
        return self

    @property
    def size(self) -> int:
        return self.n_cells + 1

    @property
    def widths(self) -> np.ndarray:
        """Cell widths Δ_{j+1/2} = y_{j+1} − y_j."""
        return np.diff(self.nodes)

    @property
    def midpoints(self) -> np.ndarray:
        """Cell midpoints y_{j+1/2}."""
        return 0.5 * (self.nodes[1:] + self.nodes[:-1])


class CutoffPair(BaseModel):
    """Nodal values of the bottom (ζ₁) and top (ζ₂) cut-off functions."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    zeta1: np.ndarray
    zeta2: np.ndarray


class HardyFit(BaseModel):
    """
    Sampled Hardy ratios for the family f_p(y) = (ℏ−y)^p at one weight power k.

    Attributes:
        k: Weight power
        exponents: Sampled p values
        ratios: Discrete ratios, one per exponent
        oracle_ratios: Closed-form ratios, one per exponent
        constant: Fitted constant (max over the sample)
        spread: Largest relative deviation of a discrete ratio from its oracle
    """
    model_config = ConfigDict(frozen=True)

    k: float
    exponents: List[float]
    ratios: List[float]
    oracle_ratios: List[float]
    constant: float = Field(..., gt=0)
    spread: float = Field(..., ge=0)
