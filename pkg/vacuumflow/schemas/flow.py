"""
Pydantic schemas for multi-dimensional flow-map samples.
"""
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

# Invertibility margin of the sampled displacement gradient
GRADIENT_MARGIN = 0.4


class TrigField(BaseModel):
    """
    Vector field Σ_q a_{rq} sin(κ_q·y + φ_q) with closed-form gradient.

    The first n−1 components of every wavevector κ_q are integer multiples of
    2π, so the field is periodic with period 1 in the transverse directions.

    Attributes:
        amplitudes: a, shape (n, Q)
        waves: κ, shape (Q, n)
        phases: φ, shape (Q,)
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    amplitudes: np.ndarray
    waves: np.ndarray
    phases: np.ndarray

    @model_validator(mode="after")
    def check_periodic(self) -> "TrigField":
        dim, n_modes = self.amplitudes.shape
        if self.waves.shape != (n_modes, dim) or self.phases.shape != (n_modes,):
            raise ValueError("amplitudes, waves and phases have inconsistent shapes")
        transverse = self.waves[:, :-1] / (2.0 * np.pi)
        if not np.allclose(transverse, np.round(transverse), rtol=0.0, atol=1e-12):
            raise ValueError("transverse wavenumbers must be integer multiples of 2π")
        return self

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def scaled(self, factor: float) -> "TrigField":
        """Same modes, amplitudes multiplied by ``factor``."""
        return TrigField(amplitudes=self.amplitudes * factor, waves=self.waves, phases=self.phases)

    def evaluate(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Values and gradient at ``points``.

        Args:
            points: Coordinates, shape (P, n)

        Returns:
            (values of shape (P, n), gradient of shape (P, n, n) with [p, r, s] = ∂_s f^r)
        """
        theta = points @ self.waves.T + self.phases
        values = np.sin(theta) @ self.amplitudes.T
        grad = np.einsum("rq,pq,qs->prs", self.amplitudes, np.cos(theta), self.waves)
        return values, grad


class FlowSample(BaseModel):
    """
    Displacement ω on a tensor grid of T^{n−1}×(0, ℏ), flattened to P nodes.

    Gradients are stored as [p, r, s] = ∂_s f^r(y_p).

    Attributes:
        dim: n ∈ {2, 3}
        shape: Points per dimension
        hbar: Height of the vertical interval
        points: Node coordinates, shape (P, n)
        omega, omega_grad: ω and ∂ω
        vel, vel_grad: Velocity v and ∂v (optional)
        aux, aux_grad: Auxiliary field F and ∂F (optional)
        aux_rate, aux_rate_grad: ∂ₜF and its gradient (optional)
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dim: int = Field(..., ge=2, le=3)
    shape: Tuple[int, ...]
    hbar: float = Field(..., gt=0)
    points: np.ndarray
    omega: np.ndarray
    omega_grad: np.ndarray
    vel: Optional[np.ndarray] = None
    vel_grad: Optional[np.ndarray] = None
    aux: Optional[np.ndarray] = None
    aux_grad: Optional[np.ndarray] = None
    aux_rate: Optional[np.ndarray] = None
    aux_rate_grad: Optional[np.ndarray] = None

    @model_validator(mode="after")
    def check_margin(self) -> "FlowSample":
        size = int(np.prod(self.shape))
        if len(self.shape) != self.dim or self.points.shape != (size, self.dim):
            raise ValueError("points do not match the grid shape")
        if self.omega.shape != (size, self.dim) or self.omega_grad.shape != (size, self.dim, self.dim):
            raise ValueError("omega and its gradient do not match the grid shape")
        margin = np.max(np.linalg.norm(self.omega_grad, axis=(1, 2)))
        if margin > GRADIENT_MARGIN:
            raise ValueError(f"max|∂ω| = {margin:.3g} exceeds the invertibility margin {GRADIENT_MARGIN}")
        return self

    @property
    def size(self) -> int:
        return self.points.shape[0]
