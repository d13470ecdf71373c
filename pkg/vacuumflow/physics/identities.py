"""
Pointwise checks of the multi-dimensional flow-map algebra.

Fields are closed-form trigonometric sums with analytic gradients, so every
residual measures the identity and floating-point error only. Gradients are
stored per node as G[r, s] = ∂_s f^r; A = (I + ∂ω)^{−1} so that
A[k, i] = A^k_i and the flow-map gradient is (∇_x f)[r, i] = (∂f · A)[r, i].
"""
import logging
import math
from typing import Dict, Iterable, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from vacuumflow.core.config import settings
from vacuumflow.core.errors import DomainError
from vacuumflow.physics.model import stationary_profile
from vacuumflow.schemas.experiment import IdentityReport
from vacuumflow.schemas.flow import FlowSample, TrigField
from vacuumflow.schemas.params import GasParams

logger = logging.getLogger(__name__)

# max|∂ω| of generated samples, inside the invertibility margin
SAMPLE_GRADIENT = 0.36
DEFAULT_MODES = 4
SINGULAR_JACOBIAN = 1e-8
ORDER_RANGE = (1.8, 2.2)
CURL_TOLERANCE = 1e-8


def random_trig_field(rng: np.random.Generator, dim: int, hbar: float, n_modes: int = DEFAULT_MODES) -> TrigField:
    """Random field periodic in the first n−1 coordinates, smooth in the last."""
    transverse = rng.integers(-2, 3, size=(n_modes, dim - 1)) * 2.0 * np.pi
    vertical = rng.uniform(0.5, 2.0, size=(n_modes, 1)) * np.pi / hbar
    return TrigField(
        amplitudes=rng.normal(size=(dim, n_modes)),
        waves=np.hstack([transverse, vertical]),
        phases=rng.uniform(0.0, 2.0 * np.pi, size=n_modes),
    )


def tensor_points(dim: int, n_points: int, hbar: float) -> np.ndarray:
    """Nodes of T^{n−1}×[0, ℏ], flattened to shape (n_points^n, n)."""
    transverse = np.linspace(0.0, 1.0, n_points, endpoint=False)
    vertical = np.linspace(0.0, hbar, n_points)
    axes = [transverse] * (dim - 1) + [vertical]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _max_gradient(grad: np.ndarray) -> float:
    return float(np.max(np.linalg.norm(grad, axis=(1, 2))))


def make_flow_sample(
    dim: int,
    n_points: int,
    seed: int,
    hbar: float = 1.0,
    index: int = 0,
    zero_displacement: bool = False,
) -> FlowSample:
    """
    Seeded random displacement, velocity and auxiliary fields with analytic gradients.

    The displacement is rescaled so that max|∂ω| = 0.36 on the nodes.

    Args:
        dim: 2 or 3
        n_points: Points per dimension
        seed: Base seed
        hbar: Height of the vertical interval
        index: Sample number within the seed
        zero_displacement: Use ω ≡ 0 (flat frame)

    Returns:
        Flow sample carrying ω, v, F and ∂ₜF
    """
    if dim not in (2, 3):
        raise DomainError("dim must be 2 or 3", dim=dim)
    if n_points < 2:
        raise DomainError("n_points must be at least 2", n_points=n_points)
    rng = np.random.default_rng([seed, dim, index])
    points = tensor_points(dim, n_points, hbar)

    displacement = random_trig_field(rng, dim, hbar)
    omega, omega_grad = displacement.evaluate(points)
    if zero_displacement:
        omega, omega_grad = np.zeros_like(omega), np.zeros_like(omega_grad)
    else:
        factor = SAMPLE_GRADIENT / _max_gradient(omega_grad)
        omega, omega_grad = omega * factor, omega_grad * factor

    fields = {}
    for name in ("vel", "aux", "aux_rate"):
        field = random_trig_field(rng, dim, hbar)
        values, grad = field.evaluate(points)
        scale = 1.0 / _max_gradient(grad)
        fields[name] = values * scale
        fields[name + "_grad"] = grad * scale

    return FlowSample(
        dim=dim,
        shape=(n_points,) * dim,
        hbar=hbar,
        points=points,
        omega=omega,
        omega_grad=omega_grad,
        **fields,
    )


def jacobian_and_inverse(sample: FlowSample) -> Tuple[np.ndarray, np.ndarray]:
    """
    J = det(∂x/∂y) and A = (∂x/∂y)^{−1} at every node.

    Args:
        sample: Flow sample

    Returns:
        (J of shape (P,), A of shape (P, n, n))
    """
    deformation = np.eye(sample.dim) + sample.omega_grad
    jac = np.linalg.det(deformation)
    if np.any(np.abs(jac) <= SINGULAR_JACOBIAN):
        raise DomainError("singular Jacobian", node=int(np.argmin(np.abs(jac))))
    return jac, np.linalg.inv(deformation)


def adjugate(grad: np.ndarray) -> np.ndarray:
    """
    Adjugate of each 2×2 or 3×3 matrix in a stack (adj(G)·G = det(G)·I).

    For n = 3 the rows are c₂×c₃, c₃×c₁, c₁×c₂ with c_j the columns of G.
    """
    dim = grad.shape[-1]
    if dim == 2:
        out = np.empty_like(grad)
        out[:, 0, 0] = grad[:, 1, 1]
        out[:, 0, 1] = -grad[:, 0, 1]
        out[:, 1, 0] = -grad[:, 1, 0]
        out[:, 1, 1] = grad[:, 0, 0]
        return out
    c1, c2, c3 = grad[:, :, 0], grad[:, :, 1], grad[:, :, 2]
    return np.stack([np.cross(c2, c3), np.cross(c3, c1), np.cross(c1, c2)], axis=1)


def curl(grad: np.ndarray) -> np.ndarray:
    """Curl from a gradient stack G[r, s] = ∂_s f^r: scalar for n = 2, vector for n = 3."""
    if grad.shape[-1] == 2:
        return (grad[:, 1, 0] - grad[:, 0, 1])[:, None]
    return np.stack(
        [
            grad[:, 2, 1] - grad[:, 1, 2],
            grad[:, 0, 2] - grad[:, 2, 0],
            grad[:, 1, 0] - grad[:, 0, 1],
        ],
        axis=1,
    )


def flow_gradient(grad: np.ndarray, inverse: np.ndarray) -> np.ndarray:
    """∇_x f = ∂f · A, i.e. [∇_x f^r]_i = A^k_i ∂_k f^r."""
    return grad @ inverse


def verify_jacobian_expansion(sample: FlowSample) -> float:
    """
    max |J − [1 + div ω + ½(|div ω|² + |curl ω|² − |∂ω|²) + ⅓δ_{n3}B^s_r∂_sω^r]|.

    Exact identity; the residual is floating-point noise.
    """
    jac, _ = jacobian_and_inverse(sample)
    grad = sample.omega_grad
    div = np.trace(grad, axis1=1, axis2=2)
    curl_sq = np.sum(curl(grad) ** 2, axis=1)
    grad_sq = np.sum(grad ** 2, axis=(1, 2))
    expansion = 1.0 + div + 0.5 * (div ** 2 + curl_sq - grad_sq)
    if sample.dim == 3:
        cofactor = adjugate(grad)
        expansion = expansion + np.einsum("psr,prs->p", cofactor, grad) / 3.0
    return float(np.max(np.abs(jac - expansion)))


def verify_adjugate_identity(sample: FlowSample) -> float:
    """max |J·A − [(1 + div ω)I − ∂ω + δ_{n3}adj(∂ω)]| (exact)."""
    jac, inverse = jacobian_and_inverse(sample)
    grad = sample.omega_grad
    div = np.trace(grad, axis1=1, axis2=2)
    expected = (1.0 + div)[:, None, None] * np.eye(sample.dim) - grad
    if sample.dim == 3:
        expected = expected + adjugate(grad)
    return float(np.max(np.abs(jac[:, None, None] * inverse - expected)))


def verify_inverse(sample: FlowSample) -> float:
    """max |A·(∂x/∂y) − I|."""
    _, inverse = jacobian_and_inverse(sample)
    deformation = np.eye(sample.dim) + sample.omega_grad
    return float(np.max(np.abs(inverse @ deformation - np.eye(sample.dim))))


def _require(sample: FlowSample, *names: str) -> None:
    missing = [name for name in names if getattr(sample, name) is None]
    if missing:
        raise DomainError(f"sample lacks {', '.join(missing)}")


def _nab_quantity(aux_grad: np.ndarray, omega_grad: np.ndarray) -> np.ndarray:
    """A^k_r A^s_i (∂_s F^r)(∂_k F^i) written out in indices."""
    inverse = np.linalg.inv(np.eye(omega_grad.shape[-1]) + omega_grad)
    return np.einsum("pkr,psi,prs,pik->p", inverse, inverse, aux_grad, aux_grad)


def verify_nab_identities(sample: FlowSample, dt_diff: float = 1e-2) -> Tuple[float, float]:
    """
    Residuals of the two basic identities for an auxiliary field F.

    nab:  A^k_r A^s_i ∂_sF^r ∂_kF^i = |∇_xF|² − |curl_xF|²  (exact).
    nabt: A^k_r A^s_i ∂_s∂ₜF^r ∂_kF^i = ½∂ₜ(|∇_xF|² − |curl_xF|²)
          + [∇_xF^r]_i [∇_x v^s]_r [∇_xF^i]_s, with ω(t) = ω + t·v and
          F(t) = F + t·∂ₜF; the time derivative is a central difference.

    Args:
        sample: Flow sample with vel, aux and aux_rate
        dt_diff: Central-difference step

    Returns:
        (residual_nab, residual_nabt)
    """
    _require(sample, "vel_grad", "aux_grad", "aux_rate_grad")
    if dt_diff <= 0:
        raise DomainError("dt_diff must be positive", dt_diff=dt_diff)
    _, inverse = jacobian_and_inverse(sample)
    grad_f = sample.aux_grad

    lhs = _nab_quantity(grad_f, sample.omega_grad)
    flow_f = flow_gradient(grad_f, inverse)
    rhs = np.sum(flow_f ** 2, axis=(1, 2)) - np.sum(curl(flow_f) ** 2, axis=1)
    residual_nab = float(np.max(np.abs(lhs - rhs)))

    rate_lhs = np.einsum("pkr,psi,prs,pik->p", inverse, inverse, sample.aux_rate_grad, grad_f)
    ahead = _nab_quantity(grad_f + dt_diff * sample.aux_rate_grad, sample.omega_grad + dt_diff * sample.vel_grad)
    behind = _nab_quantity(grad_f - dt_diff * sample.aux_rate_grad, sample.omega_grad - dt_diff * sample.vel_grad)
    half_rate = 0.25 * (ahead - behind) / dt_diff
    flow_v = flow_gradient(sample.vel_grad, inverse)
    cubic = np.einsum("pri,psr,pis->p", flow_f, flow_v, flow_f)
    residual_nabt = float(np.max(np.abs(rate_lhs - half_rate - cubic)))
    return residual_nab, residual_nabt


def verify_differentiation_formulae(sample: FlowSample, dt_diff: float = 1e-2) -> Tuple[float, float]:
    """
    Residuals of ∂ₜJ = J A^s_r ∂_s v^r and ∂ₜA = −A(∂v)A along ω(t) = ω + t·v.

    Time derivatives are central differences, so both residuals are O(dt_diff²).
    """
    _require(sample, "vel_grad")
    jac, inverse = jacobian_and_inverse(sample)
    eye = np.eye(sample.dim)
    ahead = eye + sample.omega_grad + dt_diff * sample.vel_grad
    behind = eye + sample.omega_grad - dt_diff * sample.vel_grad

    jac_rate = (np.linalg.det(ahead) - np.linalg.det(behind)) / (2.0 * dt_diff)
    expected_jac = jac * np.einsum("psr,prs->p", inverse, sample.vel_grad)
    inv_rate = (np.linalg.inv(ahead) - np.linalg.inv(behind)) / (2.0 * dt_diff)
    expected_inv = -inverse @ sample.vel_grad @ inverse
    return (
        float(np.max(np.abs(jac_rate - expected_jac))),
        float(np.max(np.abs(inv_rate - expected_inv))),
    )


def lagrangian_density(sample: FlowSample, params: GasParams) -> np.ndarray:
    """ρ(t, x(t, y)) = ρ̄(y_n) / J at the sample nodes."""
    jac, _ = jacobian_and_inverse(sample)
    return stationary_profile(params, sample.points[:, -1]) / jac


def flat_frame_check(sample: FlowSample) -> float:
    """
    With ω ≡ 0, max deviation of the flow-map gradient, divergence and curl of F
    from the flat operators.
    """
    _require(sample, "aux_grad")
    if np.any(sample.omega_grad != 0.0):
        raise DomainError("flat frame check needs ω ≡ 0")
    _, inverse = jacobian_and_inverse(sample)
    flat = sample.aux_grad
    moved = flow_gradient(flat, inverse)
    deviations = (
        np.max(np.abs(moved - flat)),
        np.max(np.abs(np.trace(moved, axis1=1, axis2=2) - np.trace(flat, axis1=1, axis2=2))),
        np.max(np.abs(curl(moved) - curl(flat))),
    )
    return float(max(deviations))


def integrate_curl_decay(initial: np.ndarray, horizon: float) -> np.ndarray:
    """
    Integrate w′ = −w from w(0) = ``initial`` to t = ``horizon`` (DOP853, rtol 1e-12).
    """
    w0 = np.asarray(initial, dtype=float).ravel()
    solution = solve_ivp(
        lambda t, w: -w,
        (0.0, horizon),
        w0,
        method="DOP853",
        rtol=1e-12,
        atol=1e-14,
    )
    if not solution.success:
        raise DomainError(f"curl transport integration failed: {solution.message}")
    return solution.y[:, -1].reshape(np.shape(initial))


def verify_curl_transport(horizon: float, sample: FlowSample) -> float:
    """
    max|w(T) − e^{−T}w(0)| for w = curl_x v transported by ∂ₜw + w = 0 with a frozen flow map.

    Args:
        horizon: T > 0
        sample: Flow sample carrying v

    Returns:
        Max deviation from the exact solution
    """
    _require(sample, "vel_grad")
    if horizon <= 0:
        raise DomainError("horizon must be positive", horizon=horizon)
    _, inverse = jacobian_and_inverse(sample)
    w0 = curl(flow_gradient(sample.vel_grad, inverse))
    w_t = integrate_curl_decay(w0, horizon)
    return float(np.max(np.abs(w_t - math.exp(-horizon) * w0)))


def measured_order(coarse: float, fine: float) -> float:
    """log₂(coarse / fine) for residuals at dt and dt/2; NaN if either vanishes."""
    if coarse <= 0.0 or fine <= 0.0:
        return float("nan")
    return math.log2(coarse / fine)


def run_identity_suite(
    dims: Iterable[int] = (2, 3),
    seed: int = 0,
    n_samples: int = 20,
    n_points: int = 16,
    dt_diff: float = 1e-2,
    horizon: float = 5.0,
    tolerance: Optional[float] = None,
) -> IdentityReport:
    """
    Run every identity check on ``n_samples`` seeded fields per dimension.

    Exactness-class residuals must stay below ``tolerance``; order-class checks
    must show a measured dt-order in [1.8, 2.2]; curl transport must match the
    exact exponential to 1e-8.

    Args:
        dims: Dimensions to check
        seed: Base seed
        n_samples: Samples per dimension
        n_points: Grid points per dimension
        dt_diff: Coarse difference step (the fine one is half of it)
        horizon: Curl-transport horizon T
        tolerance: Exactness gate; defaults to ``settings.IDENTITY_TOLERANCE``

    Returns:
        Residual table, measured orders and pass flag
    """
    tolerance = settings.IDENTITY_TOLERANCE if tolerance is None else tolerance
    dims = sorted({int(d) for d in dims})
    residuals: Dict[str, float] = {}
    orders: Dict[str, float] = {}
    failures = []
    curl_worst = 0.0

    for dim in dims:
        # For n = 2, J is quadratic along ω + t·v and its central difference is exact
        exact_names = ["inverse", "jacobian_expansion", "adjugate", "nab", "flat_frame"]
        order_names = ["nabt", "inverse_rate"]
        if dim == 2:
            exact_names.append("jacobian_rate")
        else:
            order_names.append("jacobian_rate")
        worst = {name: 0.0 for name in exact_names}
        order_lo = {name: math.inf for name in order_names}
        order_hi = {name: -math.inf for name in order_lo}
        for index in range(n_samples):
            sample = make_flow_sample(dim, n_points, seed, index=index)
            flat = make_flow_sample(dim, n_points, seed, index=index, zero_displacement=True)
            nab, nabt = verify_nab_identities(sample, dt_diff)
            _, nabt_fine = verify_nab_identities(sample, dt_diff / 2.0)
            jac_rate, inv_rate = verify_differentiation_formulae(sample, dt_diff)
            jac_fine, inv_fine = verify_differentiation_formulae(sample, dt_diff / 2.0)

            values = {
                "inverse": verify_inverse(sample),
                "jacobian_expansion": verify_jacobian_expansion(sample),
                "adjugate": verify_adjugate_identity(sample),
                "nab": nab,
                "flat_frame": flat_frame_check(flat),
                "jacobian_rate": max(jac_rate, jac_fine),
            }
            for name in exact_names:
                worst[name] = max(worst[name], values[name])
            measured = {
                "nabt": measured_order(nabt, nabt_fine),
                "jacobian_rate": measured_order(jac_rate, jac_fine),
                "inverse_rate": measured_order(inv_rate, inv_fine),
            }
            for name in order_names:
                value = measured[name]
                order_lo[name] = min(order_lo[name], value)
                order_hi[name] = max(order_hi[name], value)
            curl_worst = max(curl_worst, verify_curl_transport(horizon, sample))

        for name, value in worst.items():
            key = f"{name}_{dim}d"
            residuals[key] = value
            if not value <= tolerance:
                failures.append(key)
        for name in order_lo:
            orders[f"{name}_{dim}d_min"] = order_lo[name]
            orders[f"{name}_{dim}d_max"] = order_hi[name]
            if not (ORDER_RANGE[0] <= order_lo[name] and order_hi[name] <= ORDER_RANGE[1]):
                failures.append(f"{name}_{dim}d_order")
        logger.info("Identity suite n=%d: worst exact residual %.3g", dim, max(worst.values()))

    if not curl_worst <= CURL_TOLERANCE:
        failures.append("curl_transport")
    return IdentityReport(
        seed=seed,
        dims=dims,
        n_samples=n_samples,
        n_points=n_points,
        tolerance=tolerance,
        residuals=residuals,
        orders=orders,
        curl_transport=curl_worst,
        failures=failures,
        passed=not failures,
    )
