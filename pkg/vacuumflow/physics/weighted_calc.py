"""
Degenerate-weight discrete calculus on [0, ℏ].
Grids, σ-weighted quadrature and norms, discrete derivatives, cut-off functions,
and the sampled Hardy and embedding checks.
"""
import logging
from typing import Iterable, Literal

import numpy as np
from scipy import integrate as sp_integrate

from vacuumflow.core.errors import DomainError, GridMismatchError, ZeroDenominatorError
from vacuumflow.schemas.grid import CutoffPair, Grid1D, HardyFit, Spacing, readonly
from vacuumflow.schemas.params import GasParams

logger = logging.getLogger(__name__)

MIN_CELLS = 8
MAX_DERIVATIVE_ORDER = 3

Rule = Literal["trapezoid", "simpson"]


def make_grid(params: GasParams, n_cells: int, spacing: Spacing = "uniform") -> Grid1D:
    """
    Build the node set y_0 = 0 < … < y_N = ℏ and the weight σ = ν(ℏ−y).

    ``top-refined`` maps a uniform parameter s through y = ℏ(1 − (1−s)²),
    which clusters nodes at the vacuum boundary.

    Args:
        params: Gas parameters
        n_cells: Number of cells N (at least 8)
        spacing: ``uniform`` or ``top-refined``

    Returns:
        Validated grid
    """
    if int(n_cells) != n_cells or n_cells < MIN_CELLS:
        raise DomainError(f"n_cells must be an integer >= {MIN_CELLS}", n_cells=n_cells)
    if spacing not in ("uniform", "top-refined"):
        raise DomainError(f"unknown spacing {spacing!r}", spacing=spacing)
    n_cells = int(n_cells)
    hbar = params.hbar

    s = np.linspace(0.0, 1.0, n_cells + 1)
    if spacing == "uniform":
        nodes = hbar * s
    else:
        nodes = hbar * (1.0 - (1.0 - s) ** 2)
    nodes[0] = 0.0
    nodes[-1] = hbar

    sigma = params.nu * (hbar - nodes)
    widths = np.diff(nodes)
    weights = np.empty_like(nodes)
    weights[0] = 0.5 * widths[0]
    weights[-1] = 0.5 * widths[-1]
    weights[1:-1] = 0.5 * (widths[:-1] + widths[1:])

    return Grid1D(
        n_cells=n_cells,
        spacing=spacing,
        hbar=hbar,
        nu=params.nu,
        nodes=readonly(nodes),
        sigma=readonly(sigma),
        quad_weights=readonly(weights),
    )


def check_field(grid: Grid1D, field: np.ndarray) -> np.ndarray:
    """Return ``field`` as a float array, or raise if it is not one value per node."""
    values = np.asarray(field, dtype=float)
    if values.shape != (grid.size,):
        raise GridMismatchError(
            f"field has shape {values.shape}, grid has {grid.size} nodes",
            expected=grid.size,
        )
    return values


def derivative(grid: Grid1D, field: np.ndarray, order: int = 1) -> np.ndarray:
    """
    Discrete ∂_y^order: central second-order differences inside, one-sided
    second-order stencils at both ends, applied ``order`` times.

    Args:
        grid: Grid the field lives on
        field: Nodal values
        order: 0 … 3

    Returns:
        Nodal values of the derivative
    """
    if order < 0 or order > MAX_DERIVATIVE_ORDER:
        raise DomainError(f"derivative order must be in [0, {MAX_DERIVATIVE_ORDER}]", order=order)
    values = check_field(grid, field)
    for _ in range(order):
        values = np.gradient(values, grid.nodes, edge_order=2)
    return values


def integrate(grid: Grid1D, values: np.ndarray, rule: Rule = "trapezoid") -> float:
    """
    ∫₀^ℏ f dy from nodal values.

    Args:
        grid: Grid
        values: Nodal values of f
        rule: ``trapezoid`` or ``simpson``

    Returns:
        Quadrature value
    """
    values = check_field(grid, values)
    if rule == "trapezoid":
        return float(sp_integrate.trapezoid(values, grid.nodes))
    if rule == "simpson":
        return float(sp_integrate.simpson(values, x=grid.nodes))
    raise DomainError(f"unknown quadrature rule {rule!r}", rule=rule)


def sigma_power(grid: Grid1D, power: float) -> np.ndarray:
    """σ^power at the nodes; for negative powers the top node (σ = 0) gets 0."""
    if power >= 0:
        return np.power(grid.sigma, power)
    out = np.zeros(grid.size)
    positive = grid.sigma > 0
    out[positive] = np.power(grid.sigma[positive], power)
    return out


def weighted_norm_sq(
    grid: Grid1D,
    field: np.ndarray,
    a: float,
    b: int,
    rule: Rule = "trapezoid",
) -> float:
    """
    Discrete H^{a,b} norm squared: Σ_{k≤b} ∫ σ^a |∂^k f|² dy.

    Args:
        grid: Grid
        field: Nodal values of f
        a: Weight power (≥ 0)
        b: Highest derivative (0 … 3)
        rule: Quadrature rule

    Returns:
        Squared norm
    """
    if a < 0:
        raise DomainError("weight power a must be non-negative", a=a)
    if int(b) != b or b < 0 or b > MAX_DERIVATIVE_ORDER:
        raise DomainError(f"b must be an integer in [0, {MAX_DERIVATIVE_ORDER}]", b=b)
    weight = sigma_power(grid, a)
    values = check_field(grid, field)
    total = 0.0
    for k in range(int(b) + 1):
        total += integrate(grid, weight * derivative(grid, values, k) ** 2, rule)
    return total


def hardy_ratio(grid: Grid1D, field: np.ndarray, k: float, rule: Rule = "simpson") -> float:
    """
    [∫ σ^k f² dy] / [∫ σ^{k+2}(f² + |∂_y f|²) dy].

    Args:
        grid: Grid
        field: Nodal values of f
        k: Weight power (> −1)
        rule: Quadrature rule

    Returns:
        The ratio
    """
    if k <= -1:
        raise DomainError("Hardy weight power k must exceed -1", k=k)
    values = check_field(grid, field)
    numerator = integrate(grid, sigma_power(grid, k) * values ** 2, rule)
    slope = derivative(grid, values, 1)
    denominator = integrate(grid, sigma_power(grid, k + 2) * (values ** 2 + slope ** 2), rule)
    if denominator == 0.0:
        raise ZeroDenominatorError("Hardy denominator vanishes", k=k)
    return numerator / denominator


def hardy_ratio_closed_form(params: GasParams, p: float, k: float) -> float:
    """
    Exact Hardy ratio of f_p(y) = (ℏ−y)^p.

    Args:
        params: Gas parameters (ν, ℏ)
        p: Exponent, p > (−1−k)/2
        k: Weight power

    Returns:
        The ratio from closed-form integrals
    """
    if k <= -1 or 2 * p <= -1 - k:
        raise DomainError("need k > -1 and p > (-1-k)/2", p=p, k=k)
    nu, hbar = params.nu, params.hbar
    low = k + 2 * p + 1
    numerator = nu ** k * hbar ** low / low
    denominator = nu ** (k + 2) * (hbar ** (low + 2) / (low + 2) + p * p * hbar ** low / low)
    return numerator / denominator


def hardy_sweep(grid: Grid1D, params: GasParams, exponents: Iterable[float], k: float) -> HardyFit:
    """
    Sample the Hardy ratio over the family f_p = (ℏ−y)^p and fit one constant.

    Args:
        grid: Grid
        params: Gas parameters the grid was built for
        exponents: p values
        k: Weight power

    Returns:
        Fitted constant, ratios and their spread against the closed forms
    """
    exponents = [float(p) for p in exponents]
    distance = grid.hbar - grid.nodes
    ratios = [hardy_ratio(grid, np.power(distance, p), k) for p in exponents]
    oracles = [hardy_ratio_closed_form(params, p, k) for p in exponents]
    spread = max(abs(r / o - 1.0) for r, o in zip(ratios, oracles))
    constant = max(ratios)
    logger.debug("Hardy k=%g: constant %.6g, spread %.3g over %d exponents", k, constant, spread, len(ratios))
    return HardyFit(
        k=k,
        exponents=exponents,
        ratios=ratios,
        oracle_ratios=oracles,
        constant=constant,
        spread=spread,
    )


def embedding_ratio(grid: Grid1D, field: np.ndarray, a: float, b: int) -> float:
    """
    ‖f‖²_{H^s} / ‖f‖²_{H^{a,b}} for the integer order s = b − a/2.

    Sampled evidence for the weighted embedding; no constant is certified.
    """
    order = b - a / 2.0
    if order < 0 or abs(order - round(order)) > 1e-12:
        raise DomainError("b - a/2 must be a non-negative integer", a=a, b=b)
    plain = weighted_norm_sq(grid, field, 0.0, int(round(order)))
    weighted = weighted_norm_sq(grid, field, a, b)
    if weighted == 0.0:
        raise ZeroDenominatorError("weighted norm vanishes", a=a, b=b)
    return plain / weighted


def dual_cell_weights(grid: Grid1D, power: float) -> np.ndarray:
    """
    Exact ∫ σ^power dy over the dual cells [y_{j−1/2}, y_{j+1/2}] (half cells at the ends).

    Args:
        grid: Grid
        power: Exponent (> −1)

    Returns:
        One positive weight per node
    """
    if power <= -1:
        raise DomainError("dual-cell power must exceed -1", power=power)
    edges = np.concatenate(([0.0], grid.midpoints, [grid.hbar]))
    distance = np.maximum(grid.hbar - edges, 0.0)
    # ν^q (ℏ−y)^{q+1} written as σ^q (ℏ−y) to keep ν^q from underflowing
    antiderivative = np.power(grid.nu * distance, power) * distance / (power + 1.0)
    return antiderivative[:-1] - antiderivative[1:]


def smoothstep(t: np.ndarray) -> np.ndarray:
    """Quintic S(t) = 6t⁵ − 15t⁴ + 10t³ on [0, 1], clamped outside."""
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


def make_cutoffs(grid: Grid1D) -> CutoffPair:
    """
    ζ₁ = 1 on [0, ℏ/2] falling to 0 on [3ℏ/4, ℏ]; ζ₂ = 0 on [0, ℏ/4] rising to 1 on [ℏ/2, ℏ].

    Args:
        grid: Grid

    Returns:
        Nodal values of both cut-offs
    """
    quarter = 0.25 * grid.hbar
    zeta1 = 1.0 - smoothstep((grid.nodes - 2.0 * quarter) / quarter)
    zeta2 = smoothstep((grid.nodes - quarter) / quarter)
    return CutoffPair(zeta1=readonly(zeta1), zeta2=readonly(zeta2))
