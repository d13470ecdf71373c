"""
Tests for grids, discrete derivatives, weighted norms and Hardy sampling.
"""
import numpy as np
import pytest

from vacuumflow.core.errors import DomainError, GridMismatchError, ZeroDenominatorError
from vacuumflow.physics.model import stationary_mass
from vacuumflow.physics.weighted_calc import (
    derivative,
    dual_cell_weights,
    embedding_ratio,
    hardy_ratio,
    hardy_ratio_closed_form,
    hardy_sweep,
    integrate,
    make_cutoffs,
    make_grid,
    sigma_power,
    weighted_norm_sq,
)


def test_make_grid_endpoints_and_weight(gas):
    """Test exact endpoints and σ = ν(ℏ − y)."""
    grid = make_grid(gas, 40)
    assert grid.size == 41
    assert grid.nodes[0] == 0.0
    assert grid.nodes[-1] == gas.hbar
    assert grid.sigma[-1] == 0.0
    np.testing.assert_allclose(grid.sigma, gas.nu * (gas.hbar - grid.nodes))
    assert grid.quad_weights.sum() == pytest.approx(gas.hbar)


def test_top_refined_grid_clusters_at_boundary(gas):
    """Test that top-refined cells shrink towards the vacuum boundary."""
    grid = make_grid(gas, 32, "top-refined")
    widths = grid.widths
    assert np.all(np.diff(widths) < 0)
    assert grid.nodes[-1] == gas.hbar


@pytest.mark.parametrize("n_cells", [4, 7, 10.5])
def test_make_grid_rejects_small_or_fractional(gas, n_cells):
    """Test the minimum cell count."""
    with pytest.raises(DomainError):
        make_grid(gas, n_cells)


def test_grid_arrays_are_read_only(grid):
    """Test that grid arrays cannot be modified in place."""
    with pytest.raises(ValueError):
        grid.nodes[1] = 0.5


def test_derivative_exact_for_quadratics(gas):
    """Test second-order stencils on uniform and refined grids."""
    for spacing in ("uniform", "top-refined"):
        grid = make_grid(gas, 24, spacing)
        y = grid.nodes
        np.testing.assert_allclose(derivative(grid, 3.0 * y ** 2 - y, 1), 6.0 * y - 1.0, atol=1e-10)
    grid = make_grid(gas, 24)
    np.testing.assert_allclose(derivative(grid, grid.nodes ** 2, 2), 2.0, atol=1e-9)


def test_derivative_order_limits(grid):
    """Test the admissible derivative orders."""
    with pytest.raises(DomainError):
        derivative(grid, np.zeros(grid.size), 4)
    np.testing.assert_array_equal(derivative(grid, np.ones(grid.size), 0), np.ones(grid.size))


def test_field_length_must_match(grid):
    """Test that a field with the wrong length is rejected."""
    with pytest.raises(GridMismatchError):
        integrate(grid, np.zeros(grid.size + 1))


def test_integrate_rules(grid):
    """Test trapezoid on linear and Simpson on cubic integrands."""
    y = grid.nodes
    assert integrate(grid, 3.0 * y + 1.0) == pytest.approx(1.5 * 4.0 + 2.0, rel=1e-13)
    assert integrate(grid, y ** 3, "simpson") == pytest.approx(4.0, rel=1e-12)
    with pytest.raises(DomainError):
        integrate(grid, y, "midpoint")


def test_sigma_power_negative_zeroes_top(grid):
    """Test that negative powers leave the vacuum node at 0."""
    values = sigma_power(grid, -0.5)
    assert values[-1] == 0.0
    assert np.all(values[:-1] > 0)


def test_weighted_norm_of_constant(grid, gas):
    """Test Σ_k ∫σ^a|∂^k f|² for f = 1."""
    assert weighted_norm_sq(grid, np.ones(grid.size), 0.0, 2) == pytest.approx(gas.hbar)
    # ∫ ν(ℏ − y) dy = νℏ²/2
    assert weighted_norm_sq(grid, np.ones(grid.size), 1.0, 1) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        weighted_norm_sq(grid, np.ones(grid.size), -1.0, 1)


def test_dual_cell_weights_sum_to_mass(gas, grid):
    """Test that lumped masses integrate σ^ι over [0, ℏ] exactly."""
    weights = dual_cell_weights(grid, gas.iota)
    assert np.all(weights > 0)
    assert weights.sum() == pytest.approx(stationary_mass(gas), rel=1e-12)


def test_hardy_closed_form_constant_function(unit_gas):
    """Test the oracle for f = 1, k = 0: ∫1 / ∫σ² = 3."""
    assert hardy_ratio_closed_form(unit_gas, 0.0, 0.0) == pytest.approx(3.0)
    with pytest.raises(DomainError):
        hardy_ratio_closed_form(unit_gas, -1.0, 0.0)


def test_hardy_ratio_rejects_zero_field(grid):
    """Test that f = 0 has no Hardy ratio."""
    with pytest.raises(ZeroDenominatorError):
        hardy_ratio(grid, np.zeros(grid.size), 0.0)


@pytest.mark.parametrize("k", [0.0, 1.0])
def test_hardy_sweep_matches_oracles(unit_gas, k):
    """Test sampled Hardy ratios against closed-form integrals."""
    grid = make_grid(unit_gas, 4000)
    fit = hardy_sweep(grid, unit_gas, np.linspace(0.0, 3.0, 20), k)
    assert len(fit.ratios) == 20
    assert fit.spread <= 0.05
    assert all(ratio <= fit.constant for ratio in fit.ratios)


def test_embedding_ratio_needs_integer_order(grid):
    """Test that b − a/2 must be a non-negative integer."""
    field = np.sin(grid.nodes)
    assert embedding_ratio(grid, field, 2.0, 2) > 0
    with pytest.raises(DomainError):
        embedding_ratio(grid, field, 1.0, 1)


def test_cutoffs_partition(grid):
    """Test the plateau values of ζ₁ and ζ₂."""
    cutoffs = make_cutoffs(grid)
    assert cutoffs.zeta1[0] == 1.0
    assert cutoffs.zeta1[-1] == 0.0
    assert cutoffs.zeta2[0] == 0.0
    assert cutoffs.zeta2[-1] == 1.0
    assert np.all((cutoffs.zeta1 >= 0) & (cutoffs.zeta1 <= 1))


def test_cutoffs_are_monotone_and_cover(grid):
    """Test that ζ₁ falls, ζ₂ rises and together they never drop below one."""
    cutoffs = make_cutoffs(grid)
    assert np.all(np.diff(cutoffs.zeta1) <= 1e-15)
    assert np.all(np.diff(cutoffs.zeta2) >= -1e-15)
    assert np.all(cutoffs.zeta1 + cutoffs.zeta2 >= 1.0 - 1e-15)


@pytest.mark.parametrize("scale", [-3.0, 0.5, 2.0])
def test_weighted_norm_is_quadratic_in_scale(grid, scale):
    """Test ‖cf‖² = c²‖f‖²."""
    field = np.sin(grid.nodes) + grid.nodes ** 2
    base = weighted_norm_sq(grid, field, 1.0, 2)
    assert weighted_norm_sq(grid, scale * field, 1.0, 2) == pytest.approx(scale ** 2 * base, rel=1e-12)


@pytest.mark.parametrize("scale", [-2.0, 1e-3, 7.0])
def test_hardy_ratio_is_scale_invariant(grid, scale):
    """Test that the Hardy ratio of cf equals that of f."""
    field = np.cos(grid.nodes) + 0.5
    assert hardy_ratio(grid, scale * field, 1.0) == pytest.approx(hardy_ratio(grid, field, 1.0), rel=1e-12)
