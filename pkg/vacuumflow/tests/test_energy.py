"""
Tests for energy tables, decay fits and pointwise ratios.
"""
import math

import numpy as np
import pytest

from vacuumflow.core.errors import DomainError, GridMismatchError, ZeroDenominatorError
from vacuumflow.physics.energy import (
    energy_report,
    envelope_ratio_max,
    fit_decay,
    linf_embedding_report,
    pointwise_bound_report,
)
from vacuumflow.physics.weighted_calc import make_grid
from vacuumflow.schemas.energy import NORM_INDICES, DecayFit
from vacuumflow.schemas.state import State1D


@pytest.fixture
def fine_grid(gas):
    return make_grid(gas, 400)


def test_zero_state_has_zero_energy(gas, grid):
    """Test that every table vanishes at rest."""
    state = State1D.zero(grid)
    report = energy_report(gas, grid, state, np.zeros(grid.size))
    assert report.e_total == 0.0
    assert report.d_total == 0.0
    assert list(report.e_table) == NORM_INDICES


def test_linear_displacement_parts(gas, fine_grid):
    """Test E^{0,0} of ω = cy against ∫σω² = 2c²/3 and ∫σ²c² = 2c²/3."""
    c = 1e-2
    state = State1D(omega=c * fine_grid.nodes, vel=np.zeros(fine_grid.size))
    zeros = np.zeros(fine_grid.size)
    report = energy_report(gas, fine_grid, state, zeros, jerk=zeros)
    rate, value, slope = report.e_parts[(0, 0)]
    assert rate == 0.0
    assert value == pytest.approx(2.0 * c * c / 3.0, rel=1e-4)
    assert slope == pytest.approx(2.0 * c * c / 3.0, rel=1e-4)
    assert report.d_table[(0, 0)] == rate + slope
    assert report.e_table[(0, 2)] == pytest.approx(0.0, abs=1e-12)


def test_energy_report_checks_grid(gas, grid):
    """Test that the acceleration must live on the grid."""
    state = State1D.zero(grid)
    with pytest.raises(GridMismatchError):
        energy_report(gas, grid, state, np.zeros(grid.size - 1))


def test_localized_dissipation_is_bounded_by_total(gas, fine_grid):
    """Test that cut-off localizations do not exceed the unweighted or weighted totals."""
    y = fine_grid.nodes
    state = State1D(omega=1e-3 * np.sin(y), vel=1e-3 * y ** 2)
    report = energy_report(gas, fine_grid, state, np.zeros(fine_grid.size))
    for index in NORM_INDICES:
        assert report.d2_table[index] <= report.d_table[index] + 1e-18


def test_fit_decay_recovers_exponential():
    """Test δ, C and R² for an exact exponential."""
    times = np.linspace(0.0, 10.0, 50)
    fit = fit_decay(times, 3.0 * np.exp(-0.7 * times))
    assert fit.delta == pytest.approx(0.7, rel=1e-10)
    assert fit.amplitude == pytest.approx(3.0, rel=1e-10)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.envelope(2.0) == pytest.approx(3.0 * math.exp(-1.4))


def test_fit_decay_window():
    """Test that only samples inside the window are used."""
    times = np.linspace(0.0, 10.0, 101)
    energies = np.where(times < 5.0, 1.0, np.exp(-2.0 * times))
    fit = fit_decay(times, energies, (5.0, 10.0))
    assert fit.delta == pytest.approx(2.0)
    assert fit.n_samples == 51
    assert fit.window == (5.0, 10.0)


def test_fit_decay_flat_series():
    """Test the flat-series convention."""
    fit = fit_decay(np.arange(20.0), np.full(20, 2.0))
    assert fit.delta == 0.0
    assert fit.r_squared == 0.0


@pytest.mark.parametrize(
    "times, energies, window",
    [
        (np.arange(5.0), np.ones(5), None),
        (np.arange(20.0), np.zeros(20), None),
        (np.arange(20.0), np.ones(20), (5.0, 5.0)),
        (np.arange(20.0), np.ones(19), None),
    ],
)
def test_fit_decay_rejects_bad_input(times, energies, window):
    """Test too few samples, non-positive energies, empty windows and length mismatch."""
    with pytest.raises(DomainError):
        fit_decay(times, energies, window)


def test_pointwise_report_normalisation(gas, fine_grid):
    """Test the boundary ratio |ω_N| / sqrt(e^{−δt}E(0))."""
    y = fine_grid.nodes
    state = State1D(time=2.0, omega=1e-3 * np.sin(0.25 * np.pi * y), vel=np.zeros(fine_grid.size))
    fit = DecayFit(delta=1.0, amplitude=1.0, r_squared=0.9, window=(0.0, 1.0), n_samples=10)
    ratios = pointwise_bound_report(gas, fine_grid, state, fit, e0=4e-6)
    scale = math.sqrt(math.exp(-2.0) * 4e-6)
    assert ratios.scale == pytest.approx(scale)
    assert ratios.boundary == pytest.approx(abs(state.omega[-1]) / scale)
    assert ratios.velocity == 0.0
    assert len(ratios.boundary_rates) == 3
    with pytest.raises(DomainError):
        pointwise_bound_report(gas, fine_grid, state, fit, e0=0.0)


def test_linf_embedding_rejects_zero_energy(gas, grid):
    """Test that the embedding ratio needs E(t) > 0."""
    with pytest.raises(ZeroDenominatorError):
        linf_embedding_report(gas, grid, State1D.zero(grid), np.zeros(grid.size))


def test_linf_embedding_is_finite(gas, fine_grid):
    """Test the sampled embedding ratio on a smooth state."""
    y = fine_grid.nodes
    state = State1D(omega=1e-3 * np.sin(y), vel=1e-3 * np.sin(2.0 * y))
    ratio = linf_embedding_report(gas, fine_grid, state, np.zeros(fine_grid.size))
    assert 0.0 < ratio < math.inf


def test_pure_velocity_state_energy(gas, fine_grid):
    """Test E^{0,0} = ‖σ^{ι/2}v₀‖² at ω = 0, where ∫σy² = 2/3 for v₀ = y."""
    vel = fine_grid.nodes.copy()
    state = State1D(omega=np.zeros(fine_grid.size), vel=vel)
    zeros = np.zeros(fine_grid.size)
    report = energy_report(gas, fine_grid, state, -vel, jerk=zeros)
    rate, value, slope = report.e_parts[(0, 0)]
    assert value == 0.0 and slope == 0.0
    assert report.e_table[(0, 0)] == pytest.approx(2.0 / 3.0, rel=1e-4)
    # ∂ₜ²ω = −v₀ feeds the rate part of the m = 1 entry
    assert report.e_parts[(1, 0)][0] == pytest.approx(rate, rel=1e-14)


def test_fit_decay_with_noise():
    """Test δ and R² on an exponential with 1% seeded multiplicative noise."""
    rng = np.random.default_rng(20240601)
    times = np.linspace(0.0, 20.0, 200)
    energies = 5.0 * np.exp(-0.3 * times) * (1.0 + 0.01 * rng.standard_normal(times.size))
    fit = fit_decay(times, energies)
    assert fit.delta == pytest.approx(0.3, abs=0.02)
    assert fit.r_squared >= 0.99


def test_envelope_ratio_of_exact_exponential():
    """Test that an exact exponential sits on its fitted envelope."""
    times = np.linspace(0.0, 10.0, 50)
    energies = 2.0 * np.exp(-0.5 * times)
    fit = fit_decay(times, energies, (2.0, 8.0))
    assert envelope_ratio_max(times, energies, fit) == pytest.approx(1.0, rel=1e-10)
    bumped = energies * np.where(np.abs(times - 5.0) < 0.15, 1.2, 1.0)
    assert envelope_ratio_max(times, bumped, fit) == pytest.approx(1.2, rel=1e-10)
