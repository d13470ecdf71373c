"""
Tests for concurrent runs, refinement studies and the Darcy twin run.
"""
import math

import pytest

from vacuumflow.physics.solver1d import run
from vacuumflow.physics.studies import (
    convergence_study,
    darcy_compare,
    observed_orders,
    refinement_configs,
    run_many,
)
from vacuumflow.physics.weighted_calc import make_grid
from vacuumflow.schemas.state import InitialData, RunConfig


@pytest.fixture
def coarse_config(gas):
    return RunConfig(params=gas, grid=make_grid(gas, 16), t_final=1.0, init=InitialData(amplitude=1e-3))


def test_run_many_keeps_submission_order(small_config, coarse_config):
    """Test that concurrent results come back in input order and match serial runs."""
    results = run_many([small_config, coarse_config])
    assert results[0].config.grid.n_cells == 32
    assert results[1].config.grid.n_cells == 16
    serial = run(coarse_config)
    assert results[1].e_total.tolist() == serial.e_total.tolist()


def test_refinement_configs_nest(coarse_config):
    """Test cell doubling, exact step halving and two records per level."""
    configs = refinement_configs(coarse_config, 3)
    assert [c.grid.n_cells for c in configs] == [16, 32, 64]
    assert configs[1].dt == configs[0].dt / 2.0
    assert configs[2].dt == configs[0].dt / 4.0
    fine, coarse = configs[2].grid.nodes, configs[0].grid.nodes
    assert fine[::4].tolist() == pytest.approx(coarse.tolist(), abs=1e-15)
    with pytest.raises(ValueError):
        refinement_configs(coarse_config, 1)


def test_darcy_refinement_divides_step_by_four(coarse_config):
    """Test the parabolic step scaling."""
    configs = refinement_configs(coarse_config.model_copy(update={"model": "darcy"}), 2)
    assert configs[1].dt == configs[0].dt / 4.0


def test_observed_orders():
    """Test log₂ ratios and vanishing differences."""
    orders = observed_orders([1e-2, 2.5e-3, 0.0])
    assert orders[0] == pytest.approx(2.0)
    assert math.isnan(orders[1])


def test_convergence_study_differences_shrink(coarse_config):
    """Test that level differences decrease under refinement."""
    report = convergence_study(coarse_config, levels=3)
    assert report.n_cells == [16, 32, 64]
    for quantity in ("omega_sup", "vel_sup"):
        first, second = report.differences[quantity]
        assert second < first
        assert len(report.orders[quantity]) == 1
    assert report.passed


def test_convergence_gate_fails_on_unreachable_order(coarse_config):
    """Test that min_order gates the reported orders."""
    report = convergence_study(coarse_config, levels=3, min_order=50.0)
    assert not report.passed


@pytest.mark.slow
def test_darcy_twin_run_converges(gas):
    """Test that Euler and Darcy solutions approach each other."""
    config = RunConfig(params=gas, grid=make_grid(gas, 50), t_final=20.0, init=InitialData(amplitude=1e-3))
    report = darcy_compare(config, (1.0, 20.0), max_ratio=0.2)
    assert report.times[0] == 0.0
    assert report.times[-1] == 20.0
    assert 1.0 in report.times
    assert report.deviation[0] == 0.0
    assert report.passed, report.ratio


def test_convergence_study_is_second_order(gas):
    """Test ω and v orders against the finest level on interior nodes."""
    config = RunConfig(params=gas, grid=make_grid(gas, 32), t_final=2.0, init=InitialData(amplitude=1e-3))
    report = convergence_study(config, levels=3, min_order=1.8)
    assert report.n_cells == [32, 64, 128]
    for quantity in ("omega_sup", "vel_sup"):
        assert len(report.differences[quantity]) == 2
        assert report.orders[quantity][0] >= 1.8
    assert report.passed


def test_refinement_keeps_scheme(coarse_config):
    """Test that every level uses the configured force discretization."""
    configs = refinement_configs(coarse_config.model_copy(update={"scheme": "product_rule"}), 2)
    assert {c.scheme for c in configs} == {"product_rule"}
