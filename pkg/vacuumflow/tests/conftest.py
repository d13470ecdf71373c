"""
Test configuration and fixtures.
Provides shared gas parameters, grids, run configurations and config files.
"""
from pathlib import Path
from typing import Callable

import pytest

from vacuumflow.physics.model import derive_constants
from vacuumflow.physics.weighted_calc import make_grid
from vacuumflow.schemas.grid import Grid1D
from vacuumflow.schemas.params import GasParams
from vacuumflow.schemas.state import InitialData, RunConfig


@pytest.fixture(scope="session")
def gas() -> GasParams:
    """
    γ = 2, g = 1, M = 1: ν = 1/2, ℏ = 2, ι = 1.
    """
    return derive_constants(2.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def unit_gas() -> GasParams:
    """
    γ = 2, g = 2, M = 1/2: ν = 1, ℏ = 1, ι = 1.
    """
    return derive_constants(2.0, 2.0, 0.5)


@pytest.fixture(scope="session")
def grid(gas: GasParams) -> Grid1D:
    return make_grid(gas, 64)


@pytest.fixture(scope="function")
def small_config(gas: GasParams) -> RunConfig:
    """
    Short damped Euler run on a coarse grid.
    """
    return RunConfig(
        params=gas,
        grid=make_grid(gas, 32),
        t_final=2.0,
        init=InitialData(family="sine_mode", amplitude=1e-3, mode=1),
    )


@pytest.fixture(scope="function")
def write_config(tmp_path: Path) -> Callable[[str], Path]:
    """
    Write experiment text to a file and return its path.
    """
    def _write(text: str, name: str = "experiment.ini") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write
