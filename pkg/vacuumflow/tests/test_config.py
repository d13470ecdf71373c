"""
Tests for process settings and experiment-file parsing.
"""
import io
import logging
import sys

import pytest

from vacuumflow.cli.configfile import parse_config, read_config
from vacuumflow.core.config import Settings
from vacuumflow.core.errors import EXIT_CONFIG, ConfigError
from vacuumflow.core.log import StderrHandler, configure_logging

MINIMAL = """
gamma = 2
g = 1
M = 1
n_cells = 32
"""


def test_minimal_config_applies_defaults():
    """Test the documented defaults of a four-key file."""
    spec = parse_config(MINIMAL)
    config = spec.run_config
    assert config.params.hbar == 2.0
    assert config.grid.n_cells == 32
    assert config.dt is None
    assert config.t_final == 40.0
    assert config.model == "euler_damped"
    assert config.init.family == "sine_mode"
    assert config.init.amplitude == 1e-3
    assert spec.analyses == ("decay_fit", "pointwise_bounds")
    assert spec.levels == 3
    assert spec.window() == (10.0, 36.0)


def test_sections_comments_and_lists():
    """Test section headers, inline comments and comma lists."""
    spec = parse_config(
        """
        # damped run
        [experiment]
        name = decay-check
        analyses = decay_fit, convergence
        svg = true

        [gas]
        gamma = 1.4   # air
        g = 9.81
        total_mass = 3

        [grid]
        n_cells = 64
        spacing = top-refined

        [run]
        model = darcy
        t_final = 5

        [analysis]
        fit_window = 1, 4
        darcy_times = 0.5, 5
        """.replace("        ", "")
    )
    assert spec.name == "decay-check"
    assert spec.analyses == ("decay_fit", "convergence")
    assert spec.svg is True
    assert spec.run_config.params.gamma == 1.4
    assert spec.run_config.grid.spacing == "top-refined"
    assert spec.run_config.model == "darcy"
    assert spec.fit_window == (1.0, 4.0)
    assert spec.darcy_times == (0.5, 5.0)


def test_gamma_below_one_is_rejected():
    """Test the domain gate on γ, reported against its key."""
    with pytest.raises(ConfigError, match="gamma must exceed 1") as exc_info:
        parse_config(MINIMAL.replace("gamma = 2", "gamma = 0.9"))
    assert exc_info.value.key == "gas.gamma"
    assert exc_info.value.exit_code == EXIT_CONFIG


def test_malformed_line_reports_line_number():
    """Test that a line without '=' is a parse error at its line."""
    with pytest.raises(ConfigError) as exc_info:
        parse_config("gamma = 2\ng = 1\ndt 0.01\n")
    assert exc_info.value.line == 3


def test_unknown_key_is_named():
    """Test that misspelled keys are reported by name."""
    with pytest.raises(ConfigError) as exc_info:
        parse_config(MINIMAL + "[run]\nt_finall = 3\n")
    assert exc_info.value.key == "run.t_finall"


def test_unknown_section_is_rejected():
    """Test that only documented sections are accepted."""
    with pytest.raises(ConfigError) as exc_info:
        parse_config(MINIMAL + "[solver]\ndt = 0.1\n")
    assert exc_info.value.key == "solver"


def test_missing_required_key():
    """Test that gas parameters are required."""
    with pytest.raises(ConfigError) as exc_info:
        parse_config("gamma = 2\ng = 1\nn_cells = 32\n")
    assert exc_info.value.key == "gas.M"


def test_bad_value_type_names_key():
    """Test that a non-numeric value is reported against its key."""
    with pytest.raises(ConfigError) as exc_info:
        parse_config(MINIMAL.replace("n_cells = 32", "n_cells = many"))
    assert exc_info.value.key == "grid.n_cells"


def test_too_few_cells_is_rejected():
    """Test the minimum grid size."""
    with pytest.raises(ConfigError) as exc_info:
        parse_config(MINIMAL.replace("n_cells = 32", "n_cells = 4"))
    assert exc_info.value.key == "grid.n_cells"


def test_large_amplitude_is_rejected():
    """Test the smallness gate at configuration time."""
    with pytest.raises(ConfigError) as exc_info:
        parse_config(MINIMAL + "[init]\namplitude = 1.0\n")
    assert exc_info.value.key == "init.amplitude"


def test_window_outside_horizon_is_rejected():
    """Test the cross-field check of the fit window."""
    with pytest.raises(ConfigError) as exc_info:
        parse_config(MINIMAL + "[analysis]\nfit_window = 10, 50\n")
    assert exc_info.value.key == "analysis.fit_window"


def test_overrides_replace_file_values():
    """Test section.key=value overrides and bare keys."""
    spec = parse_config(MINIMAL, overrides=["run.t_final=5", "n_cells=16", "experiment.seed=9"])
    assert spec.run_config.t_final == 5.0
    assert spec.run_config.grid.n_cells == 16
    assert spec.seed == 9
    with pytest.raises(ConfigError):
        parse_config(MINIMAL, overrides=["nothing.here=1"])


def test_custom_table_is_read_relative_to_config(write_config, tmp_path):
    """Test loading ω₀ from a CSV table next to the config file."""
    (tmp_path / "omega.csv").write_text("y,omega,vel\n0,0,0\n1,0.001,0\n2,0.002,0\n", encoding="utf-8")
    path = write_config(MINIMAL + "[init]\nfamily = custom_table\ntable = omega.csv\n")
    spec = read_config(path)
    assert spec.run_config.init.table_omega == [0.0, 0.001, 0.002]
    assert spec.run_config.init.table_vel == [0.0, 0.0, 0.0]


def test_missing_config_file(tmp_path):
    """Test that an unreadable file is a configuration error."""
    with pytest.raises(ConfigError):
        read_config(tmp_path / "absent.ini")


def test_settings_from_environment(monkeypatch):
    """Test the VEL_ prefix and log-level normalisation."""
    monkeypatch.setenv("VEL_NUM_THREADS", "3")
    monkeypatch.setenv("VEL_LOG_LEVEL", "debug")
    settings = Settings()
    assert settings.NUM_THREADS == 3
    assert settings.LOG_LEVEL == "DEBUG"


def test_settings_reject_unknown_log_level(monkeypatch):
    """Test that an unknown level name is refused."""
    monkeypatch.setenv("VEL_LOG_LEVEL", "chatty")
    with pytest.raises(ValueError):
        Settings()


def test_logging_follows_replaced_stderr(monkeypatch):
    """Test that records go to the current stderr after the previous one was closed."""
    first = io.StringIO()
    monkeypatch.setattr(sys, "stderr", first)
    configure_logging(level="INFO")
    first.close()

    second = io.StringIO()
    monkeypatch.setattr(sys, "stderr", second)
    configure_logging(level="INFO")
    logging.getLogger("vacuumflow.tests").info("second run")

    assert "second run" in second.getvalue()
    handlers = [h for h in logging.getLogger("vacuumflow").handlers if isinstance(h, StderrHandler)]
    assert len(handlers) == 1


def test_quiet_logging_raises_threshold():
    """Test that quiet mode suppresses informational records."""
    configure_logging(level="DEBUG", quiet=True)
    assert logging.getLogger("vacuumflow").level == logging.WARNING
