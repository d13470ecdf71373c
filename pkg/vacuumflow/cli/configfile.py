"""
Experiment files: line-based ``key = value`` pairs under ``[section]`` headers.

Keys written before the first header are routed to the section that owns
them, so a minimal file can be four lines long.
"""
import configparser
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Type, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from vacuumflow.core.config import settings
from vacuumflow.core.errors import ConfigError, DomainError
from vacuumflow.physics.model import derive_constants
from vacuumflow.physics.solver1d import initial_state
from vacuumflow.physics.weighted_calc import make_grid
from vacuumflow.schemas.experiment import SEED_LIMIT, Analysis, ExperimentSpec
from vacuumflow.schemas.grid import Spacing
from vacuumflow.schemas.state import InitialData, InitialFamily, ModelName, RunConfig, SchemeName

logger = logging.getLogger(__name__)

ROOT_SECTION = "__root__"


def _split_list(v: Any) -> Any:
    if isinstance(v, str):
        return tuple(part.strip() for part in v.split(",") if part.strip())
    return v


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class ExperimentSection(_Section):
    """``[experiment]``"""

    name: str = "experiment"
    output_dir: str = Field(default_factory=lambda: settings.DEFAULT_OUTPUT_DIR)
    seed: int = Field(0, ge=0, lt=SEED_LIMIT)
    analyses: Tuple[Analysis, ...] = ("decay_fit", "pointwise_bounds")
    svg: bool = False

    @field_validator("analyses", mode="before")
    @classmethod
    def split_analyses(cls, v: Any) -> Any:
        return _split_list(v)


class GasSection(_Section):
    """``[gas]``; ``M`` is accepted for ``total_mass``."""

    gamma: float
    g: float
    total_mass: float = Field(..., alias="M")


class GridSection(_Section):
    """``[grid]``"""

    n_cells: int
    spacing: Spacing = "uniform"


class RunSection(_Section):
    """``[run]``"""

    model: ModelName = "euler_damped"
    dt: Optional[float] = None
    t_final: float = 40.0
    cfl_safety: float = 0.5
    output_every: Optional[int] = None
    scheme: SchemeName = "flux"


class InitSection(_Section):
    """``[init]``; ``table`` is a CSV file with columns ``y, omega[, vel]``."""

    family: InitialFamily = "sine_mode"
    amplitude: float = 1e-3
    mode: int = 1
    vel_amplitude: float = 0.0
    table: Optional[str] = None


class AnalysisSection(_Section):
    """``[analysis]``"""

    levels: int = 3
    fit_window: Optional[Tuple[float, float]] = None
    min_order: Optional[float] = None
    darcy_times: Tuple[float, float] = (1.0, 20.0)
    darcy_max_ratio: Optional[float] = None

    @field_validator("fit_window", "darcy_times", mode="before")
    @classmethod
    def split_pairs(cls, v: Any) -> Any:
        return _split_list(v)


SECTIONS: Dict[str, Type[_Section]] = {
    "experiment": ExperimentSection,
    "gas": GasSection,
    "grid": GridSection,
    "run": RunSection,
    "init": InitSection,
    "analysis": AnalysisSection,
}


def _owners() -> Dict[str, str]:
    owners = {}
    for section, model in SECTIONS.items():
        for name, field in model.model_fields.items():
            owners[name] = section
            if field.alias:
                owners[field.alias] = section
    return owners


KEY_OWNERS = _owners()


def _error_message(error: Dict[str, Any]) -> str:
    message = error["msg"]
    for prefix in ("Value error, ", "Assertion failed, "):
        if message.startswith(prefix):
            return message[len(prefix):]
    return message


def _from_validation(exc: ValidationError, section: str) -> ConfigError:
    error = exc.errors()[0]
    loc = [str(part) for part in error["loc"] if not isinstance(part, int)]
    key = f"{section}.{loc[0]}" if loc else section
    return ConfigError(_error_message(error), key=key)


def _spec_error(exc: ValidationError) -> ConfigError:
    error = exc.errors()[0]
    loc = [str(part) for part in error["loc"] if not isinstance(part, int)]
    message = _error_message(error)
    if loc:
        field = loc[0]
    else:
        # Cross-field checks name the offending key first
        field = message.split(" ", 1)[0]
    section = "analysis" if field in AnalysisSection.model_fields else "experiment"
    return ConfigError(message, key=f"{section}.{field}")


def _tokenize(text: str) -> Dict[str, Dict[str, str]]:
    parser = configparser.ConfigParser(
        delimiters=("=",),
        comment_prefixes=("#",),
        inline_comment_prefixes=("#",),
        interpolation=None,
        default_section="__defaults__",
    )
    parser.optionxform = str
    try:
        # The synthetic header shifts every line number by one
        parser.read_string(f"[{ROOT_SECTION}]\n{text}")
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] - 1
        raise ConfigError(f"line {lineno}: expected 'key = value'", line=lineno)
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ConfigError(exc.message, line=exc.lineno - 1 if exc.lineno else None)
    except configparser.Error as exc:
        raise ConfigError(str(exc))

    raw: Dict[str, Dict[str, str]] = {name: {} for name in SECTIONS}
    for section in parser.sections():
        for key, value in parser.items(section):
            if section == ROOT_SECTION:
                owner = KEY_OWNERS.get(key)
                if owner is None:
                    raise ConfigError(f"unknown key {key!r}", key=key)
                raw[owner][key] = value
            elif section in SECTIONS:
                raw[section][key] = value
            else:
                raise ConfigError(f"unknown section [{section}]", key=section)
    return raw


def _apply_overrides(raw: Dict[str, Dict[str, str]], overrides: Iterable[str]) -> None:
    for item in overrides:
        target, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override must read section.key=value, got {item!r}", key=item)
        section, dot, key = target.strip().rpartition(".")
        if not dot:
            section = KEY_OWNERS.get(key, "")
        if section not in SECTIONS:
            raise ConfigError(f"unknown section in override {item!r}", key=target.strip())
        raw[section][key] = value.strip()


def _validate(section: str, values: Dict[str, str]) -> Any:
    try:
        return SECTIONS[section].model_validate(values)
    except ValidationError as exc:
        raise _from_validation(exc, section) from None


def _domain(exc: DomainError, section: str, default_key: str) -> ConfigError:
    key = exc.details.get("key", default_key)
    return ConfigError(exc.message, key=f"{section}.{key}")


def load_table(path: Path) -> Dict[str, List[float]]:
    """
    Read a ``custom_table`` CSV with a header naming ``y``, ``omega`` and optionally ``vel``.

    Args:
        path: CSV file

    Returns:
        Columns as lists of floats
    """
    try:
        data = np.genfromtxt(path, delimiter=",", names=True, dtype=float, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read table {path}: {exc}", key="init.table") from None
    names = data.dtype.names or ()
    if "y" not in names or "omega" not in names:
        raise ConfigError("table needs columns 'y' and 'omega'", key="init.table")
    data = np.atleast_1d(data)
    columns = {"table_y": data["y"].tolist(), "table_omega": data["omega"].tolist()}
    if "vel" in names:
        columns["table_vel"] = data["vel"].tolist()
    return columns


def parse_config(
    text: str,
    base_dir: Optional[Union[str, Path]] = None,
    overrides: Iterable[str] = (),
) -> ExperimentSpec:
    """
    Parse and validate an experiment file.

    Args:
        text: File contents
        base_dir: Directory relative table paths are resolved against
        overrides: ``section.key=value`` items applied after parsing

    Returns:
        Fully validated experiment with defaults applied
    """
    raw = _tokenize(text)
    _apply_overrides(raw, overrides)

    experiment = _validate("experiment", raw["experiment"])
    gas = _validate("gas", raw["gas"])
    grid_section = _validate("grid", raw["grid"])
    run = _validate("run", raw["run"])
    init = _validate("init", raw["init"])
    analysis = _validate("analysis", raw["analysis"])

    try:
        params = derive_constants(gas.gamma, gas.g, gas.total_mass)
    except DomainError as exc:
        raise _domain(exc, "gas", "total_mass") from None
    try:
        grid = make_grid(params, grid_section.n_cells, grid_section.spacing)
    except DomainError as exc:
        raise ConfigError(exc.message, key="grid.n_cells") from None

    init_values = init.model_dump(exclude={"table"})
    if init.table is not None:
        table = Path(init.table)
        if base_dir is not None and not table.is_absolute():
            table = Path(base_dir) / table
        init_values.update(load_table(table))

    try:
        init_data = InitialData(**init_values)
    except ValidationError as exc:
        raise _from_validation(exc, "init") from None
    try:
        run_config = RunConfig(params=params, grid=grid, init=init_data, **run.model_dump())
    except ValidationError as exc:
        raise _from_validation(exc, "run") from None
    try:
        initial_state(run_config)
    except DomainError as exc:
        raise _domain(exc, "init", "amplitude") from None

    try:
        spec = ExperimentSpec(
            run_config=run_config,
            **experiment.model_dump(),
            **analysis.model_dump(),
        )
    except ValidationError as exc:
        raise _spec_error(exc) from None
    logger.debug("Parsed experiment %s", spec.name)
    return spec


def read_config(
    path: Union[str, Path],
    overrides: Iterable[str] = (),
) -> ExperimentSpec:
    """Read and parse an experiment file from disk."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, base_dir=path.parent, overrides=overrides)
