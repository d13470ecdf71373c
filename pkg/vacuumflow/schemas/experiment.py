"""
Pydantic schemas for experiments, run results and the JSON artifacts of the CLI.
"""
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from vacuumflow.schemas.energy import DecayFit, EnergyReport, PointwiseRatios
from vacuumflow.schemas.state import RunConfig, State1D

Analysis = Literal["decay_fit", "pointwise_bounds", "darcy_compare", "convergence"]
ConvergenceQuantity = Literal["omega_sup", "vel_sup", "gamma_boundary", "e_total", "mass_rel_err"]

SEED_LIMIT = 2 ** 64


class ExperimentSpec(BaseModel):
    """
    A validated experiment file.

    Attributes:
        name: Filesystem-safe identifier
        run_config: The simulation to run
        analyses: Post-processing steps requested
        output_dir: Artifact directory
        seed: Seed for randomized checks
        svg: Write ``energy.svg`` next to ``series.csv``
        levels: Refinement levels of the convergence study
        fit_window: Decay-fit window; default [0.25·T, 0.9·T]
        min_order: Optional gate on the observed convergence order
        darcy_times: Early and late comparison times of the twin run
        darcy_max_ratio: Optional gate on late/early twin-run deviation
    """
    model_config = ConfigDict(frozen=True)

    name: str = Field("experiment", min_length=1, pattern=r"^[A-Za-z0-9._-]+$")
    run_config: RunConfig
    analyses: Tuple[Analysis, ...] = ("decay_fit", "pointwise_bounds")
    output_dir: str = "results"
    seed: int = Field(0, ge=0, lt=SEED_LIMIT)
    svg: bool = False
    levels: int = Field(3, ge=2)
    fit_window: Optional[Tuple[float, float]] = None
    min_order: Optional[float] = Field(None, gt=0)
    darcy_times: Tuple[float, float] = (1.0, 20.0)
    darcy_max_ratio: Optional[float] = Field(None, gt=0)

    @model_validator(mode="after")
    def check_windows(self) -> "ExperimentSpec":
        t_final = self.run_config.t_final
        if self.fit_window is not None:
            lo, hi = self.fit_window
            if not 0 <= lo < hi <= t_final:
                raise ValueError("fit_window must satisfy 0 <= lo < hi <= t_final")
        early, late = self.darcy_times
        if "darcy_compare" in self.analyses and not 0 < early < late <= t_final:
            raise ValueError("darcy_times must satisfy 0 < early < late <= t_final")
        return self

    def window(self) -> Tuple[float, float]:
        """Decay-fit window with the default applied."""
        if self.fit_window is not None:
            return self.fit_window
        t_final = self.run_config.t_final
        return (0.25 * t_final, 0.9 * t_final)


class RunResult(BaseModel):
    """
    Recorded trajectory of one simulation.

    Attributes:
        config: The run configuration
        dt: Time step used
        n_steps: Steps taken
        times: Record times
        snapshots: States at the record times
        reports: Energy reports at the record times
        boundary: Γ(t) = ℏ + ω(t, ℏ)
        max_abs_v: max_j |v_j|
        mass_rel_err: Relative Eulerian mass error
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    config: RunConfig
    dt: float
    n_steps: int
    times: np.ndarray
    snapshots: List[State1D]
    reports: List[EnergyReport]
    boundary: np.ndarray
    max_abs_v: np.ndarray
    mass_rel_err: np.ndarray

    @property
    def e_total(self) -> np.ndarray:
        return np.array([report.e_total for report in self.reports])

    @property
    def final(self) -> State1D:
        return self.snapshots[-1]


class PointwiseSummary(BaseModel):
    """
    Pointwise ratios over the fit window and the last record.

    The density ratio follows the oscillation of the slowest mode, so its
    minimum can come close to zero; max/median is the spread to look at.
    """
    model_config = ConfigDict(frozen=True)

    final: PointwiseRatios
    density_max: float
    density_min: float
    density_median: float
    boundary_max: float


class SimulationSummary(BaseModel):
    """
    Contents of ``summary.json``.

    ``envelope_max`` is max E(t)/(C·e^{−δt}) over the fit window.
    """
    model_config = ConfigDict(frozen=True)

    name: str
    model: str
    scheme: str = "flux"
    n_cells: int
    spacing: str
    gamma: float
    g: float
    total_mass: float
    dt: float
    n_steps: int
    t_final: float
    n_records: int
    e0: float
    e_final: float
    boundary_final: float
    max_abs_v_final: float
    mass_rel_err_final: float
    decay_fit: Optional[DecayFit] = None
    envelope_max: Optional[float] = None
    pointwise: Optional[PointwiseSummary] = None


class DecayFitReport(BaseModel):
    """Contents of ``decay.json``."""
    model_config = ConfigDict(frozen=True)

    source: str
    column: str
    fit: DecayFit


class IdentityReport(BaseModel):
    """
    Contents of ``identities.json``.

    Attributes:
        seed: Seed of the random field family
        dims: Dimensions checked
        n_samples: Random samples per dimension
        n_points: Grid points per dimension
        tolerance: Gate for exactness-class residuals
        residuals: Max residual per check, keyed ``<check>_<n>d``
        orders: Measured dt-orders of the order-class checks
        curl_transport: max|w(T) − e^{−T}w(0)|
        failures: Checks that missed their gate
        passed: No failures
    """
    model_config = ConfigDict(frozen=True)

    seed: int
    dims: List[int]
    n_samples: int
    n_points: int
    tolerance: float
    residuals: Dict[str, float]
    orders: Dict[str, float]
    curl_transport: float
    failures: List[str]
    passed: bool


class ConvergenceReport(BaseModel):
    """
    Contents of ``convergence.json``.

    ``differences[q][k]`` is the max difference of quantity q between level k
    and the finest level, on the interior nodes of the coarsest grid;
    ``orders[q][k] = log2(d_k / d_{k+1})``.
    """
    model_config = ConfigDict(frozen=True)

    name: str
    n_cells: List[int]
    dt: List[float]
    t_final: float
    differences: Dict[str, List[float]]
    orders: Dict[str, List[float]]
    min_order: Optional[float] = None
    passed: bool


class DarcyReport(BaseModel):
    """Contents of ``darcy.json``."""
    model_config = ConfigDict(frozen=True)

    name: str
    n_cells: int
    times: List[float]
    deviation: List[float]
    t_early: float
    t_late: float
    deviation_early: float
    deviation_late: float
    ratio: float
    max_ratio: Optional[float] = None
    passed: bool
