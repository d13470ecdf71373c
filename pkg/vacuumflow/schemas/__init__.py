"""
Export all schemas for easy importing.
"""
from vacuumflow.schemas.params import GasParams
from vacuumflow.schemas.grid import CutoffPair, Grid1D, HardyFit
from vacuumflow.schemas.state import EulerianField, InitialData, RunConfig, State1D
from vacuumflow.schemas.energy import DecayFit, EnergyReport, PointwiseRatios
from vacuumflow.schemas.flow import FlowSample, TrigField
from vacuumflow.schemas.experiment import (
    ConvergenceReport,
    DarcyReport,
    DecayFitReport,
    ExperimentSpec,
    IdentityReport,
    PointwiseSummary,
    RunResult,
    SimulationSummary,
)

__all__ = [
    "GasParams",
    "Grid1D",
    "CutoffPair",
    "HardyFit",
    "State1D",
    "EulerianField",
    "InitialData",
    "RunConfig",
    "EnergyReport",
    "DecayFit",
    "PointwiseRatios",
    "FlowSample",
    "TrigField",
    "ExperimentSpec",
    "RunResult",
    "PointwiseSummary",
    "SimulationSummary",
    "DecayFitReport",
    "IdentityReport",
    "ConvergenceReport",
    "DarcyReport",
]
