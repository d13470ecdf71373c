"""
Export all physics modules for easy importing.
"""
from vacuumflow.physics import (
    discretization,
    energy,
    identities,
    model,
    solver1d,
    studies,
    weighted_calc,
)

__all__ = ["discretization", "energy", "identities", "model", "solver1d", "studies", "weighted_calc"]
