"""Bending energy of a narrow developable band and its analytic gradient."""

from src.energy.bending import (
    EnergyGradient,
    InadmissibleStateError,
    density,
    gradient,
    total_energy,
)

__all__ = [
    "EnergyGradient",
    "InadmissibleStateError",
    "density",
    "gradient",
    "total_energy",
]
