"""Internal forces, moments and equilibrium residuals of the band."""

from src.statics.fields import (
    DegenerateFitError,
    SingularCurvatureError,
    constitutive_moments,
    evaluate_fields,
    field_B,
    field_Mn,
    field_N,
    field_T,
    fit_C,
)
from src.statics.models import EquilibriumResiduals, StaticFields
from src.statics.residuals import residuals, window_mask

__all__ = [
    "DegenerateFitError",
    "EquilibriumResiduals",
    "SingularCurvatureError",
    "StaticFields",
    "constitutive_moments",
    "evaluate_fields",
    "field_B",
    "field_Mn",
    "field_N",
    "field_T",
    "fit_C",
    "residuals",
    "window_mask",
]
