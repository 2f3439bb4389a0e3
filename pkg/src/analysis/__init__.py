"""Post-processing of solved bands.

This module provides:
- The singular point X and the generator-angle limits around it
- Zeros of the torsion W
- The half-turn symmetry axis and where it meets the midline
- The flat triangle bounded by the generators next to X
"""

from src.analysis.models import (
    AnalysisReport,
    AxisCrossing,
    NearXValues,
    PhiLimit,
    SingularPoint,
    SymmetryAxis,
    TriangleSummary,
    WZeros,
)
from src.analysis.report import analyze, render_text, report_rows, triangle_report
from src.analysis.singular import (
    NoSingularPointError,
    WindowTooSmallError,
    count_w_zeros,
    find_singular_point,
    phi_field,
    phi_limit_at_X,
)
from src.analysis.symmetry import axis_crossing, fit_point_symmetry, fit_symmetry_axis

__all__ = [
    # Exceptions
    "NoSingularPointError",
    "WindowTooSmallError",
    # Components
    "analyze",
    "axis_crossing",
    "count_w_zeros",
    "find_singular_point",
    "fit_point_symmetry",
    "fit_symmetry_axis",
    "phi_field",
    "phi_limit_at_X",
    "render_text",
    "report_rows",
    "triangle_report",
    # Models
    "AnalysisReport",
    "AxisCrossing",
    "NearXValues",
    "PhiLimit",
    "SingularPoint",
    "SymmetryAxis",
    "TriangleSummary",
    "WZeros",
]
