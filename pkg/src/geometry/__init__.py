"""Curve geometry for the band midline.

This module provides:
- Frenet-Serret frame transport and midline reconstruction
- (K, W) extraction from framed curves and external centerlines
- Closure residuals for orientable and half-twisted bands
- Rulings of the rectifying developable
"""

from src.geometry.extract import extract_profile, mirror_profile, resample_profile
from src.geometry.ingest import load_centerline
from src.geometry.models import (
    CenterlineFormatError,
    CurvatureTwistProfile,
    FramedCurve,
    InvalidFrameError,
    ProfileError,
)
from src.geometry.rulings import Rulings, band_surface, generator_field
from src.geometry.transport import closure, darboux_step, reconstruct

__all__ = [
    # Exceptions
    "CenterlineFormatError",
    "InvalidFrameError",
    "ProfileError",
    # Operations
    "band_surface",
    "closure",
    "darboux_step",
    "extract_profile",
    "generator_field",
    "load_centerline",
    "mirror_profile",
    "reconstruct",
    "resample_profile",
    # Models
    "CurvatureTwistProfile",
    "FramedCurve",
    "Rulings",
]
