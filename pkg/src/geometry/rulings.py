"""Rulings of the rectifying developable and the display band built on them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.geometry.extract import default_k_floor
from src.geometry.models import CurvatureTwistProfile, FramedCurve, ProfileError


@dataclass(frozen=True)
class Rulings:
    directions: np.ndarray  # (n, 3) unit generators
    flat_points: np.ndarray  # (n,) bool, K^2 + W^2 below floor^2


def generator_field(
    profile: CurvatureTwistProfile,
    curve: FramedCurve,
    floor: float | None = None,
) -> Rulings:
    """Unit generators along the Darboux direction W t + K b.

    The generator makes angle phi with b where tan(phi) = W / K. Directions are
    oriented so that g . b >= 0; at flat points (K and W both below the floor)
    the generator falls back to b.
    """
    if profile.n_nodes != curve.n_nodes:
        raise ProfileError(
            f"Profile has {profile.n_nodes} nodes but curve has {curve.n_nodes}"
        )
    floor = default_k_floor(profile.h) if floor is None else floor
    K, W = profile.K, profile.W
    sign = np.where(K < 0.0, -1.0, 1.0)
    rate = np.hypot(K, W)
    flat = rate < floor
    safe = np.where(flat, 1.0, rate)
    t = curve.tangents
    b = curve.binormals
    directions = ((sign * W / safe)[:, None] * t) + ((np.abs(K) / safe)[:, None] * b)
    directions[flat] = b[flat]
    return Rulings(directions=directions, flat_points=flat)


def generator_angles(rulings: Rulings, curve: FramedCurve) -> np.ndarray:
    """Signed angle (degrees) of each generator from b, measured towards t."""
    along_t = np.einsum("ij,ij->i", rulings.directions, curve.tangents)
    along_b = np.einsum("ij,ij->i", rulings.directions, curve.binormals)
    return np.degrees(np.arctan2(along_t, along_b))


def band_surface(
    curve: FramedCurve, profile: CurvatureTwistProfile, half_width: float
) -> tuple[np.ndarray, np.ndarray]:
    """Edge polylines x(s) +/- half_width * g(s) of the display band.

    Each edge has n + 1 rows; the last row is built on the closing state so a
    one-sided band shows its edges swapped there.
    """
    if not half_width > 0.0:
        raise ValueError(f"Band half-width must be > 0, got {half_width}")
    rulings = generator_field(profile, curve)
    # closing row: node 0 ruling, re-oriented so g . b >= 0 in the closing frame
    closing = -rulings.directions[0] if closes_crosswise(curve) else rulings.directions[0]
    directions = np.vstack([rulings.directions, closing[None]])
    centers = np.vstack([curve.positions, curve.closing_position[None]])
    offset = half_width * directions
    return centers + offset, centers - offset


def closes_crosswise(curve: FramedCurve) -> bool:
    """True when the band returns with b reversed (one-sided, Moebius closure)."""
    return float(curve.closing_frame[:, 2] @ curve.frames[0][:, 2]) < 0.0
