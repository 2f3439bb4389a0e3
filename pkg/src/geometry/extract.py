"""Recover (K, W) fields from a framed curve by inverting the transport step."""

from __future__ import annotations

import logging

import numpy as np

from src.geometry.models import CurvatureTwistProfile, FramedCurve
from src.geometry.so3 import logm
from src.geometry.transport import seam_shift

logger = logging.getLogger(__name__)


def default_k_floor(h: float) -> float:
    return 1e-8 / h


def _fill_periodic(values: np.ndarray, bad: np.ndarray, length: float) -> np.ndarray:
    """Linear periodic interpolation of values[bad] from the good nodes."""
    n = values.size
    s = np.arange(n) * (length / n)
    good = ~bad
    if not np.any(good):
        return np.zeros_like(values)
    filled = values.copy()
    filled[bad] = np.interp(s[bad], s[good], values[good], period=length)
    return filled


def profile_from_frames(
    frames: np.ndarray,
    closing_frame: np.ndarray,
    length: float,
    k_floor: float | None = None,
    moebius: bool | None = None,
) -> CurvatureTwistProfile:
    """Turn consecutive frame rotations into node-centred (K, W).

    The relative rotation F_j^T F_{j+1} is exp(h (W, 0, K)) at the step
    midpoint: its b-component is the tangent turning angle, its t-component
    the binormal rotation. Node values average the two adjacent midpoints.
    Under half-twist closure the last step's curvature enters node 0 with its
    sign reversed. Left as None, `moebius` is read off the closing frame: a
    closing normal opposing node 0's marks half-twist closure.
    """
    n = frames.shape[0]
    h = length / n
    chain = np.concatenate([frames, closing_frame[None]], axis=0)
    relative = np.einsum("jki,jkl->jil", chain[:-1], chain[1:])
    rates = logm(relative) / h
    if moebius is None:
        moebius = bool(closing_frame[:, 1] @ frames[0][:, 1] < 0.0)
    sign = -1.0 if moebius else 1.0
    K = 0.5 * (rates[:, 2] + seam_shift(rates[:, 2], -1, sign))
    W = 0.5 * (rates[:, 0] + seam_shift(rates[:, 0], -1))

    floor = default_k_floor(h) if k_floor is None else k_floor
    straight = np.abs(K) < floor
    if np.any(straight):
        logger.warning(
            "Torsion ill-defined at %d of %d nodes (|K| < %.3g); interpolated",
            int(np.sum(straight)), n, floor,
        )
        W = _fill_periodic(W, straight, length)
    flagged = tuple(int(i) for i in np.flatnonzero(straight))
    return CurvatureTwistProfile(K=K, W=W, length=length, flagged=flagged, moebius=moebius)


def extract_profile(
    curve: FramedCurve, k_floor: float | None = None, moebius: bool | None = None
) -> CurvatureTwistProfile:
    return profile_from_frames(curve.frames, curve.closing_frame, curve.length, k_floor, moebius)


def interpolate_field(
    profile: CurvatureTwistProfile, values: np.ndarray, s: np.ndarray | float, odd: bool = False
) -> np.ndarray:
    """Linear interpolation of a node field at arclengths s, continued across the seam.

    `odd` marks fields that change sign there under half-twist closure, like K.
    """
    sign = profile.seam_sign if odd else 1.0
    grid = np.append(profile.s, profile.length)
    extended = np.append(values, sign * values[0])
    return np.interp(np.mod(s, profile.length), grid, extended)


def resample_profile(profile: CurvatureTwistProfile, n_nodes: int) -> CurvatureTwistProfile:
    """Linear interpolation onto a new uniform grid (warm starts)."""
    s_new = np.arange(n_nodes) * (profile.length / n_nodes)
    return CurvatureTwistProfile(
        K=interpolate_field(profile, profile.K, s_new, odd=True),
        W=interpolate_field(profile, profile.W, s_new),
        length=profile.length,
        moebius=profile.moebius,
    )


def mirror_profile(profile: CurvatureTwistProfile) -> CurvatureTwistProfile:
    """Mirror image of the band: torsion changes sign, curvature does not."""
    return profile.with_fields(profile.K, -profile.W)
