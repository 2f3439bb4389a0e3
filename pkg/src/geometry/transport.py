"""Frenet-Serret frame transport and midline reconstruction.

Frames are 3x3 matrices whose columns are (t, n, b) with b = t x n. The
Frenet-Serret equations dt/ds = K n, dn/ds = -K t + W b, db/ds = -W n say the
frame rotates about the Darboux vector W t + K b, i.e. with body-frame angular
velocity (W, 0, K). One grid step is the exact rotation exp(h (W, 0, K)) with
(K, W) sampled at the step midpoint, which is second order and keeps frames
orthonormal by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.geometry.models import CurvatureTwistProfile, FramedCurve, InvalidFrameError
from src.geometry.so3 import expm, logm, orthonormality_error, orthonormalize
from src.models import ClosureResidual

INPUT_FRAME_TOLERANCE = 1e-8

# half turn about the tangent: (t, n, b) -> (t, -n, -b)
HALF_TWIST = np.diag([1.0, -1.0, -1.0])


def _check_frame(frame: np.ndarray) -> np.ndarray:
    frame = np.asarray(frame, dtype=float)
    err = orthonormality_error(frame)
    if err > INPUT_FRAME_TOLERANCE:
        raise InvalidFrameError(err, INPUT_FRAME_TOLERANCE)
    return frame


def _polish(frame: np.ndarray) -> np.ndarray:
    # one Newton step of the polar decomposition; exact enough for near-rotations
    return 1.5 * frame - 0.5 * frame @ frame.T @ frame


def darboux_step(K: float, W: float, h: float, frame: np.ndarray) -> np.ndarray:
    """Advance a frame by arclength h under constant curvature K and torsion W."""
    if not h > 0.0:
        raise ValueError(f"Step length must be > 0, got {h}")
    frame = _check_frame(frame)
    if K == 0.0 and W == 0.0:
        return frame.copy()
    stepped = frame @ expm(h * np.array([W, 0.0, K]))
    return orthonormalize(stepped)


def seam_shift(values: np.ndarray, step: int, sign: float = 1.0) -> np.ndarray:
    """values[i + step] with wrapped indices; wrapped entries are multiplied by sign.

    sign is -1 for fields that change sign across the seam (K under half-twist
    closure and every n or b component derived from it).
    """
    shifted = np.roll(values, -step, axis=0)
    if sign != 1.0 and step != 0:
        wrapped = slice(-step, None) if step > 0 else slice(None, -step)
        shifted[wrapped] *= sign
    return shifted


def midpoint_rates(K: np.ndarray, W: np.ndarray, moebius: bool = False) -> np.ndarray:
    """Body angular velocities (W, 0, K) at step midpoints j + 1/2.

    The last step averages node n - 1 with node 0 carried across the seam.
    """
    rates = np.zeros((K.size, 3))
    rates[:, 0] = 0.5 * (W + seam_shift(W, 1))
    rates[:, 2] = 0.5 * (K + seam_shift(K, 1, -1.0 if moebius else 1.0))
    return rates


@dataclass(frozen=True)
class TransportState:
    """Raw transport result: n + 1 nodes (the last one is the closing node)."""

    positions: np.ndarray  # (n+1, 3)
    frames: np.ndarray  # (n+1, 3, 3)
    mid_frames: np.ndarray  # (n, 3, 3)
    rates: np.ndarray  # (n, 3)
    steps: np.ndarray  # (n, 3, 3) full-step rotations


def transport(
    K: np.ndarray,
    W: np.ndarray,
    h: float,
    initial_position: np.ndarray | None = None,
    initial_frame: np.ndarray | None = None,
    moebius: bool = False,
) -> TransportState:
    n = K.size
    rates = midpoint_rates(K, W, moebius)
    steps = expm(h * rates)
    halves = expm(0.5 * h * rates)
    positions = np.empty((n + 1, 3))
    frames = np.empty((n + 1, 3, 3))
    mid_frames = np.empty((n, 3, 3))
    positions[0] = np.zeros(3) if initial_position is None else initial_position
    frames[0] = np.eye(3) if initial_frame is None else initial_frame
    for j in range(n):
        mid = frames[j] @ halves[j]
        mid_frames[j] = mid
        positions[j + 1] = positions[j] + h * mid[:, 0]
        frames[j + 1] = _polish(frames[j] @ steps[j])
    return TransportState(positions, frames, mid_frames, rates, steps)


def reconstruct(
    profile: CurvatureTwistProfile,
    initial_position: np.ndarray | None = None,
    initial_frame: np.ndarray | None = None,
) -> FramedCurve:
    """Integrate the Frenet-Serret equations from node 0.

    The result is unique up to the rigid motion fixed by the initial state.
    """
    x0 = np.zeros(3) if initial_position is None else np.asarray(initial_position, dtype=float)
    f0 = np.eye(3) if initial_frame is None else _check_frame(initial_frame)
    state = transport(profile.K, profile.W, profile.h, x0, f0, profile.moebius)
    n = profile.n_nodes
    return FramedCurve(
        positions=state.positions[:n],
        frames=state.frames[:n],
        length=profile.length,
        closing_position=state.positions[n],
        closing_frame=state.frames[n],
    )


def closure_target(initial_frame: np.ndarray, moebius: bool) -> np.ndarray:
    """Frame the transport must return to after one circuit."""
    return initial_frame @ HALF_TWIST if moebius else np.array(initial_frame, dtype=float)


def closure_gaps(
    positions0: np.ndarray,
    frame0: np.ndarray,
    positionL: np.ndarray,
    frameL: np.ndarray,
    moebius: bool,
) -> np.ndarray:
    """6-vector (position gap, frame gap as rotation vector)."""
    target = closure_target(frame0, moebius)
    gap = np.empty(6)
    gap[:3] = positionL - positions0
    gap[3:] = logm(target.T @ frameL)
    return gap


def closure(curve: FramedCurve, moebius: bool) -> ClosureResidual:
    """Mismatch between the closing state and the (possibly half-twisted) start."""
    gap = closure_gaps(
        curve.positions[0], curve.frames[0], curve.closing_position, curve.closing_frame, moebius
    )
    return ClosureResidual(
        position_gap=(float(gap[0]), float(gap[1]), float(gap[2])),
        frame_gap=(float(gap[3]), float(gap[4]), float(gap[5])),
    )
