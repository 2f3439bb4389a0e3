"""Load an external centerline (x y z per line) as an arclength-uniform framed curve."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from src.geometry.extract import profile_from_frames
from src.geometry.models import (
    MIN_NODES,
    CenterlineFormatError,
    CurvatureTwistProfile,
    FramedCurve,
    ProfileError,
)
from src.geometry.so3 import orthonormalize
from src.geometry.transport import HALF_TWIST, reconstruct

logger = logging.getLogger(__name__)


def read_centerline(path: str | Path) -> np.ndarray:
    """Parse a whitespace table of points; '#' starts a comment line."""
    path = Path(path)
    if not path.exists():
        raise ProfileError(f"Centerline file not found: {path}")
    rows: list[list[float]] = []
    for line_num, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise CenterlineFormatError(
                str(path), line_num, f"expected 3 columns, got {len(parts)}"
            )
        try:
            point = [float(p) for p in parts]
        except ValueError as exc:
            raise CenterlineFormatError(str(path), line_num, str(exc)) from exc
        if not all(np.isfinite(point)):
            raise CenterlineFormatError(str(path), line_num, "non-finite coordinate")
        rows.append(point)
    points = np.array(rows, dtype=float).reshape(-1, 3)
    if points.shape[0] > 1 and np.allclose(points[0], points[-1]):
        points = points[:-1]
    if points.shape[0] < 4:
        raise ProfileError(f"Centerline needs at least 4 distinct points, got {points.shape[0]}")
    return points


def resample_closed(points: np.ndarray, n_nodes: int) -> tuple[np.ndarray, float]:
    """Uniform arclength samples of the closed polyline through `points`."""
    loop = np.vstack([points, points[:1]])
    chords = np.linalg.norm(np.diff(loop, axis=0), axis=1)
    cumulative = np.concatenate([[0.0], np.cumsum(chords)])
    length = float(cumulative[-1])
    if not length > 0.0:
        raise ProfileError("Centerline has zero length")
    s = np.arange(n_nodes) * (length / n_nodes)
    samples = np.column_stack([np.interp(s, cumulative, loop[:, k]) for k in range(3)])
    return samples, length


def _any_normal(t: np.ndarray) -> np.ndarray:
    trial = np.eye(3)[int(np.argmin(np.abs(t)))]
    v = np.cross(t, trial)
    return v / np.linalg.norm(v)


def discrete_frenet_frames(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Frenet frames of a closed sampled curve with binormal sign continuity.

    Returns (frames, closing_frame). The closing frame is node 0's frame with
    its binormal sign carried on from the last node, so a half-twisted curve
    closes on diag(1, -1, -1).
    """
    n = points.shape[0]
    prev = np.roll(points, 1, axis=0)
    nxt = np.roll(points, -1, axis=0)
    tangents = nxt - prev
    tangents /= np.linalg.norm(tangents, axis=1)[:, None]
    raw_b = np.cross(points - prev, nxt - points)
    sizes = np.linalg.norm(raw_b, axis=1)
    scale = float(np.mean(np.linalg.norm(nxt - points, axis=1))) ** 2
    bent = sizes > 1e-12 * scale

    if not np.any(bent):
        logger.warning("Centerline is straight everywhere; binormal chosen arbitrarily")
    first = int(np.argmax(bent)) if np.any(bent) else 0
    b = raw_b[first] / sizes[first] if bent[first] else _any_normal(tangents[0])

    frames = np.empty((n, 3, 3))
    previous = b
    for i in range(n):
        candidate = raw_b[i] / sizes[i] if bent[i] else previous
        if candidate @ previous < 0.0:
            candidate = -candidate
        t = tangents[i]
        candidate = candidate - (candidate @ t) * t
        candidate /= np.linalg.norm(candidate)
        frames[i] = orthonormalize(np.column_stack([t, np.cross(candidate, t), candidate]))
        previous = candidate

    closing = frames[0].copy()
    if frames[-1][:, 2] @ frames[0][:, 2] < 0.0:
        closing = closing @ HALF_TWIST
    return frames, closing


def centerline_profile(
    points: np.ndarray, n_nodes: int, k_floor: float | None = None
) -> tuple[CurvatureTwistProfile, np.ndarray, np.ndarray]:
    """(profile, first position, first frame) of a closed point sequence."""
    if n_nodes < MIN_NODES:
        raise ProfileError(f"n_nodes must be ≥ {MIN_NODES}, got {n_nodes}")
    samples, length = resample_closed(np.asarray(points, dtype=float), n_nodes)
    frames, closing = discrete_frenet_frames(samples)
    profile = profile_from_frames(frames, closing, length, k_floor)
    return profile, samples[0], frames[0]


def load_centerline(
    path: str | Path, n_nodes: int, k_floor: float | None = None
) -> FramedCurve:
    """Read, resample and re-integrate a centerline so curve invariants hold exactly."""
    profile, x0, f0 = centerline_profile(read_centerline(path), n_nodes, k_floor)
    logger.info("Loaded centerline %s: L=%.6g, n=%d", path, profile.length, n_nodes)
    return reconstruct(profile, x0, f0)
