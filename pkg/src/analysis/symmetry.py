"""Half-turn (C2) symmetry axis of a closed midline.

A rotation by pi about the unit axis a through the centroid maps q to
(2 a a^T - I) q. The mismatch for an axis is the RMS distance between the
rotated nodes and the original nodes under the best cyclic re-indexing, with
both orientations tried and half-step shifts matched against edge midpoints.
All cyclic shifts are scored at once through FFT correlations.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.optimize import minimize

from src.analysis.models import AxisCrossing, SymmetryAxis
from src.geometry.models import FramedCurve

logger = logging.getLogger(__name__)

GRID_SIZE = 400
# other axes within this mismatch (relative to the diameter) make the fit degenerate
DEGENERACY_TOLERANCE = 0.01
DEGENERACY_ANGLE = np.radians(10.0)


def _half_turn(direction: np.ndarray) -> np.ndarray:
    return 2.0 * np.outer(direction, direction) - np.eye(3)


def _correlations(a: np.ndarray, b: np.ndarray, reverse: bool) -> np.ndarray:
    """sum_i a_i . b_{k+i} (forward) or sum_i a_i . b_{k-i} (reverse) for every k."""
    fa = np.fft.fft(a, axis=0)
    fb = np.fft.fft(b, axis=0)
    spectrum = fa * fb if reverse else np.conj(fa) * fb
    return np.real(np.fft.ifft(spectrum, axis=0)).sum(axis=1)


class _Matcher:
    """Mean squared mismatch of a centred node set against its half-turn images."""

    def __init__(self, points: np.ndarray) -> None:
        self.q = points - points.mean(axis=0)
        self.mid = 0.5 * (self.q + np.roll(self.q, -1, axis=0))
        self.q_norm = float(np.sum(self.q * self.q))
        self.mid_norm = float(np.sum(self.mid * self.mid))

    def score(self, direction: np.ndarray) -> tuple[float, bool]:
        """(mean squared mismatch, best match reverses orientation)."""
        rotated = self.q @ _half_turn(direction)  # symmetric rotation
        n = self.q.shape[0]
        best, reverse_best = np.inf, True
        for target, norm in ((self.q, self.q_norm), (self.mid, self.mid_norm)):
            for reverse in (True, False):
                corr = float(np.max(_correlations(rotated, target, reverse)))
                mse = (self.q_norm + norm - 2.0 * corr) / n
                if mse < best:
                    best, reverse_best = mse, reverse
        return max(best, 0.0), reverse_best


def _sphere_grid(count: int) -> np.ndarray:
    """Fibonacci points on the upper hemisphere; a and -a give the same half turn."""
    k = np.arange(count) + 0.5
    z = 1.0 - k / count
    r = np.sqrt(1.0 - z * z)
    theta = np.pi * (1.0 + np.sqrt(5.0)) * k
    return np.column_stack([r * np.cos(theta), r * np.sin(theta), z])


def _tangent_basis(direction: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    helper = np.eye(3)[int(np.argmin(np.abs(direction)))]
    e1 = np.cross(direction, helper)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(direction, e1)


def fit_point_symmetry(points: np.ndarray) -> SymmetryAxis:
    """Best half-turn axis of a closed polygon given as an (n, 3) node array."""
    points = np.asarray(points, dtype=float)
    matcher = _Matcher(points)
    centroid = points.mean(axis=0)
    diameter = float(2.0 * np.max(np.linalg.norm(matcher.q, axis=1)))

    grid = _sphere_grid(GRID_SIZE)
    scores = np.array([matcher.score(a)[0] for a in grid])
    start = grid[int(np.argmin(scores))]
    e1, e2 = _tangent_basis(start)

    def direction(uv: np.ndarray) -> np.ndarray:
        a = start + uv[0] * e1 + uv[1] * e2
        return a / np.linalg.norm(a)

    result = minimize(
        lambda uv: matcher.score(direction(uv))[0],
        np.zeros(2),
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-18, "maxiter": 4000, "initial_simplex":
                 np.array([[0.0, 0.0], [0.05, 0.0], [0.0, 0.05]])},
    )
    best = direction(result.x)
    mse, reverse = matcher.score(best)
    rms = float(np.sqrt(mse))

    grid_rms = np.sqrt(np.maximum(scores, 0.0))
    rivals = (grid_rms <= rms + DEGENERACY_TOLERANCE * diameter) & (
        np.abs(grid @ best) < np.cos(DEGENERACY_ANGLE)
    )
    degenerate = bool(np.any(rivals))
    logger.info("Symmetry axis %s: rms=%.3e (%.3g%% of diameter)%s",
                np.round(best, 6), rms, 100.0 * rms / diameter if diameter else 0.0,
                ", degenerate" if degenerate else "")
    return SymmetryAxis(
        point=(float(centroid[0]), float(centroid[1]), float(centroid[2])),
        direction=(float(best[0]), float(best[1]), float(best[2])),
        rms=rms,
        diameter=diameter,
        reversed=reverse,
        degenerate=degenerate,
    )


def fit_symmetry_axis(curve: FramedCurve) -> SymmetryAxis:
    return fit_point_symmetry(curve.positions)


def axis_crossing(curve: FramedCurve, axis: SymmetryAxis, pairs: int = 2) -> AxisCrossing:
    """Where the axis meets the midline with the binormal along the axis.

    A half-turn symmetric closed curve meets its axis twice; of the `pairs`
    closest local minima of the node-to-axis distance the one with the largest
    |b . axis| is returned, its position refined by a parabola.
    """
    point = np.array(axis.point)
    a = np.array(axis.direction)
    rel = curve.positions - point
    dist = np.linalg.norm(rel - np.outer(rel @ a, a), axis=1)
    n, h = curve.n_nodes, curve.h
    local = np.flatnonzero((dist <= np.roll(dist, 1)) & (dist <= np.roll(dist, -1)))
    nearest = local[np.argsort(dist[local])][:pairs]
    alignment = np.abs(curve.binormals[nearest] @ a)
    i = int(nearest[int(np.argmax(alignment))])

    lo, mid, hi = dist[(i - 1) % n], dist[i], dist[(i + 1) % n]
    curvature = lo - 2.0 * mid + hi
    offset = float(np.clip(0.5 * (lo - hi) / curvature, -0.5, 0.5)) if curvature > 0.0 else 0.0
    return AxisCrossing(
        s=((i + offset) * h) % curve.length,
        index=i,
        distance=float(mid),
        alignment=float(abs(curve.binormals[i] @ a)),
    )
