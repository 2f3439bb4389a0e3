"""Singular point X of the midline and the behaviour of K, W and phi around it.

At X both the curvature K and the torsion W vanish. The generator angle
phi = atan(W / K) is undefined there but has one-sided limits, which are
estimated by linear extrapolation from windows just outside a masked core.
"""

from __future__ import annotations

import logging

import numpy as np

from src.analysis.models import NearXValues, PhiLimit, SingularPoint, WZeros
from src.geometry.extract import interpolate_field
from src.geometry.models import CurvatureTwistProfile
from src.models import MaterialParams
from src.statics.fields import constitutive_moments

logger = logging.getLogger(__name__)

# K^2 + W^2 at X relative to its midline maximum
SINGULAR_THRESHOLD = 0.01
# local minima this close to the global one are reported as candidates
CANDIDATE_TOLERANCE = 1e-3
MIN_FIT_POINTS = 3


class NoSingularPointError(ValueError):
    """Raised when an operation needs X but the profile has none."""

    def __init__(self, value: float, max_value: float) -> None:
        super().__init__(
            f"No singular point: min(K^2+W^2)={value:.3e} exceeds "
            f"{SINGULAR_THRESHOLD:.0%} of its maximum {max_value:.3e}"
        )
        self.value = value
        self.max_value = max_value


class WindowTooSmallError(ValueError):
    """Raised when a fit window holds too few nodes; refine the grid."""

    def __init__(self, points: int, required: int) -> None:
        super().__init__(
            f"Fit window holds {points} nodes per side, {required} required; "
            "increase n_nodes or the window fraction"
        )
        self.points = points
        self.required = required


def periodic_offset(profile: CurvatureTwistProfile, s_center: float) -> np.ndarray:
    """Signed arclength from s_center to every node, wrapped to [-L/2, L/2)."""
    L = profile.length
    return (profile.s - s_center + 0.5 * L) % L - 0.5 * L


def _interp(
    profile: CurvatureTwistProfile, values: np.ndarray, s: float, odd: bool = False
) -> float:
    return float(interpolate_field(profile, values, s, odd))


def find_singular_point(profile: CurvatureTwistProfile) -> SingularPoint:
    """Grid minimum of K^2 + W^2, refined by a parabola through its neighbours."""
    m = profile.K**2 + profile.W**2
    n, h, L = profile.n_nodes, profile.h, profile.length
    i = int(np.argmin(m))
    lo, mid, hi = m[(i - 1) % n], m[i], m[(i + 1) % n]
    curvature = lo - 2.0 * mid + hi
    offset = 0.0
    if curvature > 0.0:
        offset = float(np.clip(0.5 * (lo - hi) / curvature, -0.5, 0.5))
    s_X = ((i + offset) * h) % L

    m_max = float(np.max(m))
    local = (m <= np.roll(m, 1)) & (m <= np.roll(m, -1))
    near = m <= mid + CANDIDATE_TOLERANCE * max(m_max - mid, 0.0)
    candidates = tuple(float(profile.s[j]) for j in np.flatnonzero(local & near))
    found = bool(mid <= SINGULAR_THRESHOLD * m_max) and m_max > 0.0
    if not found:
        logger.info("No singular point: min(K^2+W^2)=%.3e, max=%.3e", mid, m_max)
    elif len(candidates) > 1:
        logger.warning("Singular point is not unique: %d candidates", len(candidates))
    return SingularPoint(
        s_X=s_X,
        index=i,
        value=float(mid),
        max_value=m_max,
        K_at_X=_interp(profile, profile.K, s_X, odd=True),
        W_at_X=_interp(profile, profile.W, s_X),
        found=found,
        candidates=candidates,
    )


def phi_field(profile: CurvatureTwistProfile, signed: bool = False) -> np.ndarray:
    """Generator angle in degrees; NaN where K = W = 0.

    Unsigned: atan2(|W|, |K|) in [0, 90]. Signed: atan2(W, K).
    """
    K, W = profile.K, profile.W
    if signed:
        phi = np.degrees(np.arctan2(W, K))
    else:
        phi = np.degrees(np.arctan2(np.abs(W), np.abs(K)))
    return np.where((K == 0.0) & (W == 0.0), np.nan, phi)


def _require(singular: SingularPoint) -> None:
    if not singular.found:
        raise NoSingularPointError(singular.value, singular.max_value)


def _core_half_width(profile: CurvatureTwistProfile, mask_fraction: float) -> float:
    return 0.5 * mask_fraction * profile.length


def phi_limit_at_X(
    profile: CurvatureTwistProfile,
    singular: SingularPoint,
    mask_fraction: float = 0.02,
    window_fraction: float = 0.05,
    min_points: int = MIN_FIT_POINTS,
) -> PhiLimit:
    """Average of the left and right linear extrapolations of phi to s_X."""
    _require(singular)
    d = periodic_offset(profile, singular.s_X)
    phi = phi_field(profile)
    core = _core_half_width(profile, mask_fraction)
    reach = core + window_fraction * profile.length
    valid = np.isfinite(phi)
    sides = {
        "left": valid & (d < -core) & (d >= -reach),
        "right": valid & (d > core) & (d <= reach),
    }
    points = min(int(np.sum(sel)) for sel in sides.values())
    if points < min_points:
        raise WindowTooSmallError(points, min_points)
    limits = {}
    for side, sel in sides.items():
        slope, intercept = np.polyfit(d[sel], phi[sel], 1)
        limits[side] = float(intercept)
        logger.debug("phi %s fit: slope=%.4g deg/unit, limit=%.4f deg", side, slope, intercept)
    value = float(np.clip(0.5 * (limits["left"] + limits["right"]), 0.0, 90.0))
    return PhiLimit(
        value=value,
        left=limits["left"],
        right=limits["right"],
        spread=abs(limits["left"] - limits["right"]),
        points_per_side=points,
    )


def window_bounds(
    profile: CurvatureTwistProfile, s_X: float, mask_fraction: float
) -> tuple[int, int]:
    """Nearest nodes outside the core window on the left and on the right of s_X."""
    d = periodic_offset(profile, s_X)
    core = max(_core_half_width(profile, mask_fraction), 0.5 * profile.h)
    left = np.flatnonzero(d < -core)
    right = np.flatnonzero(d > core)
    return int(left[np.argmax(d[left])]), int(right[np.argmin(d[right])])


def near_x_values(
    profile: CurvatureTwistProfile,
    singular: SingularPoint,
    params: MaterialParams,
    mask_fraction: float = 0.02,
    k_floor: float | None = None,
) -> NearXValues:
    """phi and Mt at the window boundary nodes next to the values interpolated at X.

    Mt comes from the regularized constitutive law, so the at-X value stays finite.
    """
    _require(singular)
    left, right = window_bounds(profile, singular.s_X, mask_fraction)
    phi = phi_field(profile)
    Mt, _ = constitutive_moments(profile, params, regularized=True, k_floor=k_floor)
    K_X, W_X = singular.K_at_X, singular.W_at_X
    phi_X = float(np.degrees(np.arctan2(abs(W_X), abs(K_X)))) if (K_X or W_X) else float("nan")
    return NearXValues(
        phi_left=float(phi[left]),
        phi_right=float(phi[right]),
        phi_at_X=phi_X,
        Mt_left=float(Mt[left]),
        Mt_right=float(Mt[right]),
        Mt_at_X=_interp(profile, Mt, singular.s_X),
    )


def _zero_neighbour(W: np.ndarray, start: int, step: int) -> float:
    n = W.size
    for k in range(1, n):
        value = W[(start + step * k) % n]
        if value != 0.0:
            return float(value)
    return 0.0


def count_w_zeros(
    profile: CurvatureTwistProfile,
    singular: SingularPoint | None = None,
    mask_fraction: float = 0.02,
) -> WZeros:
    """Sign changes of W located by linear interpolation.

    A run of exact zeros counts once, at its first node; when W has the same
    sign on both sides of the run it is recorded as touching instead.

    W vanishes at X along with K. Given a found singular point, the zeros
    inside the core window around X are replaced by a single zero at s_X: a
    crossing when W changes sign across the window, touching otherwise. W is
    periodic, so the sign changes always come in pairs.
    """
    W, h, L = profile.W, profile.h, profile.length
    n = W.size
    if not np.any(W != 0.0):
        logger.warning("W vanishes identically; zero count is degenerate")
        return WZeros(degenerate=True)
    crossings: list[float] = []
    touching: list[float] = []
    for i in range(n):
        j = (i + 1) % n
        if W[i] == 0.0:
            if W[i - 1] == 0.0:
                continue
            before = _zero_neighbour(W, i, -1)
            after = _zero_neighbour(W, i, 1)
            (crossings if before * after < 0.0 else touching).append(float(profile.s[i]))
        elif W[i] * W[j] < 0.0:
            s = profile.s[i] + h * W[i] / (W[i] - W[j])
            crossings.append(float(s % L))

    at_X: float | None = None
    if singular is not None and singular.found:
        s_X = at_X = singular.s_X
        core = max(_core_half_width(profile, mask_fraction), h)

        def near_X(s: float) -> bool:
            return abs((s - s_X + 0.5 * L) % L - 0.5 * L) <= core

        absorbed = sum(near_X(s) for s in crossings)
        crossings = [s for s in crossings if not near_X(s)]
        touching = [s for s in touching if not near_X(s)]
        (crossings if absorbed % 2 else touching).append(s_X)
    return WZeros(
        crossings=tuple(sorted(crossings)),
        touching=tuple(sorted(touching)),
        at_X=at_X,
    )
