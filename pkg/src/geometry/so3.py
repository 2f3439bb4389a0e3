"""Rotation-group helpers: hat map, exponential Jacobians, re-orthonormalization.

Batched functions accept a trailing axis of length 3 and broadcast over the rest.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.transform import Rotation

_SMALL_ANGLE = 1e-4


def hat(v: np.ndarray) -> np.ndarray:
    """Skew matrix [v]x so that hat(v) @ w == cross(v, w)."""
    v = np.asarray(v, dtype=float)
    out = np.zeros((*v.shape[:-1], 3, 3))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


def expm(rotvec: np.ndarray) -> np.ndarray:
    """Rotation matrices for rotation vectors (batched)."""
    rv = np.asarray(rotvec, dtype=float)
    mats = Rotation.from_rotvec(rv.reshape(-1, 3)).as_matrix()
    return mats.reshape(*rv.shape[:-1], 3, 3)


def logm(mats: np.ndarray) -> np.ndarray:
    """Rotation vectors (norm <= pi) of rotation matrices (batched)."""
    m = np.asarray(mats, dtype=float)
    rv = Rotation.from_matrix(m.reshape(-1, 3, 3)).as_rotvec()
    return rv.reshape(*m.shape[:-2], 3)


def right_jacobian(phi: np.ndarray) -> np.ndarray:
    """J_r with exp(phi + d) ~= exp(phi) exp(J_r(phi) d)."""
    phi = np.asarray(phi, dtype=float)
    theta = np.linalg.norm(phi, axis=-1)
    small = theta < _SMALL_ANGLE
    t = np.where(small, 1.0, theta)
    a = np.where(small, 0.5 - theta**2 / 24.0, (1.0 - np.cos(t)) / t**2)
    b = np.where(small, 1.0 / 6.0 - theta**2 / 120.0, (t - np.sin(t)) / t**3)
    h = hat(phi)
    eye = np.broadcast_to(np.eye(3), h.shape)
    return eye - a[..., None, None] * h + b[..., None, None] * (h @ h)


def right_jacobian_inv(phi: np.ndarray) -> np.ndarray:
    """Inverse of right_jacobian; finite up to and including theta = pi."""
    phi = np.asarray(phi, dtype=float)
    theta = np.linalg.norm(phi, axis=-1)
    small = theta < _SMALL_ANGLE
    t = np.where(small, 1.0, theta)
    half = 0.5 * t
    c = np.where(
        small,
        1.0 / 12.0 + theta**2 / 720.0,
        1.0 / t**2 - np.cos(half) / (2.0 * t * np.sin(half)),
    )
    h = hat(phi)
    eye = np.broadcast_to(np.eye(3), h.shape)
    return eye + 0.5 * h + c[..., None, None] * (h @ h)


def orthonormalize(frame: np.ndarray) -> np.ndarray:
    """Nearest rotation matrix (polar factor); keeps determinant +1."""
    u, _, vt = np.linalg.svd(frame)
    r = u @ vt
    if np.linalg.det(r) < 0.0:
        u[:, -1] = -u[:, -1]
        r = u @ vt
    return r


def orthonormality_error(frame: np.ndarray) -> float:
    frame = np.asarray(frame, dtype=float)
    if frame.shape != (3, 3) or not np.all(np.isfinite(frame)):
        return float("inf")
    err = float(np.max(np.abs(frame.T @ frame - np.eye(3))))
    return max(err, abs(float(np.linalg.det(frame)) - 1.0))
