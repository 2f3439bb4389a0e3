"""Geometry containers: sampled curvature/torsion fields and framed midlines.

Both containers hold read-only numpy arrays and are safe to share between
threads once built.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from src.geometry.so3 import orthonormality_error

MIN_NODES = 8
FRAME_TOLERANCE = 1e-10


class ProfileError(ValueError):
    """Raised when a profile or curve violates its shape invariants."""


class CenterlineFormatError(ProfileError):
    """Raised when a centerline table cannot be parsed."""

    def __init__(self, path: str, line: int, reason: str) -> None:
        super().__init__(f"{path}:{line}: {reason}")
        self.path = path
        self.line = line


class InvalidFrameError(ValueError):
    """Raised when a frame is not a proper rotation within tolerance."""

    def __init__(self, error: float, tolerance: float, node: int | None = None) -> None:
        where = f" at node {node}" if node is not None else ""
        super().__init__(
            f"Frame{where} is not orthonormal: deviation {error:.3e} > {tolerance:.1e}"
        )
        self.error = error
        self.node = node


def _frozen(values: object, shape: tuple[int, ...] | None = None) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if shape is not None and arr.shape != shape:
        raise ProfileError(f"Expected array of shape {shape}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CurvatureTwistProfile:
    """Curvature K(s) and torsion W(s) on a uniform arclength grid.

    Node i sits at s_i = i * h with h = length / n_nodes; index arithmetic wraps.
    W is periodic. Under half-twist closure (`moebius`) the principal normal
    comes back reversed, so K(s + L) = -K(s).
    `flagged` lists nodes whose torsion was interpolated because K fell below
    the extraction floor.
    """

    K: np.ndarray
    W: np.ndarray
    length: float
    flagged: tuple[int, ...] = field(default=())
    moebius: bool = False

    def __post_init__(self) -> None:
        K = _frozen(self.K)
        W = _frozen(self.W)
        if K.ndim != 1 or W.shape != K.shape:
            raise ProfileError(f"K and W must be 1-d of equal size, got {K.shape} and {W.shape}")
        if K.size < MIN_NODES:
            raise ProfileError(f"n_nodes must be ≥ {MIN_NODES}, got {K.size}")
        if not (np.isfinite(self.length) and self.length > 0.0):
            raise ProfileError(f"length must be > 0, got {self.length}")
        if not (np.all(np.isfinite(K)) and np.all(np.isfinite(W))):
            raise ProfileError("K and W must be finite")
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "length", float(self.length))
        object.__setattr__(self, "flagged", tuple(int(i) for i in self.flagged))
        object.__setattr__(self, "moebius", bool(self.moebius))

    @property
    def n_nodes(self) -> int:
        return int(self.K.size)

    @property
    def h(self) -> float:
        return self.length / self.n_nodes

    @property
    def s(self) -> np.ndarray:
        return np.arange(self.n_nodes) * self.h

    @property
    def seam_sign(self) -> float:
        """Factor carrying K across s = L back to s = 0."""
        return -1.0 if self.moebius else 1.0

    def with_fields(self, K: np.ndarray, W: np.ndarray) -> CurvatureTwistProfile:
        return CurvatureTwistProfile(K=K, W=W, length=self.length, moebius=self.moebius)


@dataclass(frozen=True, eq=False)
class FramedCurve:
    """Midline nodes with their Frenet frames (columns t, n, b).

    `closing_position` / `closing_frame` hold the state transported one step
    past the last node, i.e. x(L) and R(L).
    """

    positions: np.ndarray
    frames: np.ndarray
    length: float
    closing_position: np.ndarray
    closing_frame: np.ndarray

    def __post_init__(self) -> None:
        positions = _frozen(self.positions)
        frames = _frozen(self.frames)
        n = positions.shape[0]
        if positions.shape != (n, 3) or frames.shape != (n, 3, 3):
            raise ProfileError(
                "positions (n,3) and frames (n,3,3) required, "
                f"got {positions.shape}, {frames.shape}"
            )
        if n < MIN_NODES:
            raise ProfileError(f"n_nodes must be ≥ {MIN_NODES}, got {n}")
        if not self.length > 0.0:
            raise ProfileError(f"length must be > 0, got {self.length}")
        closing_position = _frozen(self.closing_position, (3,))
        closing_frame = _frozen(self.closing_frame, (3, 3))
        for i, frame in enumerate(frames):
            err = orthonormality_error(frame)
            if err > FRAME_TOLERANCE:
                raise InvalidFrameError(err, FRAME_TOLERANCE, node=i)
        err = orthonormality_error(closing_frame)
        if err > FRAME_TOLERANCE:
            raise InvalidFrameError(err, FRAME_TOLERANCE, node=n)
        h = self.length / n
        chain = np.vstack([positions, closing_position[None, :]])
        steps = np.linalg.norm(np.diff(chain, axis=0), axis=1)
        tolerance = FRAME_TOLERANCE * max(1.0, self.length)
        if np.max(np.abs(steps - h)) > tolerance:
            raise ProfileError(
                f"Node spacing deviates from h={h:.6g} by {np.max(np.abs(steps - h)):.3e}"
            )
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "length", float(self.length))
        object.__setattr__(self, "closing_position", closing_position)
        object.__setattr__(self, "closing_frame", closing_frame)

    @property
    def n_nodes(self) -> int:
        return int(self.positions.shape[0])

    @property
    def h(self) -> float:
        return self.length / self.n_nodes

    @property
    def tangents(self) -> np.ndarray:
        return self.frames[:, :, 0]

    @property
    def normals(self) -> np.ndarray:
        return self.frames[:, :, 1]

    @property
    def binormals(self) -> np.ndarray:
        return self.frames[:, :, 2]
