"""Closure constraints and their Jacobian with respect to the (K, W) nodes.

The constraint vector is g = (x(L) - x(0), log(R_target^T R(L))) with node 0
pinned at the origin with the identity frame. Variables are ordered
(K_0..K_{n-1}, W_0..W_{n-1}).

Adjoint path: perturbing the step rate w_k by d rotates every later frame
by v_k = F_{k+1} J_r(h w_k) h d (world axis) and shifts x_{k+1} by the
midpoint half-step term, so each column is a closed-form product and the full
Jacobian costs O(n).
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from src.geometry.models import CurvatureTwistProfile
from src.geometry.so3 import hat, right_jacobian, right_jacobian_inv
from src.geometry.transport import TransportState, closure_gaps, transport
from src.solver.config import SolverConfigError
from src.solver.models import JacobianMethod, SolverConfig

logger = logging.getLogger(__name__)

FD_STEP = 1e-7


@dataclass(frozen=True)
class ConstraintJacobian:
    """Dense 6 x 2n Jacobian of the closure gaps at one profile."""

    matrix: np.ndarray
    gaps: np.ndarray
    method: JacobianMethod

    def vjp(self, weights: np.ndarray) -> np.ndarray:
        return self.matrix.T @ weights

    def jvp(self, direction: np.ndarray) -> np.ndarray:
        return self.matrix @ direction


def worker_count() -> int:
    """Thread cap from BAND_THREADS; unset or 0 means serial."""
    raw = os.environ.get("BAND_THREADS", "0").strip() or "0"
    try:
        threads = int(raw)
    except ValueError as exc:
        raise SolverConfigError("BAND_THREADS", f"expected an integer, got {raw!r}") from exc
    if threads < 0:
        raise SolverConfigError("BAND_THREADS", f"must be ≥ 0, got {threads}")
    return threads


def closure_state(
    K: np.ndarray, W: np.ndarray, h: float, moebius: bool
) -> tuple[np.ndarray, TransportState]:
    state = transport(K, W, h, moebius=moebius)
    gaps = closure_gaps(
        state.positions[0], state.frames[0], state.positions[-1], state.frames[-1], moebius
    )
    return gaps, state


def adjoint_jacobian(
    state: TransportState, gaps: np.ndarray, h: float, moebius: bool = False
) -> np.ndarray:
    """Jacobian from a finished transport; see module docstring."""
    n = state.rates.shape[0]
    frames_next = state.frames[1:]  # F_{k+1}
    x_end = state.positions[-1]
    F_end = state.frames[-1]
    full = h * right_jacobian(h * state.rates)  # (n,3,3)
    half = 0.5 * h * right_jacobian(0.5 * h * state.rates)

    rotation = frames_next @ full  # world rotation per unit d
    lever = hat(x_end - state.positions[1:])  # [x_end - x_{k+1}]x
    mid_tangent = hat(state.mid_frames[:, :, 0])
    d_position = -lever @ rotation - h * mid_tangent @ (state.mid_frames @ half)
    d_frame = right_jacobian_inv(gaps[3:]) @ F_end.T @ rotation

    per_step = np.concatenate([d_position, d_frame], axis=1)  # (n, 6, 3)
    # step rate k averages nodes k and k+1; step n-1 sees K_0 across the seam
    previous = np.roll(per_step, 1, axis=0)
    if moebius:
        previous[0, :, 2] *= -1.0
    per_node = 0.5 * (per_step + previous)
    jac = np.empty((6, 2 * n))
    jac[:, :n] = per_node[:, :, 2].T
    jac[:, n:] = per_node[:, :, 0].T
    return jac


def finite_difference_jacobian(
    profile: CurvatureTwistProfile,
    moebius: bool,
    step: float = FD_STEP,
    central: bool = False,
    threads: int | None = None,
) -> np.ndarray:
    """Forward (or central) differences over all 2n directions."""
    n, h = profile.n_nodes, profile.h
    x = np.concatenate([profile.K, profile.W])
    base, _ = closure_state(profile.K, profile.W, h, moebius)
    scale = max(1.0, float(np.max(np.abs(x))))
    delta = step * scale

    def evaluate(vec: np.ndarray) -> np.ndarray:
        gaps, _ = closure_state(vec[:n], vec[n:], h, moebius)
        return gaps

    def column(i: int) -> np.ndarray:
        plus = x.copy()
        plus[i] += delta
        if not central:
            return (evaluate(plus) - base) / delta
        minus = x.copy()
        minus[i] -= delta
        return (evaluate(plus) - evaluate(minus)) / (2.0 * delta)

    workers = worker_count() if threads is None else threads
    if workers > 0:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            columns = list(pool.map(column, range(2 * n)))
    else:
        columns = [column(i) for i in range(2 * n)]
    return np.column_stack(columns)


def gradient_of_constraints(
    profile: CurvatureTwistProfile, config: SolverConfig
) -> ConstraintJacobian:
    gaps, state = closure_state(profile.K, profile.W, profile.h, config.moebius)
    if config.jacobian is JacobianMethod.FINITE_DIFFERENCE:
        matrix = finite_difference_jacobian(profile, config.moebius)
    else:
        matrix = adjoint_jacobian(state, gaps, profile.h, config.moebius)
    return ConstraintJacobian(matrix=matrix, gaps=gaps, method=config.jacobian)
