"""Initial (K, W) profiles for the solver."""

from __future__ import annotations

import dataclasses
import logging

import numpy as np
from scipy.integrate import cumulative_trapezoid

from src.geometry.extract import profile_from_frames, resample_profile
from src.geometry.models import CurvatureTwistProfile, ProfileError
from src.geometry.so3 import orthonormalize
from src.geometry.transport import HALF_TWIST
from src.solver.config import SolverConfigError
from src.solver.models import InitMode, SolverConfig
from src.tables.formats import TableFormatError, read_profile

logger = logging.getLogger(__name__)

# out-of-plane bulge of the analytic guess
MOEBIUS_BULGE = 0.5
_DENSE_FACTOR = 64


def _moebius_derivatives(u: np.ndarray, c: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """r', r'', r''' of r(u) = (sin u, c sin 2u, cos u - cos(2u) / 4).

    The curve is invariant under the half turn about z (u -> -u), has a single
    inflection at u = 0 and so carries exactly one half twist of its
    binormal over a period.
    """
    s1, c1 = np.sin(u), np.cos(u)
    s2, c2 = np.sin(2 * u), np.cos(2 * u)
    d1 = np.column_stack([c1, 2 * c * c2, -s1 + 0.5 * s2])
    d2 = np.column_stack([-s1, -4 * c * s2, -c1 + c2])
    d3 = np.column_stack([-c1, -8 * c * c2, s1 - 2 * s2])
    return d1, d2, d3


def _continuous_frames(u: np.ndarray, c: float) -> np.ndarray:
    d1, d2, d3 = _moebius_derivatives(u, c)
    t = d1 / np.linalg.norm(d1, axis=1)[:, None]
    raw = np.cross(d1, d2)
    sizes = np.linalg.norm(raw, axis=1)
    # at the inflection r'' vanishes; r' x r''' gives the limiting binormal
    flat = sizes < 1e-8 * np.linalg.norm(d1, axis=1) ** 3
    raw[flat] = np.cross(d1[flat], d3[flat])
    b = raw / np.linalg.norm(raw, axis=1)[:, None]
    frames = np.empty((u.size, 3, 3))
    previous = b[0]
    for i in range(u.size):
        bi = b[i] if b[i] @ previous >= 0.0 else -b[i]
        frames[i] = orthonormalize(np.column_stack([t[i], np.cross(bi, t[i]), bi]))
        previous = bi
    return frames


def analytic_moebius(
    n_nodes: int, length: float, k_floor: float | None = None
) -> CurvatureTwistProfile:
    """Profile of a smooth half-twisted closed curve, sampled at uniform arclength.

    The midline is not the round circle of the usual strip parametrization:
    a circle's Frenet frame comes back untwisted, so it cannot carry the half
    twist. The returned profile is marked for half-twist closure.
    """
    dense = np.linspace(0.0, 2.0 * np.pi, _DENSE_FACTOR * n_nodes + 1)
    d1, _, _ = _moebius_derivatives(dense, MOEBIUS_BULGE)
    arc = cumulative_trapezoid(np.linalg.norm(d1, axis=1), dense, initial=0.0)
    targets = np.arange(n_nodes) * (arc[-1] / n_nodes)
    u = np.interp(targets, arc, dense)
    frames = _continuous_frames(u, MOEBIUS_BULGE)
    closing = frames[0].copy()
    if frames[-1][:, 2] @ frames[0][:, 2] < 0.0:
        closing = closing @ HALF_TWIST
    return profile_from_frames(frames, closing, length, k_floor)


def perturbed_circle(
    n_nodes: int, length: float, amplitude: float, seed: int
) -> CurvatureTwistProfile:
    """Circle of circumference `length` with seeded low-mode noise in K and cos twist in W.

    With amplitude 0 this is the exact circle; under half-twist closure its
    frame gap is pi, which the solver has to repair.
    """
    rng = np.random.default_rng(seed)
    s = np.arange(n_nodes) * (length / n_nodes)
    phase = 2.0 * np.pi * s / length
    noise = np.zeros(n_nodes)
    for mode in (2, 3, 4):
        a, b = rng.standard_normal(2)
        noise += (a * np.cos(mode * phase) + b * np.sin(mode * phase)) / mode
    K = 2.0 * np.pi / length + amplitude * noise
    W = amplitude * np.cos(phase)
    return CurvatureTwistProfile(K=K, W=W, length=length)


def from_file(path: str, n_nodes: int, length: float) -> CurvatureTwistProfile:
    try:
        profile = read_profile(path)
    except TableFormatError as exc:
        raise SolverConfigError("init_file", str(exc), exc.line) from exc
    if not np.isclose(profile.length, length, rtol=1e-12, atol=0.0):
        raise SolverConfigError(
            "init_file", f"profile length {profile.length:.17g} differs from length {length:.17g}"
        )
    if profile.n_nodes != n_nodes:
        logger.info("Resampling %s from %d to %d nodes", path, profile.n_nodes, n_nodes)
        profile = resample_profile(profile, n_nodes)
    return profile


def initialize(config: SolverConfig) -> CurvatureTwistProfile:
    n, L = config.n_nodes, config.length
    if config.init_mode is InitMode.ANALYTIC_MOEBIUS:
        profile = analytic_moebius(n, L, config.k_floor)
    elif config.init_mode is InitMode.PERTURBED_CIRCLE:
        profile = perturbed_circle(n, L, config.init_amplitude, config.seed)
    elif config.init_mode is InitMode.FROM_FILE:
        if config.init_file is None:
            raise ProfileError("init_file is required when init_mode is from_file")
        profile = from_file(config.init_file, n, L)
    else:  # pragma: no cover
        raise SolverConfigError("init_mode", f"unsupported mode {config.init_mode}")
    profile = dataclasses.replace(profile, moebius=config.moebius)
    if config.clamp_twist:
        profile = profile.with_fields(profile.K, np.zeros(n))
    logger.info("Initial profile: mode=%s n=%d L=%.6g", config.init_mode.value, n, L)
    return profile
