"""Residuals of the six balance equations and the two reduced conditions.

Without external loads the force resultant is constant and the moment
balances the force couple:

    force_t:  dT/ds - K N            moment_t:  dMt/ds - K Mn
    force_n:  K T + dN/ds - W B      moment_n:  dMn/ds + K Mt - W Mb - B
    force_b:  W N + dB/ds            moment_b:  dMb/ds + W Mn + N

force_n and force_b are the reduced conditions (r23, r24); the other four hold
identically for fields built by src.statics.fields.
"""

from __future__ import annotations

import numpy as np

from src.geometry.models import CurvatureTwistProfile, ProfileError
from src.statics.fields import central_difference
from src.statics.models import BALANCE_EQUATIONS, EquilibriumResiduals, ResidualNorm, StaticFields


def window_mask(profile: CurvatureTwistProfile, s_center: float, fraction: float) -> np.ndarray:
    """True outside an arc window of length fraction * L centred on s_center."""
    if not 0.0 <= fraction < 1.0:
        raise ValueError(f"mask fraction must be in [0, 1), got {fraction}")
    L = profile.length
    offset = (profile.s - s_center + 0.5 * L) % L - 0.5 * L
    return np.abs(offset) > 0.5 * fraction * L


def _norm(values: np.ndarray, keep: np.ndarray) -> ResidualNorm:
    kept = values[keep]
    if kept.size == 0:
        return ResidualNorm(max=0.0, rms=0.0)
    return ResidualNorm(
        max=float(np.max(np.abs(kept))),
        rms=float(np.sqrt(np.mean(kept * kept))),
    )


def residuals(
    profile: CurvatureTwistProfile,
    fields: StaticFields,
    mask: np.ndarray | None = None,
) -> EquilibriumResiduals:
    n = profile.n_nodes
    if any(arr.shape != (n,) for arr in fields.rows().values()):
        raise ProfileError(f"Static fields do not match a profile of {n} nodes")
    keep = np.ones(n, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    K, W, h = profile.K, profile.W, profile.h
    T, N, B = fields.T, fields.N, fields.B
    Mt, Mn, Mb = fields.Mt, fields.Mn, fields.Mb

    def d(values: np.ndarray, odd: bool = False) -> np.ndarray:
        return central_difference(values, h, profile.seam_sign if odd else 1.0)

    r14 = (
        d(T) - K * N,
        K * T + d(N, odd=True) - W * B,
        W * N + d(B, odd=True),
        d(Mt) - K * Mn,
        d(Mn, odd=True) + K * Mt - W * Mb - B,
        d(Mb, odd=True) + W * Mn + N,
    )
    norms = {name: _norm(values, keep) for name, values in zip(BALANCE_EQUATIONS, r14, strict=True)}
    norms["r23"] = norms["force_n"]
    norms["r24"] = norms["force_b"]
    return EquilibriumResiduals(r23=r14[1], r24=r14[2], r14=r14, mask=keep, norms=norms)
