"""Bending energy of an infinitely narrow developable band.

The density U = A (K^2 + W^2)^2 / K^2 is regularized as
U_eps = A (K^2 + W^2)^2 / (K^2 + eps^2), so it stays C^1 through K = 0 while
eps > 0. With eps = 0 the partial derivatives are the constitutive moments
dU/dW = 4 A W (K^2 + W^2) / K^2 and dU/dK = 2 A (K^4 - W^4) / K^3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from src.geometry.models import CurvatureTwistProfile
from src.models import MaterialParams


class InadmissibleStateError(ValueError):
    """Raised when the unregularized gradient is evaluated at K = 0."""

    def __init__(self, nodes: list[int]) -> None:
        shown = ", ".join(str(i) for i in nodes[:10])
        more = "" if len(nodes) <= 10 else f" (+{len(nodes) - 10} more)"
        super().__init__(
            f"Energy gradient undefined at K = 0 with epsilon = 0: nodes {shown}{more}"
        )
        self.nodes = nodes


@dataclass(frozen=True)
class EnergyGradient:
    dE_dK: np.ndarray
    dE_dW: np.ndarray
    total: float

    def as_vector(self) -> np.ndarray:
        """Stacked (dE/dK, dE/dW), the solver's variable ordering."""
        return np.concatenate([self.dE_dK, self.dE_dW])


def density(K: ArrayLike, W: ArrayLike, params: MaterialParams) -> np.ndarray:
    """Pointwise energy density; +inf marks K = 0, W != 0 when epsilon = 0."""
    K = np.asarray(K, dtype=float)
    W = np.asarray(W, dtype=float)
    square = K * K + W * W
    numerator = params.A * square * square
    denominator = K * K + params.epsilon**2
    with np.errstate(divide="ignore", invalid="ignore"):
        value = numerator / denominator
    # limit along K = W -> 0 is zero
    return np.where(denominator == 0.0, np.where(numerator == 0.0, 0.0, np.inf), value)


def dU_dW(K: ArrayLike, W: ArrayLike, params: MaterialParams) -> np.ndarray:
    K = np.asarray(K, dtype=float)
    W = np.asarray(W, dtype=float)
    denominator = K * K + params.epsilon**2
    return 4.0 * params.A * W * (K * K + W * W) / denominator


def dU_dK(K: ArrayLike, W: ArrayLike, params: MaterialParams) -> np.ndarray:
    K = np.asarray(K, dtype=float)
    W = np.asarray(W, dtype=float)
    eps2 = params.epsilon**2
    denominator = K * K + eps2
    return (
        2.0 * params.A * K * (K * K + W * W) * (K * K + 2.0 * eps2 - W * W)
        / (denominator * denominator)
    )


def total_energy(profile: CurvatureTwistProfile, params: MaterialParams) -> float:
    """Midpoint-rule integral h * sum(U_i)."""
    return float(profile.h * np.sum(density(profile.K, profile.W, params)))


def inadmissible_nodes(profile: CurvatureTwistProfile, params: MaterialParams) -> list[int]:
    if params.epsilon > 0.0:
        return []
    return [int(i) for i in np.flatnonzero(profile.K == 0.0)]


def gradient(profile: CurvatureTwistProfile, params: MaterialParams) -> EnergyGradient:
    """Exact partial derivatives of total_energy with respect to every K_i and W_i."""
    bad = inadmissible_nodes(profile, params)
    if bad:
        raise InadmissibleStateError(bad)
    h = profile.h
    return EnergyGradient(
        dE_dK=h * dU_dK(profile.K, profile.W, params),
        dE_dW=h * dU_dW(profile.K, profile.W, params),
        total=total_energy(profile, params),
    )
