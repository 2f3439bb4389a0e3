"""Constitutive moments and internal forces of a band in equilibrium.

With U the energy density and q = W (K^2 + W^2) / K^2:

    Mt = dU/dW = 4 A q          Mb = dU/dK
    Mn = (1/K) dMt/ds           N  = -(1/K) dU/ds
    B  = 2 W U / K + dMn/ds     T  = A C - U

Derivatives are centered differences continued across the seam. Under
half-twist closure the n and b components (N, B, Mn, Mb) change sign there
while T, Mt, U and q do not. The regularized evaluation replaces 1/K by
K / (K^2 + eps^2) and uses the regularized density throughout, so Mt and Mb
coincide with the energy gradient of the same epsilon.
"""

from __future__ import annotations

import logging

import numpy as np

from src.energy.bending import dU_dK, density
from src.geometry.extract import default_k_floor
from src.geometry.models import CurvatureTwistProfile
from src.geometry.transport import seam_shift
from src.models import MaterialParams
from src.statics.models import StaticFields

logger = logging.getLogger(__name__)


class SingularCurvatureError(ValueError):
    """Raised when unregularized fields are requested at nodes with K below the floor."""

    def __init__(self, nodes: list[int], floor: float) -> None:
        shown = ", ".join(str(i) for i in nodes[:10])
        super().__init__(
            f"|K| < {floor:.3g} at nodes {shown}; request regularized evaluation"
        )
        self.nodes = nodes
        self.floor = floor


class DegenerateFitError(ValueError):
    """Raised when the integration constant C is not determined by the data."""


def central_difference(values: np.ndarray, h: float, sign: float = 1.0) -> np.ndarray:
    return (seam_shift(values, 1, sign) - seam_shift(values, -1, sign)) / (2.0 * h)


def effective_params(
    profile: CurvatureTwistProfile,
    params: MaterialParams,
    regularized: bool,
    k_floor: float | None = None,
) -> MaterialParams:
    """Material parameters the field formulas are evaluated with.

    Unregularized evaluation drops epsilon and refuses nodes with |K| below the
    floor. Regularized evaluation keeps epsilon, or uses the floor when epsilon
    is zero.
    """
    floor = default_k_floor(profile.h) if k_floor is None else k_floor
    if not regularized:
        bad = [int(i) for i in np.flatnonzero(np.abs(profile.K) < floor)]
        if bad:
            raise SingularCurvatureError(bad, floor)
        return MaterialParams(A=params.A, epsilon=0.0)
    if params.epsilon > 0.0:
        return params
    return MaterialParams(A=params.A, epsilon=floor)


def _inverse_K(K: np.ndarray, epsilon: float) -> np.ndarray:
    return K / (K * K + epsilon * epsilon)


def _twist_ratio(K: np.ndarray, W: np.ndarray, epsilon: float) -> np.ndarray:
    return W * (K * K + W * W) / (K * K + epsilon * epsilon)


def _moments(profile: CurvatureTwistProfile, eff: MaterialParams) -> tuple[np.ndarray, np.ndarray]:
    Mt = 4.0 * eff.A * _twist_ratio(profile.K, profile.W, eff.epsilon)
    return Mt, dU_dK(profile.K, profile.W, eff)


def _normal_force(profile: CurvatureTwistProfile, eff: MaterialParams) -> np.ndarray:
    U = density(profile.K, profile.W, eff)
    return -_inverse_K(profile.K, eff.epsilon) * central_difference(U, profile.h)


def _normal_moment(profile: CurvatureTwistProfile, eff: MaterialParams) -> np.ndarray:
    q = _twist_ratio(profile.K, profile.W, eff.epsilon)
    return 4.0 * eff.A * _inverse_K(profile.K, eff.epsilon) * central_difference(q, profile.h)


def _binormal_force(profile: CurvatureTwistProfile, eff: MaterialParams) -> np.ndarray:
    U = density(profile.K, profile.W, eff)
    first = 2.0 * profile.W * U * _inverse_K(profile.K, eff.epsilon)
    dMn = central_difference(_normal_moment(profile, eff), profile.h, profile.seam_sign)
    return first + dMn


def constitutive_moments(
    profile: CurvatureTwistProfile,
    params: MaterialParams,
    regularized: bool = False,
    k_floor: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """(Mt, Mb): twisting and bending moments, the partials of U."""
    return _moments(profile, effective_params(profile, params, regularized, k_floor))


def field_N(
    profile: CurvatureTwistProfile,
    params: MaterialParams,
    regularized: bool = False,
    k_floor: float | None = None,
) -> np.ndarray:
    return _normal_force(profile, effective_params(profile, params, regularized, k_floor))


def field_Mn(
    profile: CurvatureTwistProfile,
    params: MaterialParams,
    regularized: bool = False,
    k_floor: float | None = None,
) -> np.ndarray:
    return _normal_moment(profile, effective_params(profile, params, regularized, k_floor))


def field_B(
    profile: CurvatureTwistProfile,
    params: MaterialParams,
    regularized: bool = False,
    k_floor: float | None = None,
) -> np.ndarray:
    return _binormal_force(profile, effective_params(profile, params, regularized, k_floor))


def field_T(profile: CurvatureTwistProfile, params: MaterialParams, C: float) -> np.ndarray:
    """Tension T = A C - U; C is the integration constant of the tangential balance."""
    return params.A * C - density(profile.K, profile.W, params)


def _fit_C(
    profile: CurvatureTwistProfile,
    eff: MaterialParams,
    keep: np.ndarray,
    floor: float,
) -> float:
    K, W, h = profile.K, profile.W, profile.h
    U = density(K, W, eff)
    dN = central_difference(_normal_force(profile, eff), h, profile.seam_sign)
    offset = -K * U + dN - W * _binormal_force(profile, eff)
    weight = float(np.sum(K[keep] ** 2))
    if not weight > int(np.sum(keep)) * floor**2:
        raise DegenerateFitError(
            "Integration constant C is undetermined: curvature vanishes on the fitted nodes"
        )
    return float(-np.sum(K[keep] * offset[keep]) / (eff.A * weight))


def fit_C(
    profile: CurvatureTwistProfile,
    params: MaterialParams,
    regularized: bool = False,
    mask: np.ndarray | None = None,
    k_floor: float | None = None,
) -> float:
    """Least-squares C for K T + dN/ds - W B = 0 over the unmasked nodes.

    The residual is affine in C, r = A C K + c, so C = -sum(K c) / (A sum(K^2)).
    """
    floor = default_k_floor(profile.h) if k_floor is None else k_floor
    keep = np.ones(profile.n_nodes, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    if not np.any(keep):
        raise DegenerateFitError("Integration constant C is undetermined: every node is masked")
    eff = effective_params(profile, params, regularized, floor)
    return _fit_C(profile, eff, keep, floor)


def evaluate_fields(
    profile: CurvatureTwistProfile,
    params: MaterialParams,
    C: float | None = None,
    regularized: bool = False,
    mask: np.ndarray | None = None,
    k_floor: float | None = None,
) -> StaticFields:
    """All six components; C is fitted over the unmasked nodes when not given."""
    floor = default_k_floor(profile.h) if k_floor is None else k_floor
    eff = effective_params(profile, params, regularized, floor)
    if C is None:
        keep = np.ones(profile.n_nodes, dtype=bool) if mask is None else np.asarray(mask, bool)
        C = _fit_C(profile, eff, keep, floor)
        logger.debug("Fitted integration constant C=%.12g", C)
    Mt, Mb = _moments(profile, eff)
    return StaticFields(
        T=field_T(profile, eff, C),
        N=_normal_force(profile, eff),
        B=_binormal_force(profile, eff),
        Mt=Mt,
        Mn=_normal_moment(profile, eff),
        Mb=Mb,
        C=float(C),
        epsilon=eff.epsilon,
    )
