"""Tests for the bending energy and its gradient."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.energy.bending import (
    InadmissibleStateError,
    density,
    dU_dK,
    dU_dW,
    gradient,
    inadmissible_nodes,
    total_energy,
)
from src.models import MaterialParams
from tests.conftest import circle_profile, make_profile, smooth_profile

UNREG = MaterialParams(A=1.0, epsilon=0.0)

curvature = st.floats(min_value=0.05, max_value=20.0).flatmap(
    lambda k: st.sampled_from([k, -k])
)
torsion = st.floats(min_value=-20.0, max_value=20.0)
scale = st.floats(min_value=0.1, max_value=10.0)
stiffness = st.floats(min_value=0.1, max_value=10.0)


@given(K=curvature, W=torsion, lam=scale, A=stiffness)
def test_density_is_degree_two_homogeneous(K: float, W: float, lam: float, A: float) -> None:
    params = MaterialParams(A=A)
    base = float(density(K, W, params))
    scaled = float(density(lam * K, lam * W, params))
    assert scaled == pytest.approx(lam * lam * base, rel=1e-12)


@given(K=curvature, W=torsion, A=stiffness)
def test_density_bounded_below_by_bending(K: float, W: float, A: float) -> None:
    params = MaterialParams(A=A)
    assert float(density(K, W, params)) >= A * K * K * (1.0 - 1e-12)


@given(K=curvature, W=torsion)
def test_density_even_in_torsion(K: float, W: float) -> None:
    assert float(density(K, W, UNREG)) == float(density(K, -W, UNREG))


@given(K=curvature, W=torsion, eps=st.floats(min_value=1e-6, max_value=1.0))
def test_regularization_lowers_density(K: float, W: float, eps: float) -> None:
    regular = MaterialParams(epsilon=eps)
    assert float(density(K, W, regular)) <= float(density(K, W, UNREG))


@settings(max_examples=50)
@given(K=curvature, W=torsion, eps=st.sampled_from([0.0, 1e-3, 0.1, 1.0]))
def test_partials_match_central_differences(K: float, W: float, eps: float) -> None:
    params = MaterialParams(A=1.3, epsilon=eps)
    dk = 1e-6 * max(1.0, abs(K))
    dw = 1e-6 * max(1.0, abs(W))
    fd_k = (density(K + dk, W, params) - density(K - dk, W, params)) / (2.0 * dk)
    fd_w = (density(K, W + dw, params) - density(K, W - dw, params)) / (2.0 * dw)
    scale_k = max(1.0, abs(float(fd_k)), float(density(K, W, params)) / abs(K))
    assert abs(float(dU_dK(K, W, params)) - float(fd_k)) <= 1e-5 * scale_k
    assert float(dU_dW(K, W, params)) == pytest.approx(float(fd_w), rel=1e-5, abs=1e-5)


def test_density_limits_at_zero_curvature() -> None:
    assert float(density(0.0, 0.0, UNREG)) == 0.0
    assert float(density(0.0, 1.0, UNREG)) == math.inf
    assert float(density(0.0, 1.0, MaterialParams(epsilon=0.5))) == pytest.approx(4.0)


def test_closed_form_moments() -> None:
    K, W = 2.0, 1.0
    assert float(dU_dW(K, W, UNREG)) == pytest.approx(4.0 * W * (K**2 + W**2) / K**2)
    assert float(dU_dK(K, W, UNREG)) == pytest.approx(2.0 * (K**4 - W**4) / K**3)


def test_circle_energy() -> None:
    for length in (1.0, 2.0 * math.pi, 10.0):
        profile = circle_profile(32, length)
        params = MaterialParams(A=2.5)
        expected = 4.0 * math.pi**2 * 2.5 / length
        assert total_energy(profile, params) == pytest.approx(expected, rel=1e-12)


def test_gradient_scales_with_h_and_stacks_k_first() -> None:
    profile = smooth_profile(40)
    grad = gradient(profile, UNREG)
    assert np.allclose(grad.dE_dK, profile.h * dU_dK(profile.K, profile.W, UNREG))
    assert np.allclose(grad.as_vector()[40:], grad.dE_dW)
    assert grad.total == pytest.approx(total_energy(profile, UNREG))


def test_gradient_refuses_zero_curvature_without_regularization() -> None:
    K = np.ones(16)
    K[[3, 7]] = 0.0
    profile = make_profile(K, 0.0)
    assert inadmissible_nodes(profile, UNREG) == [3, 7]
    with pytest.raises(InadmissibleStateError) as exc_info:
        gradient(profile, UNREG)
    assert exc_info.value.nodes == [3, 7]


def test_regularized_gradient_is_finite_at_zero_curvature() -> None:
    K = np.ones(16)
    K[3] = 0.0
    profile = make_profile(K, 0.5)
    params = MaterialParams(epsilon=0.1)
    assert inadmissible_nodes(profile, params) == []
    assert np.all(np.isfinite(gradient(profile, params).as_vector()))
