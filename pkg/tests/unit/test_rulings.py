"""Tests for generator directions and the display band."""

from __future__ import annotations

import numpy as np
import pytest

from src.geometry.models import ProfileError
from src.geometry.rulings import band_surface, closes_crosswise, generator_angles, generator_field
from src.geometry.transport import reconstruct
from src.solver.initial import analytic_moebius
from tests.conftest import TWO_PI, circle_curve, circle_profile, make_profile, smooth_profile


def test_circle_generators_are_binormals() -> None:
    curve = circle_curve(32)
    rulings = generator_field(circle_profile(32), curve)
    assert np.allclose(rulings.directions, curve.binormals, atol=1e-15)
    assert not rulings.flat_points.any()


def test_generator_angle_equals_atan_of_twist_ratio() -> None:
    profile = make_profile(np.full(32, 1.0), 1.0)
    curve = reconstruct(profile)
    angles = generator_angles(generator_field(profile, curve), curve)
    assert np.allclose(angles, 45.0, atol=1e-10)


def test_generators_are_unit_and_oriented_with_binormal() -> None:
    phase = TWO_PI * np.arange(64) / 64
    profile = make_profile(np.cos(phase) + 0.1, np.sin(2.0 * phase))
    curve = reconstruct(profile)
    rulings = generator_field(profile, curve)
    assert np.allclose(np.linalg.norm(rulings.directions, axis=1), 1.0, atol=1e-12)
    assert np.all(np.einsum("ij,ij->i", rulings.directions, curve.binormals) >= 0.0)


def test_flat_point_falls_back_to_binormal() -> None:
    K = np.ones(32)
    W = np.zeros(32)
    K[5] = 0.0
    profile = make_profile(K, W)
    curve = reconstruct(profile)
    rulings = generator_field(profile, curve)
    assert rulings.flat_points.tolist() == [i == 5 for i in range(32)]
    assert np.array_equal(rulings.directions[5], curve.binormals[5])


def test_node_count_mismatch() -> None:
    with pytest.raises(ProfileError, match="nodes"):
        generator_field(circle_profile(16), circle_curve(32))


def test_band_edges_are_width_apart() -> None:
    profile = smooth_profile(48)
    curve = reconstruct(profile)
    edge_a, edge_b = band_surface(curve, profile, 0.1)
    assert edge_a.shape == (49, 3)
    assert np.allclose(np.linalg.norm(edge_a - edge_b, axis=1), 0.2)


def test_band_rejects_non_positive_width() -> None:
    profile = circle_profile(16)
    with pytest.raises(ValueError, match="half-width"):
        band_surface(reconstruct(profile), profile, 0.0)


def test_crosswise_closure() -> None:
    assert not closes_crosswise(circle_curve(32))
    moebius = reconstruct(analytic_moebius(128, TWO_PI))
    assert closes_crosswise(moebius)
