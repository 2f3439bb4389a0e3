"""Tests for initial profiles."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from src.geometry.transport import closure, reconstruct
from src.solver.config import SolverConfigError
from src.solver.initial import analytic_moebius, initialize, perturbed_circle
from src.solver.models import InitMode
from src.tables.formats import write_profile
from tests.conftest import TWO_PI, make_config, smooth_profile


class TestPerturbedCircle:
    def test_zero_amplitude_is_exact_circle(self) -> None:
        profile = perturbed_circle(32, 3.0, amplitude=0.0, seed=5)
        assert np.allclose(profile.K, TWO_PI / 3.0)
        assert np.array_equal(profile.W, np.zeros(32))

    def test_seed_is_reproducible(self) -> None:
        a = perturbed_circle(32, TWO_PI, 0.1, seed=7)
        b = perturbed_circle(32, TWO_PI, 0.1, seed=7)
        c = perturbed_circle(32, TWO_PI, 0.1, seed=8)
        assert np.array_equal(a.K, b.K)
        assert not np.array_equal(a.K, c.K)

    def test_noise_has_zero_mean(self) -> None:
        profile = perturbed_circle(64, TWO_PI, 0.1, seed=1)
        assert np.mean(profile.K) == pytest.approx(1.0, abs=1e-12)


class TestAnalyticMoebius:
    def test_shape(self) -> None:
        profile = analytic_moebius(64, 5.0)
        assert profile.n_nodes == 64
        assert profile.length == 5.0
        assert np.all(np.isfinite(profile.K)) and np.all(np.isfinite(profile.W))

    def test_nearly_closes_with_half_twist(self) -> None:
        profile = analytic_moebius(128, TWO_PI)
        assert profile.moebius
        curve = reconstruct(profile)
        twisted = closure(curve, moebius=True)
        plain = closure(curve, moebius=False)
        assert twisted.frame_norm < 0.2
        assert plain.frame_norm > 2.0
        assert twisted.position_norm < 0.2


class TestInitialize:
    def test_clamp_twist_zeroes_torsion(self) -> None:
        profile = initialize(make_config(init_amplitude=0.2, clamp_twist=True))
        assert np.array_equal(profile.W, np.zeros(32))

    def test_modes(self) -> None:
        circle = initialize(make_config(clamp_twist=False))
        assert circle.n_nodes == 32
        moebius = initialize(make_config(init_mode=InitMode.ANALYTIC_MOEBIUS, clamp_twist=False))
        assert moebius.n_nodes == 32
        assert not np.array_equal(circle.K, moebius.K)

    def test_closure_flag_follows_config(self) -> None:
        plain = initialize(make_config(init_mode=InitMode.ANALYTIC_MOEBIUS, clamp_twist=False))
        twisted = initialize(make_config(moebius=True, clamp_twist=False))
        assert not plain.moebius
        assert twisted.moebius

    def test_from_file_resamples(self, tmp_path: Path) -> None:
        path = write_profile(tmp_path / "p.csv", smooth_profile(64))
        config = make_config(init_mode=InitMode.FROM_FILE, init_file=str(path), clamp_twist=False)
        profile = initialize(config)
        assert profile.n_nodes == 32
        assert np.allclose(profile.K, smooth_profile(64).K[::2], atol=1e-12)

    def test_from_file_length_mismatch(self, tmp_path: Path) -> None:
        path = write_profile(tmp_path / "p.csv", smooth_profile(32, length=3.0))
        config = make_config(init_mode=InitMode.FROM_FILE, init_file=str(path))
        with pytest.raises(SolverConfigError, match="length"):
            initialize(config)

    def test_from_file_malformed(self, tmp_path: Path) -> None:
        path = tmp_path / "p.csv"
        path.write_text(f"# length: {math.tau!r}\ns,K,W\n0,1,0\n0.1,1\n")
        config = make_config(init_mode=InitMode.FROM_FILE, init_file=str(path))
        with pytest.raises(SolverConfigError) as exc_info:
            initialize(config)
        assert exc_info.value.line == 4
