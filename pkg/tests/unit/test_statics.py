"""Tests for constitutive fields and equilibrium residuals."""

from __future__ import annotations

import numpy as np
import pytest

from src.energy.bending import dU_dK, dU_dW
from src.geometry.models import ProfileError
from src.models import MaterialParams
from src.statics.fields import (
    DegenerateFitError,
    SingularCurvatureError,
    central_difference,
    constitutive_moments,
    effective_params,
    evaluate_fields,
    field_B,
    field_Mn,
    field_N,
    fit_C,
)
from src.statics.models import BALANCE_EQUATIONS
from src.statics.residuals import residuals, window_mask
from tests.conftest import (
    TWO_PI,
    circle_profile,
    half_twist_profile,
    make_profile,
    singular_profile,
    smooth_profile,
)

PARAMS = MaterialParams(A=1.0, epsilon=0.0)


class TestFields:
    def test_moments_are_energy_partials(self) -> None:
        profile = smooth_profile(64)
        Mt, Mb = constitutive_moments(profile, PARAMS)
        assert np.allclose(Mt, dU_dW(profile.K, profile.W, PARAMS), rtol=1e-14)
        assert np.allclose(Mb, dU_dK(profile.K, profile.W, PARAMS), rtol=1e-14)

    def test_circle_fields(self) -> None:
        profile = circle_profile(32)
        fields = evaluate_fields(profile, PARAMS)
        assert fields.C == pytest.approx(1.0, rel=1e-12)
        assert np.allclose(fields.N, 0.0, atol=1e-12)
        assert np.allclose(fields.B, 0.0, atol=1e-12)
        assert np.allclose(fields.Mt, 0.0)
        assert np.allclose(fields.Mb, 2.0)
        assert np.allclose(fields.T, 0.0, atol=1e-12)

    def test_fitted_C_scales_with_stiffness(self) -> None:
        profile = smooth_profile(64)
        c1 = fit_C(profile, MaterialParams(A=1.0))
        c3 = fit_C(profile, MaterialParams(A=3.0))
        assert c3 == pytest.approx(c1, rel=1e-10)

    def test_single_field_helpers_match_bundle(self) -> None:
        profile = smooth_profile(64)
        fields = evaluate_fields(profile, PARAMS, C=0.5)
        assert fields.C == 0.5
        assert np.array_equal(field_N(profile, PARAMS), fields.N)
        assert np.array_equal(field_Mn(profile, PARAMS), fields.Mn)
        assert np.array_equal(field_B(profile, PARAMS), fields.B)

    def test_unregularized_refuses_zero_curvature(self) -> None:
        K = np.ones(32)
        K[4] = 0.0
        with pytest.raises(SingularCurvatureError) as exc_info:
            evaluate_fields(make_profile(K, 0.1), PARAMS)
        assert exc_info.value.nodes == [4]

    def test_regularized_fields_are_finite_at_X(self) -> None:
        profile = singular_profile(128, s_X=2.0 * np.pi * 10 / 128)
        fields = evaluate_fields(profile, PARAMS, regularized=True)
        for values in fields.rows().values():
            assert np.all(np.isfinite(values))
        assert fields.epsilon > 0.0

    def test_effective_params(self) -> None:
        profile = smooth_profile(32)
        assert effective_params(profile, MaterialParams(epsilon=0.3), False).epsilon == 0.0
        assert effective_params(profile, MaterialParams(epsilon=0.3), True).epsilon == 0.3
        assert effective_params(profile, PARAMS, True, k_floor=0.01).epsilon == 0.01

    def test_fit_undetermined_when_everything_masked(self) -> None:
        profile = smooth_profile(32)
        with pytest.raises(DegenerateFitError, match="masked"):
            fit_C(profile, PARAMS, mask=np.zeros(32, dtype=bool))

    def test_fit_undetermined_without_curvature(self) -> None:
        profile = make_profile(np.zeros(32), 0.0)
        with pytest.raises(DegenerateFitError, match="curvature"):
            fit_C(profile, PARAMS, regularized=True)


class TestResiduals:
    def test_identities_hold_to_rounding(self) -> None:
        profile = smooth_profile(128)
        res = residuals(profile, evaluate_fields(profile, PARAMS))
        for name in ("force_t", "moment_t", "moment_n"):
            assert res.norms[name].max < 1e-10

    def test_moment_b_identity_converges_at_second_order(self) -> None:
        errors = []
        for n in (64, 128):
            profile = smooth_profile(n)
            res = residuals(profile, evaluate_fields(profile, PARAMS))
            errors.append(res.norms["moment_b"].max)
        assert errors[0] / errors[1] >= 3.0

    def test_circle_is_in_equilibrium(self) -> None:
        profile = circle_profile(32)
        res = residuals(profile, evaluate_fields(profile, PARAMS))
        assert max(norm.max for norm in res.norms.values()) < 1e-10

    def test_reduced_conditions_alias_force_balances(self) -> None:
        profile = smooth_profile(64)
        res = residuals(profile, evaluate_fields(profile, PARAMS))
        assert np.array_equal(res.r23, res.r14[1])
        assert np.array_equal(res.r24, res.r14[2])
        assert res.norms["r23"] == res.norms["force_n"]
        assert res.conditions == ("force_n", "force_b")
        assert set(BALANCE_EQUATIONS) <= set(res.norms)

    def test_non_equilibrium_profile_has_residual(self) -> None:
        profile = smooth_profile(64)
        res = residuals(profile, evaluate_fields(profile, PARAMS))
        name, value = res.worst()
        assert name in res.norms
        assert value > 1e-3

    def test_mask_excludes_nodes_from_norms(self) -> None:
        profile = smooth_profile(32)
        fields = evaluate_fields(profile, PARAMS)
        mask = np.zeros(32, dtype=bool)
        full = residuals(profile, fields)
        empty = residuals(profile, fields, mask)
        assert full.norms["force_n"].max > 0.0
        assert empty.norms["force_n"].max == 0.0
        assert empty.norms["force_n"].rms == 0.0

    def test_shape_mismatch(self) -> None:
        fields = evaluate_fields(smooth_profile(64), PARAMS)
        with pytest.raises(ProfileError):
            residuals(smooth_profile(32), fields)


class TestWindowMask:
    def test_masks_window_around_centre(self) -> None:
        profile = smooth_profile(32)
        mask = window_mask(profile, 0.0, 0.2)
        assert int(np.sum(~mask)) == 7
        assert not mask[0] and not mask[3] and not mask[-3]
        assert mask[4] and mask[-4]

    def test_zero_fraction_masks_nothing(self) -> None:
        mask = window_mask(smooth_profile(32), 0.1, 0.0)
        assert mask.all()

    @pytest.mark.parametrize("fraction", [-0.1, 1.0])
    def test_rejects_bad_fraction(self, fraction: float) -> None:
        with pytest.raises(ValueError, match="mask fraction"):
            window_mask(smooth_profile(32), 0.0, fraction)


class TestHalfTwistSeam:
    # parity of (force_t, force_n, force_b, moment_t, moment_n, moment_b)
    EQUATION_PARITY = (False, True, True, False, True, True)
    ODD_FIELDS = frozenset({"N", "B", "Mn", "Mb"})

    def test_difference_stencil_continues_across_the_seam(self) -> None:
        n = 128
        s = np.arange(n) * (TWO_PI / n)
        values = np.cos(0.5 * s)
        slope = central_difference(values, TWO_PI / n, sign=-1.0)
        assert np.allclose(slope, -0.5 * np.sin(0.5 * s), atol=1e-4)
        wrapped = central_difference(values, TWO_PI / n)
        assert abs(wrapped[0]) > 1.0

    def test_fields_follow_the_band_when_the_seam_moves(self) -> None:
        profile = half_twist_profile(64)
        m = 20
        moved = make_profile(
            np.r_[profile.K[m:], -profile.K[:m]],
            np.r_[profile.W[m:], profile.W[:m]],
            moebius=True,
        )
        parity = np.r_[np.ones(64 - m), -np.ones(m)]
        params = MaterialParams(A=1.0, epsilon=0.05)
        fields = evaluate_fields(profile, params, regularized=True)
        shifted = evaluate_fields(moved, params, regularized=True)
        assert shifted.C == pytest.approx(fields.C, rel=1e-10)
        for name, values in fields.rows().items():
            sign = parity if name in self.ODD_FIELDS else 1.0
            expected = sign * np.roll(values, -m)
            assert np.allclose(shifted.rows()[name], expected, rtol=1e-10, atol=1e-10), name

        before = residuals(profile, fields)
        after = residuals(moved, shifted)
        for odd, a, b in zip(self.EQUATION_PARITY, before.r14, after.r14, strict=True):
            sign = parity if odd else 1.0
            assert np.allclose(b, sign * np.roll(a, -m), rtol=1e-9, atol=1e-9)
