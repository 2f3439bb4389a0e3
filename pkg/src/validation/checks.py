"""The self-test battery run by `moebius-band validate`."""

from __future__ import annotations

import math
import tempfile
from pathlib import Path

import numpy as np

from src.energy import bending
from src.geometry.extract import extract_profile, mirror_profile
from src.geometry.models import CurvatureTwistProfile
from src.geometry.transport import closure, reconstruct
from src.models import MaterialParams
from src.solver.auglag import solve
from src.solver.constraints import (
    adjoint_jacobian,
    closure_state,
    finite_difference_jacobian,
)
from src.solver.initial import analytic_moebius
from src.solver.models import InitMode, PenaltyStage, SolverConfig
from src.statics.fields import evaluate_fields
from src.statics.residuals import residuals
from src.tables.formats import read_curve, read_profile, write_curve, write_profile
from src.validation.base import PropertyCheck


def random_profile(
    rng: np.random.Generator,
    n_nodes: int,
    length: float = 2.0 * math.pi,
    k_min: float = 0.5,
    amplitude: float = 0.3,
) -> CurvatureTwistProfile:
    """Smooth random periodic profile with K >= k_min (three Fourier modes each)."""
    phase = 2.0 * np.pi * np.arange(n_nodes) / n_nodes

    def series() -> np.ndarray:
        coeffs = rng.standard_normal((3, 2))
        return sum(
            (a * np.cos((m + 1) * phase) + b * np.sin((m + 1) * phase)) / (m + 1)
            for m, (a, b) in enumerate(coeffs)
        )

    K = series()
    K = k_min + amplitude * (K - K.min())
    W = amplitude * series()
    return CurvatureTwistProfile(K=K, W=W, length=length)


def smooth_profile(n_nodes: int, length: float = 2.0 * math.pi) -> CurvatureTwistProfile:
    phase = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    K = 1.0 + 0.3 * np.cos(phase) + 0.1 * np.sin(2.0 * phase)
    W = 0.4 * np.sin(phase) + 0.1 * np.cos(3.0 * phase)
    return CurvatureTwistProfile(K=K, W=W, length=length)


def circle_profile(n_nodes: int, length: float = 2.0 * math.pi) -> CurvatureTwistProfile:
    return CurvatureTwistProfile(
        K=np.full(n_nodes, 2.0 * math.pi / length), W=np.zeros(n_nodes), length=length
    )


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    scale = float(np.linalg.norm(b))
    return float(np.linalg.norm(a - b)) / (scale if scale > 0.0 else 1.0)


class EnergyGradientCheck(PropertyCheck):
    """Analytic gradient against central differences of each node's energy term."""

    id = "energy_gradient"
    name = "energy gradient matches central finite differences"

    def __init__(self, samples: int = 100, n_nodes: int = 64, tolerance: float = 1e-6) -> None:
        self.samples = samples
        self.n_nodes = n_nodes
        self.tolerance = tolerance

    def evaluate(self, rng: np.random.Generator) -> tuple[bool, str]:
        worst = 0.0
        for _ in range(self.samples):
            profile = random_profile(rng, self.n_nodes)
            params = MaterialParams(A=float(rng.uniform(0.5, 2.0)), epsilon=0.0)
            grad = bending.gradient(profile, params)
            K, W, h = profile.K, profile.W, profile.h
            dK = 1e-6 * np.maximum(1.0, np.abs(K))
            dW = 1e-6 * np.maximum(1.0, np.abs(W))
            # total energy is h * sum(U_i): coordinate i only moves term i
            fd_K = h * (bending.density(K + dK, W, params)
                        - bending.density(K - dK, W, params)) / (2.0 * dK)
            fd_W = h * (bending.density(K, W + dW, params)
                        - bending.density(K, W - dW, params)) / (2.0 * dW)
            worst = max(worst, _relative(grad.as_vector(), np.concatenate([fd_K, fd_W])))
        return worst <= self.tolerance, f"worst relative error {worst:.2e} over {self.samples}"


class ConstitutiveIdentityCheck(PropertyCheck):
    """dU/dW and dU/dK at epsilon = 0 against the closed-form moments."""

    id = "constitutive_identity"
    name = "energy partials equal the twisting and bending moments"

    def __init__(self, samples: int = 10_000, tolerance: float = 1e-12) -> None:
        self.samples = samples
        self.tolerance = tolerance

    def evaluate(self, rng: np.random.Generator) -> tuple[bool, str]:
        K = rng.uniform(-10.0, 10.0, self.samples)
        K = np.where(np.abs(K) < 1e-3, 1e-3 * np.sign(K + 0.5), K)
        W = rng.uniform(-10.0, 10.0, self.samples)
        A = float(rng.uniform(0.5, 2.0))
        params = MaterialParams(A=A, epsilon=0.0)
        twist = 4.0 * A * W * (K**2 + W**2) / K**2
        bend = 2.0 * A * (K**4 - W**4) / K**3
        bend_scale = 2.0 * A * (K**4 + W**4) / np.abs(K) ** 3
        err_w = np.abs(bending.dU_dW(K, W, params) - twist) / np.maximum(np.abs(twist), 1e-300)
        err_k = np.abs(bending.dU_dK(K, W, params) - bend) / bend_scale
        worst = float(max(np.max(np.where(twist == 0.0, 0.0, err_w)), np.max(err_k)))
        return worst <= self.tolerance, f"worst relative error {worst:.2e}"


class TableRoundTripCheck(PropertyCheck):
    id = "table_round_trip"
    name = "profile and curve tables read back bit-identical"

    def evaluate(self, rng: np.random.Generator) -> tuple[bool, str]:
        profile = random_profile(rng, 48)
        curve = reconstruct(profile)
        with tempfile.TemporaryDirectory() as tmp:
            back = read_profile(write_profile(Path(tmp) / "profile.csv", profile))
            curve_back = read_curve(write_curve(Path(tmp) / "curve.csv", curve))
        same_profile = (
            np.array_equal(back.K, profile.K)
            and np.array_equal(back.W, profile.W)
            and back.length == profile.length
            and back.moebius == profile.moebius
        )
        same_curve = (
            np.array_equal(curve_back.positions, curve.positions)
            and np.array_equal(curve_back.frames, curve.frames)
            and np.array_equal(curve_back.closing_frame, curve.closing_frame)
            and np.array_equal(curve_back.closing_position, curve.closing_position)
        )
        return same_profile and same_curve, f"profile={same_profile} curve={same_curve}"


class CircleClosureCheck(PropertyCheck):
    id = "circle_closure"
    name = "circle closes orientably and misses the half twist by pi"

    def evaluate(self, rng: np.random.Generator) -> tuple[bool, str]:
        worst_gap, worst_pi = 0.0, 0.0
        for n in (16, 64, 256):
            curve = reconstruct(circle_profile(n))
            worst_gap = max(worst_gap, closure(curve, moebius=False).norm)
            worst_pi = max(worst_pi, abs(closure(curve, moebius=True).frame_norm - math.pi))
        ok = worst_gap <= 1e-10 and worst_pi <= 1e-8
        return ok, f"orientable gap {worst_gap:.1e}, |frame gap - pi| {worst_pi:.1e}"


class AdjointJacobianCheck(PropertyCheck):
    """Adjoint closure Jacobian against central differences (the oracle).

    Random near-circles are checked under orientable closure and one perturbed
    analytic band under half-twist closure, where K wraps with reversed sign.
    """

    id = "adjoint_jacobian"
    name = "adjoint constraint Jacobian matches finite differences"

    def __init__(
        self,
        samples: int = 10,
        n_nodes: int = 32,
        tolerance: float = 1e-6,
        half_twist_tolerance: float = 1e-5,
    ) -> None:
        self.samples = samples
        self.n_nodes = n_nodes
        self.tolerance = tolerance
        self.half_twist_tolerance = half_twist_tolerance

    def evaluate(self, rng: np.random.Generator) -> tuple[bool, str]:
        worst = 0.0
        for _ in range(self.samples):
            # near-circle keeps the frame gap well away from pi
            profile = random_profile(rng, self.n_nodes, k_min=0.9, amplitude=0.05)
            gaps, state = closure_state(profile.K, profile.W, profile.h, moebius=False)
            adjoint = adjoint_jacobian(state, gaps, profile.h)
            oracle = finite_difference_jacobian(profile, False, step=1e-6, central=True, threads=0)
            worst = max(worst, _relative(adjoint, oracle))

        band = analytic_moebius(self.n_nodes, 2.0 * math.pi)
        # seam moved off the inflection so K is far from zero there
        m = self.n_nodes // 4
        noise = 0.01 * rng.standard_normal((2, self.n_nodes))
        K = np.concatenate([band.K[m:], -band.K[:m]]) + noise[0]
        W = np.concatenate([band.W[m:], band.W[:m]]) + noise[1]
        band = band.with_fields(K, W)
        gaps, state = closure_state(band.K, band.W, band.h, moebius=True)
        adjoint = adjoint_jacobian(state, gaps, band.h, moebius=True)
        oracle = finite_difference_jacobian(band, True, step=1e-6, central=True, threads=0)
        twisted = _relative(adjoint, oracle)
        ok = worst <= self.tolerance and twisted <= self.half_twist_tolerance
        return ok, (
            f"worst relative error {worst:.2e} over {self.samples}, half twist {twisted:.2e}"
        )


class MirrorCheck(PropertyCheck):
    id = "mirror_symmetry"
    name = "W -> -W keeps energy and closure, flips dE/dW"

    def evaluate(self, rng: np.random.Generator) -> tuple[bool, str]:
        profile = random_profile(rng, 64)
        mirrored = mirror_profile(profile)
        params = MaterialParams(A=1.0, epsilon=0.0)
        e0 = bending.total_energy(profile, params)
        e1 = bending.total_energy(mirrored, params)
        g0 = bending.gradient(profile, params)
        g1 = bending.gradient(mirrored, params)
        c0 = closure(reconstruct(profile), moebius=False)
        c1 = closure(reconstruct(mirrored), moebius=False)
        energy_ok = abs(e0 - e1) <= 1e-10 * abs(e0)
        grad_ok = np.allclose(g1.dE_dW, -g0.dE_dW, rtol=1e-12, atol=0.0) and np.allclose(
            g1.dE_dK, g0.dE_dK, rtol=1e-12, atol=0.0
        )
        closure_ok = abs(c0.norm - c1.norm) <= 1e-9 * max(1.0, c0.norm)
        ok = energy_ok and grad_ok and closure_ok
        return ok, f"dE={abs(e0 - e1):.1e} gradient={grad_ok} closure={closure_ok}"


class StaticsIdentityCheck(PropertyCheck):
    """force_t, moment_t and moment_n vanish to rounding; moment_b at second order."""

    id = "statics_identities"
    name = "balance identities hold for arbitrary smooth profiles"

    def evaluate(self, rng: np.random.Generator) -> tuple[bool, str]:
        params = MaterialParams(A=1.0, epsilon=0.0)
        exact = 0.0
        order_errors = []
        for n in (64, 128):
            profile = smooth_profile(n)
            res = residuals(profile, evaluate_fields(profile, params))
            exact = max(exact, *(res.norms[k].max for k in ("force_t", "moment_t", "moment_n")))
            order_errors.append(res.norms["moment_b"].max)
        ratio = order_errors[0] / order_errors[1] if order_errors[1] > 0.0 else math.inf
        ok = exact <= 1e-10 and ratio >= 3.0
        return ok, f"exact identities {exact:.1e}, moment_b refinement ratio {ratio:.2f}"


class RoundTripConvergenceCheck(PropertyCheck):
    id = "extract_round_trip"
    name = "extract(reconstruct(p)) converges to p at second order"
    quick = False

    def evaluate(self, rng: np.random.Generator) -> tuple[bool, str]:
        errors = []
        for n in (64, 128, 256):
            profile = smooth_profile(n)
            back = extract_profile(reconstruct(profile), moebius=profile.moebius)
            errors.append(max(np.max(np.abs(back.K - profile.K)),
                              np.max(np.abs(back.W - profile.W))))
        ratios = [errors[i] / errors[i + 1] for i in range(2)]
        return min(ratios) >= 3.0, "refinement ratios " + ", ".join(f"{r:.2f}" for r in ratios)


class CircleSolveCheck(PropertyCheck):
    """Orientable closure with W held at zero must relax to the round circle."""

    id = "circle_solve"
    name = "solver recovers the circle energy 4 pi^2 A / L"
    quick = False

    def evaluate(self, rng: np.random.Generator) -> tuple[bool, str]:
        config = SolverConfig(
            n_nodes=32,
            moebius=False,
            clamp_twist=True,
            init_mode=InitMode.PERTURBED_CIRCLE,
            init_amplitude=0.02,
            seed=int(rng.integers(0, 2**31)),
            epsilon_schedule=(0.0,),
            penalty_schedule=(PenaltyStage(mu=10.0, max_inner_iter=500),
                              PenaltyStage(mu=100.0, max_inner_iter=500)),
        )
        _, _, report = solve(config)
        expected = 4.0 * math.pi**2 * config.A / config.length
        error = abs(report.final_energy - expected) / expected
        ok = report.converged and error <= 1e-6
        return ok, f"relative energy error {error:.1e}, converged={report.converged}"


def default_checks() -> list[PropertyCheck]:
    return [
        EnergyGradientCheck(),
        ConstitutiveIdentityCheck(),
        TableRoundTripCheck(),
        CircleClosureCheck(),
        AdjointJacobianCheck(),
        MirrorCheck(),
        StaticsIdentityCheck(),
        RoundTripConvergenceCheck(),
        CircleSolveCheck(),
    ]
