"""Tests for the augmented-Lagrangian solver."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import pytest

from src.journal.logger import RunJournal, validate_journal_chain
from src.solver.auglag import (
    AugmentedLagrangian,
    OuterIteration,
    minimize_inner,
    projected_gradient,
    solve,
)
from src.solver.models import PenaltyStage
from src.validation.checks import random_profile
from tests.conftest import circle_profile, make_config


def test_projected_gradient_removes_constraint_normals() -> None:
    rng = np.random.default_rng(0)
    jac = rng.standard_normal((6, 20))
    free = np.ones(20, dtype=bool)
    assert projected_gradient(jac.T @ rng.standard_normal(6), jac, free) < 1e-10
    tangent = rng.standard_normal(20)
    tangent -= jac.T @ np.linalg.lstsq(jac.T, tangent, rcond=None)[0]
    assert projected_gradient(tangent, jac, free) == pytest.approx(np.linalg.norm(tangent))


def test_projected_gradient_ignores_fixed_variables() -> None:
    jac = np.zeros((6, 4))
    grad = np.array([0.0, 5.0, 0.0, 5.0])
    free = np.array([True, False, True, False])
    assert projected_gradient(grad, jac, free) == 0.0


class TestObjective:
    def test_gradient_matches_central_differences(self) -> None:
        config = make_config(n_nodes=16, clamp_twist=False)
        problem = AugmentedLagrangian(config)
        problem.multipliers = np.linspace(-0.3, 0.3, 6)
        problem.mu = 10.0
        profile = random_profile(np.random.default_rng(3), 16, k_min=0.9, amplitude=0.05)
        x = np.concatenate([profile.K, profile.W])
        _, grad = problem(x)
        fd = np.empty_like(x)
        for i in range(x.size):
            step = np.zeros_like(x)
            step[i] = 1e-6
            fd[i] = (problem(x + step)[0] - problem(x - step)[0]) / 2e-6
        assert np.linalg.norm(grad - fd) / np.linalg.norm(fd) < 1e-6

    def test_clamped_twist_is_not_free(self) -> None:
        problem = AugmentedLagrangian(make_config(n_nodes=16, clamp_twist=True))
        assert problem.free[:16].all()
        assert not problem.free[16:].any()

    def test_inadmissible_states_are_infinite(self) -> None:
        problem = AugmentedLagrangian(make_config(n_nodes=16))
        K = np.ones(16)
        K[2] = 0.0
        with_twist = np.concatenate([K, np.full(16, 0.5)])
        without_twist = np.concatenate([K, np.zeros(16)])
        assert problem(with_twist)[0] == np.inf
        assert problem(without_twist)[0] == np.inf
        assert problem(np.full(32, np.nan))[0] == np.inf

    def test_profile_carries_closure(self) -> None:
        x = np.concatenate([np.ones(16), np.zeros(16)])
        assert AugmentedLagrangian(make_config(n_nodes=16, moebius=True)).profile(x).moebius
        assert not AugmentedLagrangian(make_config(n_nodes=16)).profile(x).moebius


class TestInnerMinimization:
    def test_clamped_twist_stays_zero(self) -> None:
        problem = AugmentedLagrangian(make_config(n_nodes=16, moebius=True, clamp_twist=True))
        profile = random_profile(np.random.default_rng(8), 16, k_min=0.9, amplitude=0.05)
        x0 = np.concatenate([profile.K, np.zeros(16)])
        result = minimize_inner(problem, x0, max_iter=20)
        assert np.array_equal(result.x[16:], np.zeros(16))
        assert not np.array_equal(result.x[:16], x0[:16])

    def test_history_starts_at_x0_and_decreases(self) -> None:
        problem = AugmentedLagrangian(make_config(n_nodes=16, clamp_twist=False))
        problem.mu = 10.0
        profile = random_profile(np.random.default_rng(9), 16, k_min=0.9, amplitude=0.05)
        x0 = np.concatenate([profile.K, profile.W])
        result = minimize_inner(problem, x0, max_iter=15)
        assert result.history[0] == problem(x0)[0]
        assert 1 <= result.iterations <= 15
        assert len(result.history) == result.iterations + 1
        assert all(b <= a for a, b in zip(result.history, result.history[1:], strict=False))
        assert result.history[-1] == pytest.approx(problem(result.x)[0], rel=1e-12)


def test_unconverged_run_reports_failure(tmp_path: Path) -> None:
    config = make_config(
        n_nodes=16,
        moebius=True,
        clamp_twist=False,
        max_outer_iter=1,
        penalty_schedule=(PenaltyStage(mu=1.0, max_inner_iter=1),),
    )
    journal = RunJournal(tmp_path / "journal.jsonl")
    snapshots: list[OuterIteration] = []
    profile, curve, report = solve(config, checkpoint=snapshots.append, journal=journal)

    assert not report.converged
    assert report.message == "outer iteration limit reached"
    assert report.iterations == 1
    assert len(report.energy_history) == len(report.mu_history) == 1
    assert report.closure.frame_norm > 1e-3
    assert profile.n_nodes == curve.n_nodes == 16
    assert [s.index for s in snapshots] == [0]

    lines = (tmp_path / "journal.jsonl").read_text().strip().split("\n")
    kinds = [json.loads(line)["event_type"] for line in lines]
    assert kinds == ["run_started", "outer_iteration", "run_not_converged"]
    assert validate_journal_chain(tmp_path / "journal.jsonl").valid


def test_initial_profile_size_must_match() -> None:
    with pytest.raises(ValueError, match="initial profile"):
        solve(make_config(n_nodes=16), initial=circle_profile(32))


@pytest.mark.slow
def test_circle_solve_recovers_round_energy() -> None:
    config = make_config()
    snapshots: list[OuterIteration] = []
    profile, curve, report = solve(config, checkpoint=snapshots.append)

    expected = 4.0 * math.pi**2 * config.A / config.length
    assert report.converged, report.message
    assert report.final_energy == pytest.approx(expected, rel=1e-6)
    assert np.allclose(profile.K, 1.0, atol=1e-4)
    assert np.array_equal(profile.W, np.zeros(32))
    assert report.closure.norm <= 1e-6
    assert report.projected_gradient <= config.grad_tol
    assert report.progress_ok()
    assert report.inner_monotone()
    assert len(snapshots) == report.iterations == len(report.constraint_history)
