"""Tests for the validation suite and its checks."""

from __future__ import annotations

import json

import numpy as np
import pytest

from src.energy import bending
from src.journal.logger import RunJournal
from src.validation.base import PropertyCheck, ValidationSuite
from src.validation.checks import (
    EnergyGradientCheck,
    StaticsIdentityCheck,
    default_checks,
    random_profile,
)


class _Fixed(PropertyCheck):
    def __init__(self, check_id: str, passed: bool, quick: bool = True) -> None:
        self.id = check_id
        self.name = check_id
        self.passed = passed
        self.quick = quick

    def evaluate(self, rng: np.random.Generator) -> tuple[bool, str]:
        return self.passed, "fixed"


class _Crashing(PropertyCheck):
    id = "crash"
    name = "always raises"

    def evaluate(self, rng: np.random.Generator) -> tuple[bool, str]:
        raise RuntimeError("boom")


class TestSuite:
    def test_quick_selection(self) -> None:
        suite = ValidationSuite([_Fixed("a", True), _Fixed("b", True, quick=False)])
        assert [c.id for c in suite.select(quick=True)] == ["a"]
        assert [r.check_id for r in suite.run(quick=False, threads=0)] == ["a", "b"]

    def test_threads_keep_order(self) -> None:
        checks = [_Fixed(f"c{i}", i % 2 == 0) for i in range(6)]
        results = ValidationSuite(checks).run(threads=3)
        assert [r.check_id for r in results] == [f"c{i}" for i in range(6)]
        assert [r.passed for r in results] == [True, False] * 3

    def test_crashing_check_fails(self) -> None:
        (result,) = ValidationSuite([_Crashing()]).run(threads=0)
        assert not result.passed
        assert result.detail == "RuntimeError: boom"
        assert result.line().startswith("[FAIL] crash: always raises")

    def test_results_are_journaled(self, journal: RunJournal) -> None:
        ValidationSuite([_Fixed("a", True), _Fixed("b", False)], journal=journal).run(threads=0)
        entries = [json.loads(line) for line in journal.path.read_text().strip().split("\n")]
        assert [e["event_type"] for e in entries] == ["validation_check"] * 2
        assert [(e["action"], e["result"]) for e in entries] == [("a", "success"), ("b", "failure")]


def test_random_profile_respects_floor() -> None:
    profile = random_profile(np.random.default_rng(0), 64, k_min=0.7)
    assert profile.K.min() == pytest.approx(0.7)


def test_quick_battery_passes() -> None:
    results = ValidationSuite(default_checks()).run(quick=True, threads=0)
    failed = [r.line() for r in results if not r.passed]
    assert not failed
    assert {r.check_id for r in results}.isdisjoint({"extract_round_trip", "circle_solve"})


def test_gradient_check_catches_wrong_partial(monkeypatch: pytest.MonkeyPatch) -> None:
    original = bending.dU_dK
    monkeypatch.setattr(bending, "dU_dK", lambda K, W, params: 1.01 * original(K, W, params))
    result = EnergyGradientCheck(samples=3).run()
    assert not result.passed


def test_statics_check_passes() -> None:
    assert StaticsIdentityCheck().run(seed=5).passed
