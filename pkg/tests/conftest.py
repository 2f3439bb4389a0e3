"""Shared test fixtures for moebius-band."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from src.geometry.models import CurvatureTwistProfile, FramedCurve
from src.geometry.transport import reconstruct
from src.journal.logger import RunJournal
from src.models import RunEvent, RunEventType
from src.solver.models import InitMode, PenaltyStage, SolverConfig

TWO_PI = 2.0 * math.pi


@pytest.fixture
def config_dir() -> Path:
    return Path(__file__).parent.parent / "config"


@pytest.fixture
def journal(tmp_path: Path) -> RunJournal:
    return RunJournal(tmp_path / "journal.jsonl")


# --- Factory functions for test data ---


def make_profile(
    K: object, W: object | None = None, length: float = TWO_PI, moebius: bool = False
) -> CurvatureTwistProfile:
    """Profile from arrays (or scalars broadcast over 32 nodes)."""
    K_arr = np.atleast_1d(np.asarray(K, dtype=float))
    if K_arr.size == 1:
        K_arr = np.full(32, K_arr[0])
    W_arr = np.zeros_like(K_arr) if W is None else np.broadcast_to(
        np.asarray(W, dtype=float), K_arr.shape
    )
    return CurvatureTwistProfile(K=K_arr, W=np.array(W_arr), length=length, moebius=moebius)


def circle_profile(n_nodes: int = 64, length: float = TWO_PI) -> CurvatureTwistProfile:
    return make_profile(np.full(n_nodes, TWO_PI / length), length=length)


def smooth_profile(n_nodes: int = 64, length: float = TWO_PI) -> CurvatureTwistProfile:
    """Bounded-away-from-zero K with a two-signed W."""
    phase = TWO_PI * np.arange(n_nodes) / n_nodes
    K = 1.0 + 0.3 * np.cos(phase) + 0.1 * np.sin(2.0 * phase)
    W = 0.4 * np.sin(phase) + 0.1 * np.cos(3.0 * phase)
    return make_profile(K, W, length)


def singular_profile(
    n_nodes: int = 256, length: float = TWO_PI, s_X: float = 1.0
) -> CurvatureTwistProfile:
    """K and W both vanish linearly at s_X with W / K -> 1 there (phi -> 45 deg)."""
    s = np.arange(n_nodes) * (length / n_nodes)
    phase = TWO_PI * (s - s_X) / length
    K = np.abs(np.sin(0.5 * phase)) * 2.0
    W = np.sin(phase)
    return make_profile(K, W, length)


def half_twist_profile(n_nodes: int = 64, length: float = TWO_PI) -> CurvatureTwistProfile:
    """Antiperiodic K (odd harmonics of pi / length) with a periodic W."""
    phase = math.pi * np.arange(n_nodes) / n_nodes
    K = np.cos(phase) + 0.2 * np.sin(3.0 * phase)
    W = 0.3 + 0.1 * np.cos(2.0 * phase)
    return make_profile(K, W, length, moebius=True)


def circle_curve(n_nodes: int = 64, length: float = TWO_PI) -> FramedCurve:
    return reconstruct(circle_profile(n_nodes, length))


def make_config(**kwargs: object) -> SolverConfig:
    """Small, fast SolverConfig; override any field."""
    defaults: dict[str, object] = {
        "n_nodes": 32,
        "moebius": False,
        "clamp_twist": True,
        "init_mode": InitMode.PERTURBED_CIRCLE,
        "init_amplitude": 0.02,
        "epsilon_schedule": (0.0,),
        "penalty_schedule": (
            PenaltyStage(mu=10.0, max_inner_iter=500),
            PenaltyStage(mu=100.0, max_inner_iter=500),
        ),
    }
    defaults.update(kwargs)
    return SolverConfig(**defaults)  # type: ignore[arg-type]


def make_run_event(**kwargs: object) -> RunEvent:
    """Factory for RunEvent with sensible defaults."""
    defaults: dict[str, object] = {
        "event_type": RunEventType.OUTER_ITERATION,
        "action": "solve",
        "result": "progress",
        "details": {"index": 0},
    }
    defaults.update(kwargs)
    return RunEvent(**defaults)  # type: ignore[arg-type]
