"""Solver configuration and convergence report models."""

from __future__ import annotations

import math
from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.geometry.models import MIN_NODES
from src.models import ClosureResidual, MaterialParams

# regularization stages, in units of 1/L
DEFAULT_EPSILON_FACTORS = (1e-1, 1e-2, 1e-3, 1e-4)


class InitMode(str, Enum):
    ANALYTIC_MOEBIUS = "analytic_moebius"
    PERTURBED_CIRCLE = "perturbed_circle"
    FROM_FILE = "from_file"


class JacobianMethod(str, Enum):
    ADJOINT = "adjoint"
    FINITE_DIFFERENCE = "finite_difference"


class PenaltyStage(BaseModel):
    model_config = ConfigDict(frozen=True)

    mu: float = Field(gt=0.0)
    max_inner_iter: int = Field(ge=1)


def _default_penalties() -> tuple[PenaltyStage, ...]:
    return tuple(PenaltyStage(mu=10.0**k, max_inner_iter=500) for k in range(4))


class StagePlan(BaseModel):
    """One outer iteration's regularization and penalty."""

    model_config = ConfigDict(frozen=True)

    epsilon: float
    mu: float
    max_inner_iter: int


class SolverConfig(BaseModel):
    """All numerical parameters of an equilibrium solve."""

    model_config = ConfigDict(frozen=True)

    n_nodes: int = 256
    length: float = Field(default=2.0 * math.pi, gt=0.0)
    A: float = Field(default=1.0, gt=0.0)
    epsilon_schedule: tuple[float, ...] = ()
    penalty_schedule: tuple[PenaltyStage, ...] = Field(default_factory=_default_penalties)
    grad_tol: float = Field(default=1e-6, gt=0.0)
    constraint_tol: float = Field(default=1e-6, gt=0.0)
    init_mode: InitMode = InitMode.ANALYTIC_MOEBIUS
    seed: int = 0

    moebius: bool = True
    clamp_twist: bool = False
    init_amplitude: float = Field(default=0.05, ge=0.0)
    init_file: str | None = None
    max_outer_iter: int = Field(default=40, ge=1)
    mu_growth: float = Field(default=10.0, gt=1.0)
    lbfgs_memory: int = Field(default=20, ge=1)
    mask_fraction: float = Field(default=0.02, ge=0.0, lt=1.0)
    k_floor: float | None = Field(default=None, gt=0.0)
    jacobian: JacobianMethod = JacobianMethod.ADJOINT

    @field_validator("n_nodes")
    @classmethod
    def check_nodes(cls, v: int) -> int:
        if v < MIN_NODES:
            raise ValueError(f"n_nodes must be ≥ {MIN_NODES}")
        return v

    @field_validator("init_mode", mode="before")
    @classmethod
    def normalize_mode(cls, v: Any) -> Any:
        # CLI spelling uses dashes: analytic-moebius
        return v.replace("-", "_") if isinstance(v, str) else v

    @field_validator("epsilon_schedule")
    @classmethod
    def check_epsilons(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if any(not (math.isfinite(e) and e >= 0.0) for e in v):
            raise ValueError("epsilon_schedule entries must be finite and ≥ 0")
        return v

    @field_validator("penalty_schedule")
    @classmethod
    def check_penalties(cls, v: tuple[PenaltyStage, ...]) -> tuple[PenaltyStage, ...]:
        if not v:
            raise ValueError("penalty_schedule must not be empty")
        return v

    @model_validator(mode="before")
    @classmethod
    def default_epsilons(cls, data: Any) -> Any:
        if not isinstance(data, dict) or data.get("epsilon_schedule"):
            return data
        try:
            length = float(data.get("length", 2.0 * math.pi))
        except (TypeError, ValueError):
            return data
        if length > 0.0:
            data = {**data, "epsilon_schedule": tuple(f / length for f in DEFAULT_EPSILON_FACTORS)}
        return data

    @model_validator(mode="after")
    def check_init_source(self) -> SolverConfig:
        if not self.epsilon_schedule:
            raise ValueError("epsilon_schedule must not be empty")
        if self.init_mode is InitMode.FROM_FILE and not self.init_file:
            raise ValueError("init_file is required when init_mode is from_file")
        return self

    @property
    def h(self) -> float:
        return self.length / self.n_nodes

    @property
    def final_epsilon(self) -> float:
        return self.epsilon_schedule[-1]

    @property
    def scheduled_stages(self) -> int:
        return max(len(self.epsilon_schedule), len(self.penalty_schedule))

    def material(self, epsilon: float | None = None) -> MaterialParams:
        eps = self.final_epsilon if epsilon is None else epsilon
        return MaterialParams(A=self.A, epsilon=eps)

    def stage(self, index: int) -> StagePlan:
        """Plan for outer iteration `index`; past the schedules the last stage repeats."""
        eps = self.epsilon_schedule[min(index, len(self.epsilon_schedule) - 1)]
        penalty = self.penalty_schedule[min(index, len(self.penalty_schedule) - 1)]
        return StagePlan(epsilon=eps, mu=penalty.mu, max_inner_iter=penalty.max_inner_iter)

    def echo(self) -> dict[str, object]:
        return self.model_dump(mode="json")


class SolverReport(BaseModel):
    """Diagnostics of a finished solve; histories hold one entry per outer iteration."""

    model_config = ConfigDict(frozen=True)

    converged: bool
    message: str
    final_energy: float
    initial_energy: float
    closure: ClosureResidual
    iterations: int
    inner_iterations: int
    projected_gradient: float
    final_epsilon: float
    energy_history: list[float] = Field(default_factory=list)
    constraint_history: list[float] = Field(default_factory=list)
    mu_history: list[float] = Field(default_factory=list)
    inner_histories: list[list[float]] = Field(default_factory=list)
    multipliers: list[float] = Field(default_factory=list)

    def progress_ok(self) -> bool:
        """Every outer step reduced the constraint norm or raised the penalty."""
        c, mu = self.constraint_history, self.mu_history
        return all(c[k + 1] <= c[k] or mu[k + 1] > mu[k] for k in range(len(c) - 1))

    def inner_monotone(self) -> bool:
        return all(
            all(b <= a for a, b in zip(hist, hist[1:], strict=False))
            for hist in self.inner_histories
        )

    def summary_lines(self) -> list[str]:
        status = "converged" if self.converged else "NOT converged"
        return [
            f"status: {status}",
            f"message: {self.message}",
            f"final_energy: {self.final_energy:.17g}",
            f"initial_energy: {self.initial_energy:.17g}",
            f"final_epsilon: {self.final_epsilon:.6g}",
            f"position_gap: {self.closure.position_norm:.6e}",
            f"frame_gap: {self.closure.frame_norm:.6e}",
            f"projected_gradient: {self.projected_gradient:.6e}",
            f"outer_iterations: {self.iterations}",
            f"inner_iterations: {self.inner_iterations}",
        ]
