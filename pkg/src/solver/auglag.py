"""Augmented-Lagrangian equilibrium solver.

Minimizes L(K, W; lam, mu) = E_eps + lam . g + (mu / 2) |g|^2 over the (K, W)
fields with scipy's L-BFGS-B, then updates lam <- lam + mu g. Variables held
fixed (W under clamp_twist) get equal lower and upper bounds. Each outer iteration
advances the epsilon and penalty schedules; once they are exhausted the last
stage repeats until the closure and stationarity tolerances are met or
max_outer_iter is reached. A stalled constraint norm (less than a 4x drop)
multiplies mu by mu_growth.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy.optimize import Bounds, OptimizeResult, minimize

from src.energy.bending import InadmissibleStateError, total_energy
from src.energy.bending import gradient as energy_gradient
from src.geometry.models import CurvatureTwistProfile, FramedCurve
from src.geometry.transport import closure, reconstruct
from src.journal.logger import RunJournal
from src.models import RunEvent, RunEventType
from src.solver.constraints import adjoint_jacobian, closure_state, finite_difference_jacobian
from src.solver.initial import initialize
from src.solver.models import JacobianMethod, SolverConfig, SolverReport

logger = logging.getLogger(__name__)

STALL_RATIO = 0.25
# inner stopping on relative decrease; convergence is decided by the outer loop
INNER_FTOL = float(np.finfo(float).eps)


@dataclass(frozen=True)
class OuterIteration:
    """Snapshot handed to checkpoint callbacks after every outer iteration."""

    index: int
    profile: CurvatureTwistProfile
    energy: float
    constraint_norm: float
    mu: float
    epsilon: float
    inner_iterations: int


CheckpointFn = Callable[[OuterIteration], None]


def projected_gradient(energy_grad: np.ndarray, jacobian: np.ndarray, free: np.ndarray) -> float:
    """Norm of the energy gradient with its constraint-normal part removed."""
    g = energy_grad[free]
    J = jacobian[:, free]
    multipliers, *_ = np.linalg.lstsq(J.T, g, rcond=None)
    return float(np.linalg.norm(g - J.T @ multipliers))


class AugmentedLagrangian:
    """Objective bookkeeping for one solve; not shareable while a run is active."""

    def __init__(self, config: SolverConfig) -> None:
        self.config = config
        n = config.n_nodes
        self.free = np.ones(2 * n, dtype=bool)
        if config.clamp_twist:
            self.free[n:] = False
        self.multipliers = np.zeros(6)
        self.mu = config.stage(0).mu
        self.params = config.material(config.stage(0).epsilon)

    def split(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n = self.config.n_nodes
        return x[:n], x[n:]

    def profile(self, x: np.ndarray) -> CurvatureTwistProfile:
        K, W = self.split(x)
        return CurvatureTwistProfile(
            K=K, W=W, length=self.config.length, moebius=self.config.moebius
        )

    def jacobian(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        K, W = self.split(x)
        gaps, state = closure_state(K, W, self.config.h, self.config.moebius)
        if self.config.jacobian is JacobianMethod.FINITE_DIFFERENCE:
            return gaps, finite_difference_jacobian(self.profile(x), self.config.moebius)
        return gaps, adjoint_jacobian(state, gaps, self.config.h, self.config.moebius)

    def __call__(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        if not np.all(np.isfinite(x)):
            return np.inf, np.zeros_like(x)
        profile = self.profile(x)
        energy = total_energy(profile, self.params)
        if not np.isfinite(energy):
            return np.inf, np.zeros_like(x)
        try:
            grad = energy_gradient(profile, self.params).as_vector()
        except InadmissibleStateError:
            return np.inf, np.zeros_like(x)
        gaps, jac = self.jacobian(x)
        value = energy + float(self.multipliers @ gaps) + 0.5 * self.mu * float(gaps @ gaps)
        grad += jac.T @ (self.multipliers + self.mu * gaps)
        return value, grad


@dataclass
class InnerResult:
    x: np.ndarray
    iterations: int
    message: str
    history: list[float]


def minimize_inner(problem: AugmentedLagrangian, x0: np.ndarray, max_iter: int) -> InnerResult:
    """One L-BFGS-B run on the current augmented Lagrangian.

    `history` holds the starting value and the value after every iteration.
    """
    config = problem.config
    history = [problem(x0)[0]]

    def record(intermediate_result: OptimizeResult) -> None:
        history.append(float(intermediate_result.fun))

    bounds = Bounds(np.where(problem.free, -np.inf, x0), np.where(problem.free, np.inf, x0))
    result = minimize(
        problem,
        x0,
        jac=True,
        method="L-BFGS-B",
        bounds=bounds,
        callback=record,
        options={
            "maxiter": max_iter,
            "maxcor": config.lbfgs_memory,
            "gtol": config.grad_tol,
            "ftol": INNER_FTOL,
        },
    )
    return InnerResult(
        x=np.asarray(result.x, dtype=float),
        iterations=int(result.nit),
        message=str(result.message),
        history=history,
    )


def _log_event(journal: RunJournal | None, event: RunEvent) -> None:
    if journal is not None:
        journal.log(event)


def solve(
    config: SolverConfig,
    initial: CurvatureTwistProfile | None = None,
    checkpoint: CheckpointFn | None = None,
    journal: RunJournal | None = None,
) -> tuple[CurvatureTwistProfile, FramedCurve, SolverReport]:
    """Equilibrium profile, its reconstructed curve and the convergence report."""
    start = initialize(config) if initial is None else initial
    if start.n_nodes != config.n_nodes:
        raise ValueError(f"initial profile has {start.n_nodes} nodes, config has {config.n_nodes}")
    problem = AugmentedLagrangian(config)
    x = np.concatenate([start.K, start.W])
    if config.clamp_twist:
        x[config.n_nodes :] = 0.0
    final_params = config.material()
    initial_energy = total_energy(problem.profile(x), final_params)
    _log_event(journal, RunEvent(
        event_type=RunEventType.RUN_STARTED,
        action="solve",
        result="progress",
        details={"n_nodes": config.n_nodes, "init_mode": config.init_mode.value,
                 "initial_energy": initial_energy},
    ))

    energy_history: list[float] = []
    constraint_history: list[float] = []
    mu_history: list[float] = []
    inner_histories: list[list[float]] = []
    inner_total = 0
    converged = False
    message = "outer iteration limit reached"
    pgrad = np.inf
    previous_norm: float | None = None
    outer = 0

    for outer in range(config.max_outer_iter):
        plan = config.stage(outer)
        problem.params = config.material(plan.epsilon)
        problem.mu = max(problem.mu, plan.mu)
        result = minimize_inner(problem, x, plan.max_inner_iter)
        x = result.x
        inner_total += result.iterations
        inner_histories.append([float(v) for v in result.history])

        gaps, jac = problem.jacobian(x)
        norm = float(np.linalg.norm(gaps))
        profile = problem.profile(x)
        energy = total_energy(profile, problem.params)
        problem.multipliers = problem.multipliers + problem.mu * gaps

        at_final_stage = outer >= config.scheduled_stages - 1
        if at_final_stage and np.isfinite(energy):
            try:
                grad = energy_gradient(profile, problem.params).as_vector()
                pgrad = projected_gradient(grad, jac, problem.free)
            except InadmissibleStateError:
                pgrad = np.inf
        position_ok = float(np.linalg.norm(gaps[:3])) <= config.constraint_tol
        frame_ok = float(np.linalg.norm(gaps[3:])) <= config.constraint_tol
        if at_final_stage and position_ok and frame_ok and pgrad <= config.grad_tol:
            converged = True
            message = "closure and stationarity tolerances met"

        # mu in force after this iteration; grows when the constraint stalls
        next_mu = max(problem.mu, config.stage(outer + 1).mu)
        if previous_norm is not None and norm > STALL_RATIO * previous_norm:
            next_mu = max(next_mu, problem.mu * config.mu_growth)
        problem.mu = next_mu
        previous_norm = norm

        energy_history.append(energy)
        constraint_history.append(norm)
        mu_history.append(problem.mu)
        logger.info(
            "outer %d: eps=%.3g mu=%.3g E=%.12g |g|=%.3e inner=%d (%s)",
            outer, plan.epsilon, problem.mu, energy, norm, result.iterations, result.message,
        )
        _log_event(journal, RunEvent(
            event_type=RunEventType.OUTER_ITERATION,
            action="solve",
            result="progress",
            details={"index": outer, "energy": energy, "constraint_norm": norm,
                     "mu": problem.mu, "epsilon": plan.epsilon,
                     "inner_iterations": result.iterations},
        ))
        if checkpoint is not None:
            checkpoint(OuterIteration(
                index=outer, profile=profile, energy=energy, constraint_norm=norm,
                mu=problem.mu, epsilon=plan.epsilon, inner_iterations=result.iterations,
            ))
        if converged:
            break

    profile = problem.profile(x)
    curve = reconstruct(profile)
    final_energy = total_energy(profile, final_params)
    if not converged:
        logger.warning("Solver did not converge: %s (|g|=%.3e, pgrad=%.3e)",
                       message, constraint_history[-1], pgrad)
    report = SolverReport(
        converged=converged,
        message=message,
        final_energy=final_energy,
        initial_energy=initial_energy,
        closure=closure(curve, config.moebius),
        iterations=outer + 1,
        inner_iterations=inner_total,
        projected_gradient=pgrad,
        final_epsilon=final_params.epsilon,
        energy_history=energy_history,
        constraint_history=constraint_history,
        mu_history=mu_history,
        inner_histories=inner_histories,
        multipliers=[float(v) for v in problem.multipliers],
    )
    _log_event(journal, RunEvent(
        event_type=RunEventType.RUN_CONVERGED if converged else RunEventType.RUN_NOT_CONVERGED,
        action="solve",
        result="success" if converged else "failure",
        details={"final_energy": final_energy, "message": message,
                 "iterations": outer + 1, "projected_gradient": pgrad},
    ))
    return profile, curve, report
