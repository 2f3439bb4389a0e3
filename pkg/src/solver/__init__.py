"""Augmented-Lagrangian solver for closed band equilibria.

This module provides:
- Solver configuration, loaded from key = value files with CLI overrides
- Initial profiles (analytic half-twisted curve, perturbed circle, file)
- Closure constraints with adjoint and finite-difference Jacobians
- The outer augmented-Lagrangian loop around a scipy L-BFGS-B inner solve
"""

from src.solver.auglag import OuterIteration, projected_gradient, solve
from src.solver.config import SolverConfigError, build_config, load_config
from src.solver.constraints import ConstraintJacobian, gradient_of_constraints
from src.solver.initial import initialize
from src.solver.models import InitMode, JacobianMethod, PenaltyStage, SolverConfig, SolverReport

__all__ = [
    # Exceptions
    "SolverConfigError",
    # Components
    "build_config",
    "gradient_of_constraints",
    "initialize",
    "load_config",
    "projected_gradient",
    "solve",
    # Models
    "ConstraintJacobian",
    "InitMode",
    "JacobianMethod",
    "OuterIteration",
    "PenaltyStage",
    "SolverConfig",
    "SolverReport",
]
