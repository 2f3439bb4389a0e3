"""Internal force/moment fields and equilibrium residual containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# names of the six balance equations, in force-then-moment order
BALANCE_EQUATIONS = ("force_t", "force_n", "force_b", "moment_t", "moment_n", "moment_b")

# balance equations satisfied by construction once T, N, B and the normal moment
# come from the constitutive expressions; force_n and force_b are the two
# surviving equilibrium conditions
IDENTITY_EQUATIONS = ("force_t", "moment_t", "moment_n", "moment_b")


@dataclass(frozen=True)
class StaticFields:
    """Force (T, N, B) and moment (Mt, Mn, Mb) components on (t, n, b)."""

    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    Mt: np.ndarray
    Mn: np.ndarray
    Mb: np.ndarray
    C: float
    epsilon: float = 0.0

    def rows(self) -> dict[str, np.ndarray]:
        return {
            "T": self.T, "N": self.N, "B": self.B,
            "Mt": self.Mt, "Mn": self.Mn, "Mb": self.Mb,
        }


@dataclass(frozen=True)
class ResidualNorm:
    max: float
    rms: float


@dataclass(frozen=True)
class EquilibriumResiduals:
    """Per-node residuals plus max/RMS norms over the unmasked nodes."""

    r23: np.ndarray
    r24: np.ndarray
    r14: tuple[np.ndarray, ...]
    mask: np.ndarray  # True where a node counts towards the norms
    norms: dict[str, ResidualNorm] = field(default_factory=dict)

    @property
    def identities(self) -> tuple[str, ...]:
        return IDENTITY_EQUATIONS

    @property
    def conditions(self) -> tuple[str, ...]:
        return tuple(name for name in BALANCE_EQUATIONS if name not in IDENTITY_EQUATIONS)

    def worst(self) -> tuple[str, float]:
        name = max(self.norms, key=lambda key: self.norms[key].max)
        return name, self.norms[name].max
