"""Result models for the post-processing of a solved band."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

from src.models import Vector3


class SingularPoint(BaseModel):
    """Minimum of K^2 + W^2 over the midline."""

    model_config = ConfigDict(frozen=True)

    s_X: float
    index: int
    value: float  # K^2 + W^2 at the nearest node
    max_value: float
    K_at_X: float
    W_at_X: float
    found: bool
    candidates: tuple[float, ...] = ()

    @property
    def unique(self) -> bool:
        return len(self.candidates) <= 1


class PhiLimit(BaseModel):
    """One-sided extrapolations of the generator angle towards X, in degrees."""

    model_config = ConfigDict(frozen=True)

    value: float
    left: float
    right: float
    spread: float
    points_per_side: int


class NearXValues(BaseModel):
    """Generator angle and twisting moment just outside the core and at X itself."""

    model_config = ConfigDict(frozen=True)

    phi_left: float
    phi_right: float
    phi_at_X: float
    Mt_left: float
    Mt_right: float
    Mt_at_X: float


class WZeros(BaseModel):
    """Zeros of W: sign changes, touching zeros and the zero at X, if any."""

    model_config = ConfigDict(frozen=True)

    crossings: tuple[float, ...] = ()
    touching: tuple[float, ...] = ()
    degenerate: bool = False
    at_X: float | None = None

    @property
    def count(self) -> int:
        return len(self.crossings)

    @property
    def total(self) -> int:
        return len(self.crossings) + len(self.touching)


class SymmetryAxis(BaseModel):
    """Half-turn axis through `point` that best maps the midline onto itself."""

    model_config = ConfigDict(frozen=True)

    point: Vector3
    direction: Vector3
    rms: float
    diameter: float
    reversed: bool = True
    degenerate: bool = False

    @property
    def relative_rms(self) -> float:
        return self.rms / self.diameter if self.diameter > 0.0 else 0.0


class AxisCrossing(BaseModel):
    """Midline point closest to the symmetry axis, with |b . axis| there."""

    model_config = ConfigDict(frozen=True)

    s: float
    index: int
    distance: float
    alignment: float


class TriangleSummary(BaseModel):
    """Generators bounding the core window around X and the flatness of their patch."""

    model_config = ConfigDict(frozen=True)

    apex: float
    leg_angles: tuple[float, float]  # degrees against b at X, (left, right)
    flat_window: tuple[float, float]
    deviation: float
    patch_size: float

    @property
    def relative_deviation(self) -> float:
        return self.deviation / self.patch_size if self.patch_size > 0.0 else 0.0


class AnalysisReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    length: float
    n_nodes: int
    singular: SingularPoint
    w_zeros: WZeros
    symmetry_axis: SymmetryAxis
    axis_crossing: AxisCrossing | None = None
    phi_limit: PhiLimit | None = None
    near_x: NearXValues | None = None
    triangle: TriangleSummary | None = None
    notes: list[str] = Field(default_factory=list)

    @property
    def s_X(self) -> float:
        return self.singular.s_X

    @property
    def phi_limit_deg(self) -> float | None:
        return None if self.phi_limit is None else self.phi_limit.value

    @property
    def w_zero_crossings(self) -> tuple[float, ...]:
        return self.w_zeros.crossings
