"""Shared Pydantic data models for moebius-band."""

from __future__ import annotations

import math
import os
from datetime import datetime, timezone
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

UTC = timezone.utc

Vector3 = tuple[float, float, float]

# --- Enums ---


class RunEventType(str, Enum):
    RUN_STARTED = "run_started"
    OUTER_ITERATION = "outer_iteration"
    CHECKPOINT_WRITTEN = "checkpoint_written"
    RUN_CONVERGED = "run_converged"
    RUN_NOT_CONVERGED = "run_not_converged"
    ANALYSIS_COMPLETED = "analysis_completed"
    EXPORT_COMPLETED = "export_completed"
    VALIDATION_CHECK = "validation_check"


# --- Material Models ---


class MaterialParams(BaseModel):
    """Bending stiffness A and the denominator regularization epsilon."""

    model_config = ConfigDict(frozen=True)

    A: float = Field(default=1.0, gt=0.0)
    epsilon: float = Field(default=0.0, ge=0.0)


# --- Closure Models ---


class ClosureResidual(BaseModel):
    """Position and frame mismatch after transporting once around the band."""

    model_config = ConfigDict(frozen=True)

    position_gap: Vector3
    frame_gap: Vector3  # rotation vector, radians

    @property
    def position_norm(self) -> float:
        return math.sqrt(sum(c * c for c in self.position_gap))

    @property
    def frame_norm(self) -> float:
        return math.sqrt(sum(c * c for c in self.frame_gap))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.as_vector()))

    def as_vector(self) -> np.ndarray:
        return np.array([*self.position_gap, *self.frame_gap], dtype=float)


# --- Run Models ---


def _now_iso() -> str:
    # SOURCE_DATE_EPOCH pins the clock so repeated runs write identical files
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        return datetime.fromtimestamp(int(epoch), UTC).isoformat()
    return datetime.now(UTC).isoformat()


class RunManifest(BaseModel):
    model_config = ConfigDict(frozen=True)

    tool_version: str
    timestamp: str = Field(default_factory=_now_iso)
    command: str
    config: dict[str, object] = Field(default_factory=dict)
    inputs: list[str] = Field(default_factory=list)
    outputs: list[str] = Field(default_factory=list)
    seed: int | None = None

    def header_lines(self) -> list[str]:
        """Manifest rendered as '#'-prefixed comment lines."""
        dumped = self.model_dump_json()
        return [
            f"# tool: moebius-band {self.tool_version}",
            f"# command: {self.command}",
            f"# timestamp: {self.timestamp}",
            f"# seed: {self.seed}",
            f"# inputs: {','.join(self.inputs)}",
            f"# outputs: {','.join(self.outputs)}",
            f"# manifest: {dumped}",
        ]


class RunEvent(BaseModel):
    timestamp: str = Field(default_factory=_now_iso)
    event_type: RunEventType
    action: str
    result: str  # "success" | "failure" | "progress"
    details: dict[str, object] | None = None
