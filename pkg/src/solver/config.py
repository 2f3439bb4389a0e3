"""Flat key=value config files for SolverConfig.

    # comment
    n_nodes = 256
    epsilon_schedule = 0.1, 0.01
    penalty_schedule = 1:500, 10:500

Lists are comma separated; penalty stages are written mu:max_inner_iter.
Values from the command line override file values.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from src.solver.models import SolverConfig

logger = logging.getLogger(__name__)

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


class SolverConfigError(Exception):
    """Raised when a config file or value is missing, malformed or invalid."""

    def __init__(self, field: str, message: str, line: int | None = None) -> None:
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{field}{where}: {message}")
        self.field = field
        self.line = line


def _parse_penalties(raw: str, line: int | None) -> list[dict[str, Any]]:
    stages: list[dict[str, Any]] = []
    for item in raw.split(","):
        item = item.strip()
        mu, sep, iters = item.partition(":")
        if not sep:
            raise SolverConfigError(
                "penalty_schedule", f"stage {item!r} must be written mu:max_inner_iter", line
            )
        try:
            stages.append({"mu": float(mu), "max_inner_iter": int(iters)})
        except ValueError as exc:
            raise SolverConfigError("penalty_schedule", str(exc), line) from exc
    return stages


def parse_value(key: str, raw: str, line: int | None = None) -> Any:
    """Convert a raw string to the type the field expects."""
    raw = raw.strip()
    if key not in SolverConfig.model_fields:
        raise SolverConfigError(key, "unknown config key", line)
    if key == "penalty_schedule":
        return _parse_penalties(raw, line)
    if key == "epsilon_schedule":
        try:
            return [float(v) for v in raw.split(",") if v.strip()]
        except ValueError as exc:
            raise SolverConfigError(key, str(exc), line) from exc
    if SolverConfig.model_fields[key].annotation is bool:
        lowered = raw.lower()
        if lowered in _TRUE:
            return True
        if lowered in _FALSE:
            return False
        raise SolverConfigError(key, f"expected a boolean, got {raw!r}", line)
    if raw.lower() in {"none", ""}:
        return None
    return raw


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Read a key=value file into raw field values (validated later)."""
    path = Path(path)
    if not path.exists():
        raise SolverConfigError("config", f"config file not found: {path}")
    values: dict[str, Any] = {}
    for line_num, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise SolverConfigError("config", f"expected key=value, got {line!r}", line_num)
        key = key.strip()
        if key in values:
            logger.warning("Config key %s repeated at line %d; last value wins", key, line_num)
        values[key] = parse_value(key, value, line_num)
    return values


def build_config(
    file_values: dict[str, Any] | None = None,
    overrides: dict[str, Any] | None = None,
) -> SolverConfig:
    """Merge file values and overrides (None overrides are ignored) and validate."""
    merged: dict[str, Any] = dict(file_values or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return SolverConfig(**merged)
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(p) for p in first["loc"]) or "config"
        message = str(first["msg"]).removeprefix("Value error, ")
        raise SolverConfigError(field, message) from exc


def load_config(path: str | Path | None = None, **overrides: Any) -> SolverConfig:
    file_values = load_config_file(path) if path is not None else {}
    return build_config(file_values, overrides)
