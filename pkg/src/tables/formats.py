"""CSV tables with '#' manifest headers.

Values are written with 17 significant digits so reading a table back yields
bit-identical floats. The first non-comment line names the columns; metadata
lines have the form '# key: value'.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from src.geometry.models import CurvatureTwistProfile, FramedCurve
from src.statics.models import EquilibriumResiduals, StaticFields

PROFILE_COLUMNS = ("s", "K", "W")
CLOSURES = ("orientable", "moebius")
CURVE_COLUMNS = (
    "s", "x", "y", "z",
    "t_x", "t_y", "t_z",
    "n_x", "n_y", "n_z",
    "b_x", "b_y", "b_z",
)
FIELD_COLUMNS = ("s", "K", "W", "phi", "T", "N", "B", "Mt", "Mn", "Mb", "r23", "r24")


class TableFormatError(ValueError):
    """Raised when a table file is missing, truncated or has a malformed row."""

    def __init__(self, path: str, line: int | None, reason: str) -> None:
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {reason}")
        self.path = path
        self.line = line


@dataclass
class Table:
    columns: dict[str, np.ndarray]
    metadata: dict[str, str] = field(default_factory=dict)

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0


def format_value(value: float) -> str:
    return format(float(value), ".17g")


def write_table(
    path: str | Path,
    columns: Mapping[str, np.ndarray],
    header: Iterable[str] = (),
    metadata: Mapping[str, object] | None = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    data = np.column_stack([np.asarray(columns[name], dtype=float) for name in names])
    lines = list(header)
    lines.extend(f"# {key}: {value}" for key, value in (metadata or {}).items())
    lines.append(",".join(names))
    lines.extend(",".join(format_value(v) for v in row) for row in data)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_table(path: str | Path, expected: tuple[str, ...] | None = None) -> Table:
    path = Path(path)
    if not path.exists():
        raise TableFormatError(str(path), None, "file not found")
    metadata: dict[str, str] = {}
    names: list[str] | None = None
    rows: list[list[float]] = []
    for line_num, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            if sep:
                metadata.setdefault(key.strip(), value.strip())
            continue
        cells = [c.strip() for c in line.split(",")]
        if names is None:
            names = cells
            if expected is not None and tuple(names) != expected:
                raise TableFormatError(
                    str(path), line_num, f"expected columns {','.join(expected)}, got {line}"
                )
            continue
        if len(cells) != len(names):
            raise TableFormatError(
                str(path), line_num, f"expected {len(names)} values, got {len(cells)}"
            )
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise TableFormatError(str(path), line_num, str(exc)) from exc
    if names is None or not rows:
        raise TableFormatError(str(path), None, "no data rows")
    data = np.array(rows, dtype=float)
    return Table(columns={n: data[:, i] for i, n in enumerate(names)}, metadata=metadata)


def _length(table: Table, path: str | Path) -> float:
    try:
        return float(table.metadata["length"])
    except (KeyError, ValueError) as exc:
        raise TableFormatError(str(path), None, "missing '# length:' header") from exc


def write_profile(
    path: str | Path, profile: CurvatureTwistProfile, header: Iterable[str] = ()
) -> Path:
    return write_table(
        path,
        {"s": profile.s, "K": profile.K, "W": profile.W},
        header,
        {
            "length": format_value(profile.length),
            "n_nodes": profile.n_nodes,
            "closure": CLOSURES[profile.moebius],
        },
    )


def read_profile(path: str | Path) -> CurvatureTwistProfile:
    """Profile table; a missing '# closure:' header means orientable."""
    table = read_table(path, PROFILE_COLUMNS)
    closure = table.metadata.get("closure", "orientable")
    if closure not in CLOSURES:
        raise TableFormatError(
            str(path), None, f"closure must be one of {', '.join(CLOSURES)}, got {closure!r}"
        )
    try:
        return CurvatureTwistProfile(
            K=table.columns["K"],
            W=table.columns["W"],
            length=_length(table, path),
            moebius=closure == "moebius",
        )
    except ValueError as exc:
        raise TableFormatError(str(path), None, str(exc)) from exc


def write_curve(path: str | Path, curve: FramedCurve, header: Iterable[str] = ()) -> Path:
    """n + 1 rows; the last row is the closing state at s = L."""
    positions = np.vstack([curve.positions, curve.closing_position[None]])
    frames = np.concatenate([curve.frames, curve.closing_frame[None]], axis=0)
    s = np.arange(curve.n_nodes + 1) * curve.h
    s[-1] = curve.length
    columns: dict[str, np.ndarray] = {"s": s}
    for k, axis in enumerate("xyz"):
        columns[axis] = positions[:, k]
    for col, vec in enumerate("tnb"):
        for k, axis in enumerate("xyz"):
            columns[f"{vec}_{axis}"] = frames[:, k, col]
    return write_table(
        path, columns, header,
        {"length": format_value(curve.length), "n_nodes": curve.n_nodes},
    )


def read_curve(path: str | Path) -> FramedCurve:
    table = read_table(path, CURVE_COLUMNS)
    c = table.columns
    positions = np.column_stack([c["x"], c["y"], c["z"]])
    frames = np.stack(
        [np.column_stack([c[f"{vec}_{axis}"] for vec in "tnb"]) for axis in "xyz"], axis=1
    )
    if positions.shape[0] < 2:
        raise TableFormatError(str(path), None, "curve table needs a closing row")
    try:
        return FramedCurve(
            positions=positions[:-1],
            frames=frames[:-1],
            length=_length(table, path),
            closing_position=positions[-1],
            closing_frame=frames[-1],
        )
    except ValueError as exc:
        raise TableFormatError(str(path), None, str(exc)) from exc


def write_fields(
    path: str | Path,
    profile: CurvatureTwistProfile,
    phi: np.ndarray,
    fields: StaticFields,
    residuals: EquilibriumResiduals,
    header: Iterable[str] = (),
) -> Path:
    columns = {"s": profile.s, "K": profile.K, "W": profile.W, "phi": phi}
    columns.update(fields.rows())
    columns["r23"] = residuals.r23
    columns["r24"] = residuals.r24
    return write_table(
        path, columns, header, {"C": format_value(fields.C), "epsilon": fields.epsilon}
    )


def write_plot_table(
    path: str | Path,
    profile: CurvatureTwistProfile,
    name: str,
    values: np.ndarray,
    header: Iterable[str] = (),
    closing: float | None = None,
) -> Path:
    """Two-column (s, value) table closed by a row at s = L.

    The closing value defaults to the first sample; fields that change sign
    across the seam pass their own.
    """
    s = np.append(profile.s, profile.length)
    last = values[0] if closing is None else closing
    return write_table(path, {"s": s, name: np.append(values, last)}, header)


def write_key_values(
    path: str | Path, rows: Iterable[tuple[str, float]], header: Iterable[str] = ()
) -> Path:
    """Two-column 'quantity,value' table for scalar summaries."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = list(header)
    lines.append("quantity,value")
    lines.extend(f"{key},{format_value(value)}" for key, value in rows)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_key_values(path: str | Path) -> dict[str, float]:
    path = Path(path)
    if not path.exists():
        raise TableFormatError(str(path), None, "file not found")
    values: dict[str, float] = {}
    for line_num, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line == "quantity,value":
            continue
        key, sep, value = line.partition(",")
        if not sep:
            raise TableFormatError(str(path), line_num, f"malformed row {line!r}")
        try:
            values[key] = float(value)
        except ValueError as exc:
            raise TableFormatError(str(path), line_num, f"malformed row {line!r}") from exc
    return values
