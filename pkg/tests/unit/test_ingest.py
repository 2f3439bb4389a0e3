"""Tests for loading external centerlines."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from src.geometry.ingest import centerline_profile, load_centerline, read_centerline
from src.geometry.models import CenterlineFormatError, ProfileError
from src.geometry.rulings import closes_crosswise
from src.geometry.transport import closure


def _write_points(tmp_path: Path, points: np.ndarray, name: str = "line.xyz") -> Path:
    path = tmp_path / name
    lines = ["# x y z"] + [" ".join(format(c, ".17g") for c in p) for p in points]
    path.write_text("\n".join(lines) + "\n")
    return path


def _circle(n: int) -> np.ndarray:
    u = 2.0 * math.pi * np.arange(n) / n
    return np.column_stack([np.cos(u), np.sin(u), np.zeros(n)])


def _twisted(n: int) -> np.ndarray:
    u = 2.0 * math.pi * np.arange(n) / n
    return np.column_stack([np.sin(u), 0.5 * np.sin(2 * u), np.cos(u) - 0.25 * np.cos(2 * u)])


def test_circle_centerline(tmp_path: Path) -> None:
    curve = load_centerline(_write_points(tmp_path, _circle(64)), 64)
    assert curve.n_nodes == 64
    assert curve.length == pytest.approx(128 * math.sin(math.pi / 64), rel=1e-12)
    assert closure(curve, moebius=False).norm < 1e-9
    assert not closes_crosswise(curve)


def test_circle_profile_is_round(tmp_path: Path) -> None:
    profile, x0, frame0 = centerline_profile(_circle(64), 64)
    assert np.allclose(profile.K, 1.0, rtol=1e-3)
    assert np.allclose(profile.W, 0.0, atol=1e-10)
    assert np.allclose(x0, [1.0, 0.0, 0.0])
    assert np.allclose(frame0[:, 2], [0.0, 0.0, 1.0], atol=1e-12)


def test_twisted_centerline_closes_crosswise(tmp_path: Path) -> None:
    curve = load_centerline(_write_points(tmp_path, _twisted(400)), 128)
    assert closes_crosswise(curve)


def test_repeated_closing_point_is_dropped(tmp_path: Path) -> None:
    points = np.vstack([_circle(16), _circle(16)[:1]])
    assert read_centerline(_write_points(tmp_path, points)).shape == (16, 3)


def test_comments_and_blank_lines_skipped(tmp_path: Path) -> None:
    path = tmp_path / "c.xyz"
    path.write_text("# header\n\n0 0 0\n1 0 0\n# mid\n1 1 0\n0 1 0\n")
    assert read_centerline(path).shape == (4, 3)


def test_wrong_column_count_reports_line(tmp_path: Path) -> None:
    path = tmp_path / "bad.xyz"
    path.write_text("0 0 0\n1 0\n1 1 0\n0 1 0\n")
    with pytest.raises(CenterlineFormatError, match="expected 3 columns") as exc_info:
        read_centerline(path)
    assert exc_info.value.line == 2


def test_non_numeric_value_reports_line(tmp_path: Path) -> None:
    path = tmp_path / "bad.xyz"
    path.write_text("0 0 0\n1 0 0\n1 one 0\n0 1 0\n")
    with pytest.raises(CenterlineFormatError) as exc_info:
        read_centerline(path)
    assert exc_info.value.line == 3


def test_non_finite_value_rejected(tmp_path: Path) -> None:
    path = tmp_path / "bad.xyz"
    path.write_text("0 0 0\n1 0 inf\n1 1 0\n0 1 0\n")
    with pytest.raises(CenterlineFormatError, match="non-finite"):
        read_centerline(path)


def test_too_few_points(tmp_path: Path) -> None:
    path = tmp_path / "short.xyz"
    path.write_text("0 0 0\n1 0 0\n0 1 0\n")
    with pytest.raises(ProfileError, match="at least 4"):
        read_centerline(path)


def test_missing_file(tmp_path: Path) -> None:
    with pytest.raises(ProfileError, match="not found"):
        read_centerline(tmp_path / "nope.xyz")


def test_too_few_nodes() -> None:
    with pytest.raises(ProfileError, match="n_nodes"):
        centerline_profile(_circle(32), 4)
