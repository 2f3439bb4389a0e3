"""Tests for the display-band mesh."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from src.geometry.transport import reconstruct
from src.solver.initial import analytic_moebius
from src.tables.mesh import band_mesh, write_obj
from tests.conftest import TWO_PI, circle_curve, circle_profile


def test_two_sided_band_closes_straight() -> None:
    mesh = band_mesh(circle_curve(16), circle_profile(16), width=0.2)
    assert mesh.vertices.shape == (32, 3)
    assert mesh.faces.shape == (32, 3)
    assert not mesh.crosswise
    assert mesh.faces[-2].tolist() == [30, 31, 1]
    assert mesh.faces[-1].tolist() == [30, 1, 0]


def test_edges_are_width_apart() -> None:
    mesh = band_mesh(circle_curve(16), circle_profile(16), width=0.2)
    gaps = np.linalg.norm(mesh.vertices[0::2] - mesh.vertices[1::2], axis=1)
    assert np.allclose(gaps, 0.2)


def test_one_sided_band_closes_crosswise() -> None:
    profile = analytic_moebius(64, TWO_PI)
    mesh = band_mesh(reconstruct(profile), profile, width=0.1)
    n = 64
    assert mesh.crosswise
    assert mesh.faces[-2].tolist() == [2 * n - 2, 2 * n - 1, 0]
    assert mesh.faces[-1].tolist() == [2 * n - 2, 0, 1]
    assert mesh.faces.min() == 0 and mesh.faces.max() == 2 * n - 1


def test_width_must_be_positive() -> None:
    with pytest.raises(ValueError, match="half-width"):
        band_mesh(circle_curve(16), circle_profile(16), width=0.0)


def test_obj_output(tmp_path: Path) -> None:
    mesh = band_mesh(circle_curve(16), circle_profile(16), width=0.2)
    path = write_obj(tmp_path / "band.obj", mesh, header=["# band"])
    lines = path.read_text().splitlines()
    assert lines[0] == "# band"
    assert sum(line.startswith("v ") for line in lines) == 32
    faces = [line for line in lines if line.startswith("f ")]
    assert len(faces) == 32
    assert min(int(i) for face in faces for i in face.split()[1:]) == 1
