"""Triangle mesh of the display band in Wavefront OBJ text form."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.geometry.models import CurvatureTwistProfile, FramedCurve
from src.geometry.rulings import band_surface, closes_crosswise
from src.tables.formats import format_value


@dataclass(frozen=True)
class BandMesh:
    vertices: np.ndarray  # (2n, 3); vertex 2i on edge a, 2i + 1 on edge b
    faces: np.ndarray  # (2n, 3), 0-based
    crosswise: bool


def band_mesh(curve: FramedCurve, profile: CurvatureTwistProfile, width: float) -> BandMesh:
    """Strip of quads split into triangles, closed over the seam.

    A one-sided band closes crosswise: edge a of the last node meets edge b of
    node 0.
    """
    edge_a, edge_b = band_surface(curve, profile, 0.5 * width)
    n = curve.n_nodes
    vertices = np.empty((2 * n, 3))
    vertices[0::2] = edge_a[:n]
    vertices[1::2] = edge_b[:n]
    crosswise = closes_crosswise(curve)
    faces = []
    for i in range(n):
        a0, b0 = 2 * i, 2 * i + 1
        if i < n - 1:
            a1, b1 = 2 * i + 2, 2 * i + 3
        elif crosswise:
            a1, b1 = 1, 0
        else:
            a1, b1 = 0, 1
        faces.append((a0, b0, b1))
        faces.append((a0, b1, a1))
    return BandMesh(vertices=vertices, faces=np.array(faces, dtype=int), crosswise=crosswise)


def write_obj(path: str | Path, mesh: BandMesh, header: Iterable[str] = ()) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = list(header)
    lines.extend("v " + " ".join(format_value(c) for c in v) for v in mesh.vertices)
    lines.extend("f " + " ".join(str(i + 1) for i in f) for f in mesh.faces)
    path.write_text("\n".join(lines) + "\n")
    return path
