"""Table and mesh file formats."""

from src.tables.formats import (
    TableFormatError,
    read_curve,
    read_key_values,
    read_profile,
    read_table,
    write_curve,
    write_fields,
    write_key_values,
    write_plot_table,
    write_profile,
    write_table,
)
from src.tables.mesh import BandMesh, band_mesh, write_obj

__all__ = [
    "BandMesh",
    "TableFormatError",
    "band_mesh",
    "read_curve",
    "read_key_values",
    "read_profile",
    "read_table",
    "write_curve",
    "write_fields",
    "write_key_values",
    "write_obj",
    "write_plot_table",
    "write_profile",
    "write_table",
]
