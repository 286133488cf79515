"""Field, table and report emitters (VTK legacy ASCII, CSV, text/JSON)."""

from __future__ import annotations

import csv
import dataclasses
import json

import numpy as np

__all__ = [
    "write_vtk",
    "write_table_csv",
    "write_report_text",
    "write_report_json",
]

_VTK_TRIANGLE = 5
_VTK_POLYGON = 7
_VTK_TETRA = 10


def _cell_type(n_verts: int, dim: int) -> int:
    if dim == 3:
        return _VTK_TETRA
    return _VTK_TRIANGLE if n_verts == 3 else _VTK_POLYGON


def write_vtk(path, mesh, cell_data: dict) -> None:
    """Write a mesh plus per-cell arrays as a legacy ASCII VTK file.

    Args:
        path: output file path.
        mesh: the mesh; 2D vertices are padded with z=0.
        cell_data: mapping name -> array of shape (num_cells,) or
            (num_cells, k); higher-rank arrays are flattened per cell.
    """
    verts = np.asarray(mesh.vertices, dtype=float)
    if verts.shape[1] == 2:
        verts = np.hstack([verts, np.zeros((len(verts), 1))])
    cells = [tuple(int(v) for v in c) for c in mesh.cells]
    conn_len = sum(len(c) + 1 for c in cells)

    with open(path, "w", encoding="ascii") as f:
        f.write("# vtk DataFile Version 3.0\n")
        f.write("cosserat-dem cell fields\n")
        f.write("ASCII\nDATASET UNSTRUCTURED_GRID\n")
        f.write(f"POINTS {len(verts)} double\n")
        for p in verts:
            f.write(f"{p[0]:.12g} {p[1]:.12g} {p[2]:.12g}\n")
        f.write(f"CELLS {len(cells)} {conn_len}\n")
        for c in cells:
            f.write(" ".join([str(len(c))] + [str(v) for v in c]) + "\n")
        f.write(f"CELL_TYPES {len(cells)}\n")
        for c in cells:
            f.write(f"{_cell_type(len(c), mesh.dim)}\n")
        if not cell_data:
            return
        f.write(f"CELL_DATA {len(cells)}\n")
        f.write(f"FIELD solution {len(cell_data)}\n")
        for name, arr in cell_data.items():
            a = np.asarray(arr, dtype=float).reshape(len(cells), -1)
            f.write(f"{name} {a.shape[1]} {len(cells)} double\n")
            for row in a:
                f.write(" ".join(f"{v:.12g}" for v in row) + "\n")


def write_table_csv(path, rows: list[dict]) -> None:
    """Write a list of uniform dict rows as CSV with a header line."""
    if not rows:
        raise ValueError("no rows to write")
    with open(path, "w", newline="", encoding="ascii") as f:
        writer = csv.DictWriter(f, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def write_report_json(path, report) -> None:
    """Serialize an error report (or any dataclass tree) as JSON."""
    with open(path, "w", encoding="ascii") as f:
        json.dump(_jsonable(report), f, indent=2)
        f.write("\n")


def _fmt(v, width=12) -> str:
    if v is None:
        return " " * (width - 1) + "-"
    return f"{v:{width}.5g}"


def write_report_text(path, report) -> None:
    """Render an error report as an aligned plain-text table."""
    lines = [f"case: {report.case}"]
    if report.components:
        lines.append(
            f"{'component':<12}{'min':>12}{'max':>12}{'expected':>24}"
            f"{'rel err':>12}{'abs err':>12}"
        )
        for c in report.components:
            exp = f"[{_fmt(c.expected_min)},{_fmt(c.expected_max)}]"
            lines.append(
                f"{c.name:<12}{_fmt(c.min)}{_fmt(c.max)}{exp:>24}"
                f"{_fmt(c.max_rel_error)}{_fmt(c.max_abs_error)}"
            )
    if getattr(report, "table", None):
        lines.append(f"{'variant':<16}{'param':>10}{'computed':>12}"
                     f"{'expected':>12}{'rel err':>12}")
        for row in report.table:
            lines.append(
                f"{row['variant']:<16}{_fmt(row.get('param'), 10)}"
                f"{_fmt(row.get('computed'))}{_fmt(row.get('expected'))}"
                f"{_fmt(row.get('rel_error'))}"
            )
    for name, val in report.l2_errors.items():
        lines.append(f"L2 rel error {name}: {val:.6g}")
    for name, val in report.metrics.items():
        val = f"{val:.6g}" if isinstance(val, float) else val
        lines.append(f"{name}: {val}")
    with open(path, "w", encoding="ascii") as f:
        f.write("\n".join(lines) + "\n")
