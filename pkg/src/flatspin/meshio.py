"""Deterministic exporters: CSV grids, OBJ/PLY meshes, stereographic maps.

Every float is written with 17 significant digits and traversal is
row-major, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import AtPole, ProjectionRequired, SchemaError

__all__ = [
    "fmt",
    "json_dumps",
    "write_csv",
    "stereographic_project",
    "project_points",
    "export_mesh",
]

_POLE_NAMES = {f"{s}x{i}": (i, +1 if s == "+" else -1)
               for i in range(4) for s in "+-"}


def fmt(x) -> str:
    """17-significant-digit formatting; round-trips all doubles."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def json_dumps(obj, indent: int = 0) -> str:
    """Minimal deterministic JSON writer (sorted keys, fmt() floats)."""
    pad = " " * indent
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v) or math.isinf(v):
            raise ValueError("non-finite value in JSON output")
        out = fmt(v)
        return out if any(c in out for c in ".eE") else out + ".0"
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(obj, (list, tuple, np.ndarray)):
        items = [json_dumps(v, indent) for v in obj]
        return "[" + ", ".join(items) + "]"
    if isinstance(obj, dict):
        keys = sorted(str(k) for k in obj)
        items = [
            json_dumps(k) + ": " + json_dumps(obj[k], indent) for k in keys
        ]
        return "{" + ", ".join(items) + "}"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def write_csv(path, header: list[str], columns: list[np.ndarray]):
    """Column arrays to CSV, row-major, 17 significant digits."""
    rows = len(columns[0])
    with open(path, "w", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for r in range(rows):
            f.write(",".join(fmt(c[r]) for c in columns) + "\n")


def parse_pole(name: str):
    if name not in _POLE_NAMES:
        raise SchemaError("$.export.projection.pole",
                          f"unknown pole {name!r}; use e.g. '+x0'")
    return _POLE_NAMES[name]


def stereographic_project(p, pole) -> np.ndarray:
    """Project a unit 4-vector from the coordinate pole (axis, sign).

    Returns the remaining three coordinates, in increasing index order,
    divided by 1 - sign * p[axis].  Raises AtPole within 1e-9 of the pole.
    """
    if isinstance(pole, str):
        pole = parse_pole(pole)
    axis, sign = pole
    p = np.asarray(p, dtype=float)
    if abs(np.linalg.norm(p) - 1.0) > 1e-6:
        raise ValueError("point is not on the unit sphere")
    denom = 1.0 - sign * p[axis]
    if abs(denom) < 1e-9:
        raise AtPole(f"point lies at the projection pole {axis, sign}")
    rest = [p[i] for i in range(4) if i != axis]
    return np.array(rest) / denom


def project_points(points, projection) -> tuple[np.ndarray, dict]:
    """Apply a projection spec to an (n, 4) array; returns (n, 3) + meta."""
    points = np.asarray(points, dtype=float)
    kind = projection.get("type")
    if kind == "stereographic":
        axis, sign = parse_pole(projection["pole"])
        denom = 1.0 - sign * points[:, axis]
        if np.min(np.abs(denom)) < 1e-9:
            raise AtPole("a vertex lies at the projection pole")
        rest = np.delete(points, axis, axis=1)
        return rest / denom[:, None], {
            "type": "stereographic",
            "pole": projection["pole"],
        }
    if kind == "drop":
        axis = int(projection.get("axis", 0))
        if not 0 <= axis <= 3:
            raise SchemaError("$.export.projection.axis", "axis must be 0..3")
        return np.delete(points, axis, axis=1), {"type": "drop", "axis": axis}
    raise SchemaError("$.export.projection.type",
                      f"unknown projection type {kind!r}")


def _auto_projection(points) -> dict:
    """Pick the coordinate pole with the most clearance; if every pole lies
    on the patch (possible for tori), fall back to dropping axis 0."""
    best = None
    for name, (axis, sign) in sorted(_POLE_NAMES.items()):
        clearance = float(np.min(np.abs(1.0 - sign * points[:, axis])))
        if best is None or clearance > best[1]:
            best = (name, clearance)
    if best[1] > 1e-3:
        return {"type": "stereographic", "pole": best[0]}
    return {"type": "drop", "axis": 0}


def _grid_faces(n1: int, n2: int, periodic: tuple[bool, bool]):
    """Triangle indices over an (n1+1) x (n2+1) node grid; periodic
    directions are welded (their last node row reuses the first)."""
    p1, p2 = periodic
    rows = n1 if p1 else n1 + 1
    cols = n2 if p2 else n2 + 1

    def vid(i, j):
        return (i % rows) * cols + (j % cols)

    faces = []
    for i in range(n1):
        for j in range(n2):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            faces.append((a, b, c))
            faces.append((a, c, d))
    return rows, cols, faces


def export_mesh(F, path, fmt_name: str, periodic=(False, False),
                spherical=False, projection=None) -> dict:
    """Write a surface grid as csv4d, obj, or ply.

    F has shape (n1+1, n2+1, 4).  For obj/ply a 3-D projection is needed:
    explicit via `projection`, otherwise automatic for spherical patches;
    non-spherical patches without a projection raise ProjectionRequired.
    Periodic directions are welded, so a doubly periodic n x n torus grid
    becomes n^2 vertices and 2 n^2 triangles.
    """
    F = np.asarray(F, dtype=float)
    n1, n2 = F.shape[0] - 1, F.shape[1] - 1
    if fmt_name == "csv4d":
        flat = F.reshape(-1, 4)
        write_csv(
            path,
            ["F0", "F1", "F2", "F3"],
            [flat[:, k] for k in range(4)],
        )
        return {"format": "csv4d", "vertices": flat.shape[0]}

    if fmt_name not in ("obj", "ply"):
        raise SchemaError("$.export.format", f"unknown format {fmt_name!r}")

    rows, cols, faces = _grid_faces(n1, n2, periodic)
    verts4 = F[:rows, :cols].reshape(-1, 4)
    if projection is None:
        if not spherical:
            raise ProjectionRequired(
                "obj/ply export of a non-spherical patch needs a projection"
            )
        projection = _auto_projection(verts4)
    verts3, meta = project_points(verts4, projection)

    with open(path, "w", newline="\n") as f:
        if fmt_name == "obj":
            for v in verts3:
                f.write("v " + " ".join(fmt(x) for x in v) + "\n")
            for a, b, c in faces:
                f.write(f"f {a + 1} {b + 1} {c + 1}\n")
        else:
            f.write("ply\nformat ascii 1.0\n")
            f.write(f"element vertex {len(verts3)}\n")
            f.write("property double x\nproperty double y\nproperty double z\n")
            f.write(f"element face {len(faces)}\n")
            f.write("property list uchar int vertex_indices\nend_header\n")
            for v in verts3:
                f.write(" ".join(fmt(x) for x in v) + "\n")
            for a, b, c in faces:
                f.write(f"3 {a} {b} {c}\n")

    return {
        "format": fmt_name,
        "vertices": int(len(verts3)),
        "faces": int(len(faces)),
        "projection": meta,
    }
