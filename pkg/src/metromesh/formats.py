"""Plain-text mesh format, solution CSV and error report I/O.

Mesh file layout::

    meshfmt 1
    h <value>
    points <N>
    <idx> <x> <y> <flag>        flag: C constant, B boundary, I internal
    triangles <M>
    <idx> <n1> <n2> <n3>

Reals are written with 17 significant digits so a round trip is exact.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .mesh import Mesh
from .problems import ErrorReport


class FormatError(ValueError):
    pass


def _r(v: float) -> str:
    return f"{float(v):.17g}"


def mesh_to_text(mesh: Mesh) -> str:
    const = set(mesh.constant_nodes)
    lines = ["meshfmt 1", f"h {_r(mesh.h)}", f"points {mesh.n_points}"]
    for i, (x, y) in enumerate(mesh.points.tolist()):
        flag = "C" if i in const else ("B" if mesh.boundary[i] else "I")
        lines.append(f"{i} {_r(x)} {_r(y)} {flag}")
    lines.append(f"triangles {mesh.n_elements}")
    for k, (a, b, c) in enumerate(mesh.triangles.tolist()):
        lines.append(f"{k} {a} {b} {c}")
    return "\n".join(lines) + "\n"


def mesh_from_text(text: str) -> Mesh:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or rows[0] != ["meshfmt", "1"]:
        raise FormatError("not a meshfmt 1 file")
    h = 1.0
    pos = 1
    if rows[pos][0] == "h":
        h = float(rows[pos][1])
        pos += 1
    try:
        if rows[pos][0] != "points":
            raise FormatError("expected 'points' header")
        n = int(rows[pos][1])
        pts = np.zeros((n, 2))
        flags = []
        for i in range(n):
            r = rows[pos + 1 + i]
            if int(r[0]) != i:
                raise FormatError(f"point index {r[0]} out of order")
            pts[i] = float(r[1]), float(r[2])
            flags.append(r[3])
        pos += 1 + n
        if rows[pos][0] != "triangles":
            raise FormatError("expected 'triangles' header")
        m = int(rows[pos][1])
        tris = np.array([[int(v) for v in rows[pos + 1 + k][1:4]] for k in range(m)], dtype=np.int64)
    except (IndexError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"malformed mesh file: {exc}") from exc
    if any(f not in ("C", "B", "I") for f in flags):
        raise FormatError("node flag must be C, B or I")
    boundary = np.array([f != "I" for f in flags])
    const = tuple(i for i, f in enumerate(flags) if f == "C")
    return Mesh(pts, tris.reshape(-1, 3), const, boundary, h)


def write_mesh(mesh: Mesh, path: str | Path) -> None:
    Path(path).write_text(mesh_to_text(mesh))


def read_mesh(path: str | Path) -> Mesh:
    return mesh_from_text(Path(path).read_text())


def solution_to_csv(mesh: Mesh, phi) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["node_id", "x", "y", "phi"])
    for i, ((x, y), v) in enumerate(zip(mesh.points.tolist(), np.asarray(phi, dtype=float).tolist())):
        w.writerow([i, _r(x), _r(y), _r(v)])
    return buf.getvalue()


def write_solution(mesh: Mesh, phi, path: str | Path) -> None:
    Path(path).write_text(solution_to_csv(mesh, phi))


def read_solution(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Returns (points, phi) in node order."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or set(rows[0]) != {"node_id", "x", "y", "phi"}:
        raise FormatError("solution CSV needs columns node_id,x,y,phi")
    rows.sort(key=lambda r: int(r["node_id"]))
    if [int(r["node_id"]) for r in rows] != list(range(len(rows))):
        raise FormatError("solution node ids must be 0..N-1")
    pts = np.array([[float(r["x"]), float(r["y"])] for r in rows])
    phi = np.array([float(r["phi"]) for r in rows])
    return pts, phi


def error_report_to_csv(mesh: Mesh, report: ErrorReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["node_id", "x", "y", "abs_error", "excluded"])
    excl = set(report.excluded)
    for i, ((x, y), e) in enumerate(zip(mesh.points.tolist(), report.nodewise_errors)):
        w.writerow([i, _r(x), _r(y), _r(e), int(i in excl)])
    return buf.getvalue()
