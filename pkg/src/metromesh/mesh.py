"""Mesh data model and the generation steps that build it.

The initial polygon vertices are always nodes ``0 .. N-1`` in rim order; they are
the constant nodes and never move.  Every triangle is stored counterclockwise.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .geometry import signed_area, triangle_areas

SPLIT_FACTOR = 1.5
BASE_TOL = 1e-5


class CenterPlacementError(ValueError):
    pass


def prescribed_area(h: float) -> float:
    """Area of the equilateral triangle with edge ``h``."""
    return math.sqrt(3.0) / 4.0 * h * h


@dataclass(frozen=True)
class Mesh:
    points: np.ndarray
    triangles: np.ndarray
    constant_nodes: tuple[int, ...]
    boundary: np.ndarray  # bool mask over nodes
    h: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=float).reshape(-1, 2))
        object.__setattr__(self, "triangles", np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3))
        object.__setattr__(self, "boundary", np.asarray(self.boundary, dtype=bool).reshape(-1))

    @property
    def prescribed_area(self) -> float:
        return prescribed_area(self.h)

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def n_elements(self) -> int:
        return len(self.triangles)

    @property
    def boundary_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.boundary)

    @property
    def internal_nodes(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary)

    @property
    def superdomain(self) -> tuple[float, float, float, float]:
        rim = self.points[list(self.constant_nodes)] if self.constant_nodes else self.points
        (xmin, ymin), (xmax, ymax) = rim.min(axis=0), rim.max(axis=0)
        return float(xmin), float(xmax), float(ymin), float(ymax)

    @property
    def diagonal(self) -> float:
        xmin, xmax, ymin, ymax = self.superdomain
        return math.hypot(xmax - xmin, ymax - ymin)

    @property
    def tol(self) -> float:
        """Boundary-classification tolerance (length)."""
        return BASE_TOL * self.diagonal

    @property
    def eps_degen(self) -> float:
        d = self.diagonal
        return 1e-12 * d * d

    def signed_areas(self) -> np.ndarray:
        return triangle_areas(self.points, self.triangles)

    def areas(self) -> np.ndarray:
        return np.abs(self.signed_areas())

    def total_area(self) -> float:
        return float(math.fsum(self.areas()))

    def with_size(self, h: float) -> "Mesh":
        return replace(self, h=float(h))

    def copy(self) -> "Mesh":
        return replace(self, points=self.points.copy(), triangles=self.triangles.copy(), boundary=self.boundary.copy())

    def edges(self) -> np.ndarray:
        """Unique undirected edges, sorted."""
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        e.sort(axis=1)
        return np.unique(e, axis=0)


# -- initial mesh -------------------------------------------------------------

def _fan_mesh(vertices: np.ndarray, center: np.ndarray, h: float) -> Mesh:
    n = len(vertices)
    points = np.vstack([vertices, center])
    tris = [(i, i + 1, n) for i in range(n - 1)]
    tris.append((n - 1, 0, n))
    boundary = np.ones(n + 1, dtype=bool)
    boundary[n] = False
    return Mesh(points, np.array(tris), tuple(range(n)), boundary, h)


def mesh_init(n_vertices: int, radius: float, h: float = 1.0) -> Mesh:
    """Regular ``n_vertices``-gon inscribed in a circle, fanned around its center."""
    if n_vertices < 3:
        raise ValueError("mesh_init needs at least 3 vertices")
    if not radius > 0:
        raise ValueError("radius must be positive")
    phi = 2.0 * np.pi * np.arange(n_vertices) / n_vertices
    p = np.column_stack([radius * np.cos(phi), radius * np.sin(phi)])
    center = p.sum(axis=0) / len(p)
    return _fan_mesh(p, center, h)


def weighted_center(vertices: np.ndarray, weight: Sequence[float]) -> np.ndarray:
    """Shifted fan center for non-convex outlines.

    Vertices are split into those at least as far from the superdomain center as
    the plain mean, and those closer; the two groups are summed with the two
    weights and divided by the vertex count.
    """
    p = np.asarray(vertices, dtype=float)
    origin = 0.5 * (p.min(axis=0) + p.max(axis=0))
    q = p - origin
    qc = q.sum(axis=0) / len(q)
    far = np.sum(q**2 - qc**2, axis=1) >= 0
    w1, w2 = float(weight[0]), float(weight[1])
    return origin + (w1 * q[far].sum(axis=0) + w2 * q[~far].sum(axis=0)) / len(q)


def mesh_init_explicit(vertices: Sequence[Sequence[float]], weight: Sequence[float] | None = None,
                       h: float = 1.0) -> Mesh:
    """Fan mesh from an explicit counterclockwise vertex list.

    The polygon is assumed simple; only the fan triangles are checked.
    """
    p = np.asarray(vertices, dtype=float).reshape(-1, 2)
    if len(p) < 3:
        raise ValueError("a polygon needs at least 3 vertices")
    if signed_polygon_area(p) < 0:
        raise ValueError("vertices must be listed counterclockwise")
    if weight is None:
        center = p.sum(axis=0) / len(p)
    else:
        center = weighted_center(p, weight)
    mesh = _fan_mesh(p, center, h)
    sa = mesh.signed_areas()
    if np.any(sa <= mesh.eps_degen):
        bad = np.flatnonzero(sa <= mesh.eps_degen).tolist()
        raise CenterPlacementError(
            f"center placement failed: fan center {center.tolist()} gives degenerate or inverted "
            f"triangles {bad}; try a different weight"
        )
    return mesh


def signed_polygon_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


# -- boundary -----------------------------------------------------------------

class SegmentKind(enum.Enum):
    SLOPED = "sloped"
    VERTICAL = "vertical"


class NodeKind(enum.Enum):
    BOUNDARY = "boundary"
    INTERNAL = "internal"


@dataclass(frozen=True)
class BoundarySegment:
    kind: SegmentKind
    a: float
    b: float  # unused for vertical segments
    y_min: float
    y_max: float
    endpoints: tuple[int, int]
    x_min: float = field(default=0.0)
    x_max: float = field(default=0.0)

    def distance(self, x: float, y: float) -> float:
        """Distance from (x, y) to the supporting line."""
        if self.kind is SegmentKind.VERTICAL:
            return abs(x - self.a)
        return abs(y - (self.a * x + self.b)) / math.sqrt(1.0 + self.a * self.a)

    def contains(self, x: float, y: float, tol: float) -> bool:
        if self.kind is SegmentKind.VERTICAL:
            return abs(x - self.a) <= tol and self.y_min - tol <= y <= self.y_max + tol
        return self.distance(x, y) <= tol and self.x_min - tol <= x <= self.x_max + tol


def build_boundary_segments(mesh: Mesh) -> list[BoundarySegment]:
    rim = list(mesh.constant_nodes)
    tol = mesh.tol
    segments = []
    for k, i in enumerate(rim):
        j = rim[(k + 1) % len(rim)]
        (x1, y1), (x2, y2) = mesh.points[i], mesh.points[j]
        dx, dy = x1 - x2, y1 - y2
        if abs(dx) > tol:
            a = dy / dx
            kind, b = SegmentKind.SLOPED, y1 - x1 * a
        else:
            kind, a, b = SegmentKind.VERTICAL, x1, math.nan
        segments.append(BoundarySegment(
            kind, float(a), float(b), float(min(y1, y2)), float(max(y1, y2)), (i, j),
            float(min(x1, x2)), float(max(x1, x2)),
        ))
    return segments


def classify_node(p: Sequence[float], segments: Sequence[BoundarySegment], tol: float = BASE_TOL) -> NodeKind:
    x, y = float(p[0]), float(p[1])
    for seg in segments:
        if seg.contains(x, y, tol):
            return NodeKind.BOUNDARY
    return NodeKind.INTERNAL


def segment_of(p: Sequence[float], segments: Sequence[BoundarySegment], tol: float) -> int | None:
    """Index of the closest segment containing ``p`` (None if internal)."""
    best, best_d = None, math.inf
    for k, seg in enumerate(segments):
        if seg.contains(p[0], p[1], tol):
            d = seg.distance(p[0], p[1])
            if d < best_d:
                best, best_d = k, d
    return best


def _classify_new(points: np.ndarray, boundary: np.ndarray, start: int, segments, tol) -> np.ndarray:
    extra = [classify_node(p, segments, tol) is NodeKind.BOUNDARY for p in points[start:]]
    return np.concatenate([boundary, np.array(extra, dtype=bool)])


# -- refinement ---------------------------------------------------------------

def _longest_edge(p: np.ndarray, tri: Sequence[int]) -> int:
    """Local index i of the longest edge (tri[i], tri[i+1]); ties go to the lowest i."""
    lengths = [
        math.dist(p[tri[i]], p[tri[(i + 1) % 3]])
        for i in range(3)
    ]
    longest = max(lengths)
    for i, length in enumerate(lengths):
        if length >= longest * (1.0 - 1e-12):
            return i
    raise AssertionError("unreachable")


def refine_pass(mesh: Mesh) -> tuple[Mesh, int]:
    """Bisect every element larger than 1.5x the prescribed area at its longest bar."""
    areas = mesh.areas()
    limit = SPLIT_FACTOR * mesh.prescribed_area
    to_split = areas > limit
    if not to_split.any():
        return mesh, 0

    points = [tuple(p) for p in mesh.points]
    tree = cKDTree(mesh.points)
    snap = 1e-12 * mesh.diagonal
    midpoints: dict[tuple[int, int], int] = {}
    new_tris = []
    n_split = 0
    for t, tri in enumerate(mesh.triangles.tolist()):
        if not to_split[t]:
            new_tris.append(tri)
            continue
        i = _longest_edge(mesh.points, tri)
        a, b, c = tri[i], tri[(i + 1) % 3], tri[(i + 2) % 3]
        key = (min(a, b), max(a, b))
        m = midpoints.get(key)
        if m is None:
            xy = 0.5 * (mesh.points[a] + mesh.points[b])
            hit = tree.query_ball_point(xy, snap)
            if hit:
                m = min(hit)
            else:
                m = len(points)
                points.append((float(xy[0]), float(xy[1])))
            midpoints[key] = m
        new_tris.append([a, m, c])
        new_tris.append([m, b, c])
        n_split += 1

    pts = np.array(points)
    segments = build_boundary_segments(mesh)
    boundary = _classify_new(pts, mesh.boundary, mesh.n_points, segments, mesh.tol)
    return replace(mesh, points=pts, triangles=np.array(new_tris), boundary=boundary), n_split


def find_illegal(mesh: Mesh) -> list[tuple[int, int, int]]:
    """(triangle, local edge index, node) for every node lying inside a triangle edge."""
    p = mesh.points
    t = mesh.triangles
    if len(t) == 0:
        return []
    eps = 1e-9 * mesh.diagonal
    a = t.reshape(-1)  # edge k of triangle j is (t[j,k], t[j,(k+1)%3])
    b = np.roll(t, -1, axis=1).reshape(-1)
    pa, pb = p[a], p[b]
    mid = 0.5 * (pa + pb)
    half = 0.5 * np.hypot(*(pb - pa).T)
    tree = cKDTree(p)
    hits = tree.query_ball_point(mid, half * (1.0 + 1e-9) + eps)
    out = []
    for e, cand in enumerate(hits):
        if len(cand) <= 2:
            continue
        u, v = a[e], b[e]
        d = pb[e] - pa[e]
        L2 = float(d @ d)
        for n in sorted(cand):
            if n == u or n == v:
                continue
            r = p[n] - pa[e]
            s = float(r @ d) / L2
            dist = abs(d[0] * r[1] - d[1] * r[0]) / math.sqrt(L2)
            if dist <= eps and eps / math.sqrt(L2) < s < 1.0 - eps / math.sqrt(L2):
                out.append((e // 3, e % 3, int(n)))
    return out


def repair_illegal(mesh: Mesh) -> tuple[Mesh, int]:
    """Split triangles with a node inside one of their edges until none remain."""
    count = 0
    tris = mesh.triangles.copy()
    current = mesh
    while True:
        bad = find_illegal(current)
        if not bad:
            return current, count
        first: dict[int, tuple[int, int]] = {}
        for t, k, n in bad:
            first.setdefault(t, (k, n))
        keep = np.ones(len(tris), dtype=bool)
        added = []
        for t, (k, n) in sorted(first.items()):
            tri = tris[t]
            a, b, c = tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]
            added.append([a, n, c])
            added.append([n, b, c])
            keep[t] = False
            count += 1
        # children replace the parent in place to keep element order stable
        new = []
        it = iter(added)
        for t in range(len(tris)):
            if keep[t]:
                new.append(tris[t].tolist())
            else:
                new.append(next(it))
                new.append(next(it))
        tris = np.array(new, dtype=np.int64)
        current = replace(current, triangles=tris)


# -- audits and quality --------------------------------------------------------

@dataclass(frozen=True)
class MeshQuality:
    S_N_mean: float
    S_var: float
    n_points: int
    n_elements: int


def quality(mesh: Mesh) -> MeshQuality:
    sn = mesh.areas() / mesh.prescribed_area
    return MeshQuality(
        S_N_mean=float(np.mean(sn)),
        S_var=float(np.mean(np.abs(sn - 1.0))),
        n_points=mesh.n_points,
        n_elements=mesh.n_elements,
    )


def edge_map(triangles: np.ndarray) -> dict[tuple[int, int], list[int]]:
    out: dict[tuple[int, int], list[int]] = {}
    for t, tri in enumerate(triangles.tolist()):
        for k in range(3):
            u, v = tri[k], tri[(k + 1) % 3]
            out.setdefault((min(u, v), max(u, v)), []).append(t)
    return out


def conformity_problems(mesh: Mesh, polygon_area: float | None = None) -> list[str]:
    """Return a list of violated mesh invariants (empty if the mesh is sound).

    Checks distinct indices, orientation and size, edge multiplicity, opposite
    sides across shared edges, rim edges lying on the boundary, node-on-edge
    incidences and total area.
    """
    problems = []
    t = mesh.triangles
    n = mesh.n_points
    if t.size and (t.min() < 0 or t.max() >= n):
        problems.append("triangle references a missing node")
        return problems
    if np.any((t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 0] == t[:, 2])):
        problems.append("triangle with repeated node")
    sa = mesh.signed_areas()
    if np.any(sa <= mesh.eps_degen):
        problems.append(f"{int(np.sum(sa <= mesh.eps_degen))} degenerate or clockwise triangles")
    directed: set[tuple[int, int]] = set()
    for tri in t.tolist():
        for k in range(3):
            e = (tri[k], tri[(k + 1) % 3])
            if e in directed:
                problems.append(f"directed edge {e} used twice (overlap or flipped neighbour)")
            directed.add(e)
    for (u, v), owners in edge_map(t).items():
        if len(owners) > 2:
            problems.append(f"edge {(u, v)} shared by {len(owners)} triangles")
        elif len(owners) == 1 and mesh.constant_nodes:
            if not (mesh.boundary[u] and mesh.boundary[v]):
                problems.append(f"open edge {(u, v)} away from the boundary")
    if find_illegal(mesh):
        problems.append("node lying inside a triangle edge")
    if polygon_area is None and mesh.constant_nodes:
        polygon_area = signed_polygon_area(mesh.points[list(mesh.constant_nodes)])
    if polygon_area is not None:
        total = mesh.total_area()
        if abs(total - polygon_area) > 1e-10 * max(1.0, abs(polygon_area)):
            problems.append(f"total area {total!r} differs from domain area {polygon_area!r}")
    if not set(mesh.constant_nodes) <= set(np.flatnonzero(mesh.boundary).tolist()):
        problems.append("constant node not marked boundary")
    return problems


def neighbours(triangles: np.ndarray, n_points: int) -> list[list[int]]:
    """Sorted node adjacency lists."""
    adj: list[set[int]] = [set() for _ in range(n_points)]
    for a, b, c in triangles.tolist():
        adj[a].update((b, c))
        adj[b].update((a, c))
        adj[c].update((a, b))
    return [sorted(s) for s in adj]


def incident_triangles(triangles: np.ndarray, n_points: int) -> list[list[int]]:
    inc: list[list[int]] = [[] for _ in range(n_points)]
    for t, tri in enumerate(triangles.tolist()):
        for v in tri:
            inc[v].append(t)
    return inc
