"""Edge-flip optimisation towards a Delaunay triangulation.

Only connectivity changes; node positions and the element count are preserved.
Rim edges have a single adjacent triangle and are never flipped.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .geometry import TriangleGeom, in_circumcircle, signed_area
from .mesh import Mesh, edge_map


class NonConformingMeshError(ValueError):
    pass


@dataclass
class FlipStats:
    passes: int = 0
    flips_accepted: int = 0
    flips_rejected: int = 0
    ties_flipped: int = 0


def incircle_eps(mesh: Mesh) -> float:
    d = mesh.diagonal
    return 1e-10 * d**4


def _check_input(mesh: Mesh) -> None:
    seen: set[tuple[int, int]] = set()
    for tri in mesh.triangles.tolist():
        if len(set(tri)) != 3:
            raise NonConformingMeshError("non-conforming mesh: repeated node in triangle")
        for k in range(3):
            e = (tri[k], tri[(k + 1) % 3])
            if e in seen:
                raise NonConformingMeshError(f"non-conforming mesh: directed edge {e} appears twice")
            seen.add(e)
    if np.any(mesh.signed_areas() <= mesh.eps_degen):
        raise NonConformingMeshError("non-conforming mesh: degenerate or inverted triangle")


class _Flipper:
    """Mutable connectivity plus an edge -> triangles index kept in sync with flips."""

    def __init__(self, mesh: Mesh):
        self.p = mesh.points
        self.tris = mesh.triangles.tolist()
        self.eps_area = mesh.eps_degen
        self.eps = incircle_eps(mesh)
        self.edges = {k: list(v) for k, v in edge_map(mesh.triangles).items()}
        self.stats = FlipStats()

    def neighbour(self, t: int, u: int, v: int) -> int | None:
        owners = self.edges.get((min(u, v), max(u, v)), ())
        for s in owners:
            if s != t:
                return s
        return None

    def geom(self, tri) -> TriangleGeom:
        return TriangleGeom.from_points(self.p[tri[0]], self.p[tri[1]], self.p[tri[2]])

    def try_flip(self, t: int, k: int) -> bool:
        """Try to exchange edge k of triangle t for the opposite diagonal.

        Returns True when the flip was made.
        """
        tri = self.tris[t]
        u, v, w = tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]
        s = self.neighbour(t, u, v)
        if s is None:
            return False
        other = self.tris[s]
        x = next(n for n in other if n != u and n != v)
        before = in_circumcircle(self.geom(tri), self.p[x])
        if not before < -self.eps:
            return False
        # candidate pair: (u, x, w) and (x, v, w), counterclockwise when uxvw is convex
        t1, t2 = [u, x, w], [x, v, w]
        ok = (
            signed_area(self.p[u], self.p[x], self.p[w]) > self.eps_area
            and signed_area(self.p[x], self.p[v], self.p[w]) > self.eps_area
        )
        if ok:
            after = in_circumcircle(self.geom(t1), self.p[v])
            ok = after > before
        if not ok:
            self.stats.flips_rejected += 1
            return False
        self._replace(t, s, t1, t2)
        self.stats.flips_accepted += 1
        return True

    def _replace(self, t, s, t1, t2):
        old_t, old_s = self.tris[t], self.tris[s]
        for tri, idx in ((old_t, t), (old_s, s)):
            for k in range(3):
                a, b = tri[k], tri[(k + 1) % 3]
                key = (min(a, b), max(a, b))
                self.edges[key].remove(idx)
                if not self.edges[key]:
                    del self.edges[key]
        self.tris[t], self.tris[s] = t1, t2
        for tri, idx in ((t1, t), (t2, s)):
            for k in range(3):
                a, b = tri[k], tri[(k + 1) % 3]
                self.edges.setdefault((min(a, b), max(a, b)), []).append(idx)

    def pass_adjacent(self) -> int:
        flips = 0
        for t in range(len(self.tris)):
            k = 0
            while k < 3:
                if self.try_flip(t, k):
                    flips += 1
                    k = 0  # triangle t changed, re-examine all its edges
                    continue
                k += 1
        return flips

    def resolve_ties(self, rng: np.random.Generator) -> None:
        """Flip each co-circular interior diagonal with probability 1/2.

        Both diagonals of a co-circular quad are Delaunay, so the result stays a
        Delaunay triangulation; the coin only picks among equivalent ones.
        """
        for t in range(len(self.tris)):
            for k in range(3):
                tri = self.tris[t]
                u, v, w = tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]
                s = self.neighbour(t, u, v)
                if s is None or s < t:
                    continue
                x = next(n for n in self.tris[s] if n != u and n != v)
                if abs(in_circumcircle(self.geom(tri), self.p[x])) > self.eps:
                    continue
                if rng.random() >= 0.5:
                    continue
                if (signed_area(self.p[u], self.p[x], self.p[w]) > self.eps_area
                        and signed_area(self.p[x], self.p[v], self.p[w]) > self.eps_area):
                    self._replace(t, s, [u, x, w], [x, v, w])
                    self.stats.ties_flipped += 1

    def pass_full_scan(self) -> int:
        """The original formulation: test every mesh point against every triangle."""
        flips = 0
        px, py = self.p[:, 0], self.p[:, 1]
        for t in range(len(self.tris)):
            restart = True
            while restart:
                restart = False
                tri = self.tris[t]
                a, b, c = (self.p[i] for i in tri)
                if signed_area(a, b, c) > 0:  # clockwise row order
                    b, c = c, b
                adx, ady = a[0] - px, a[1] - py
                bdx, bdy = b[0] - px, b[1] - py
                cdx, cdy = c[0] - px, c[1] - py
                ad, bd, cd = adx**2 + ady**2, bdx**2 + bdy**2, cdx**2 + cdy**2
                det = adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx)
                det[list(tri)] = 0.0
                for kpt in np.flatnonzero(det < -self.eps):
                    for k in range(3):
                        s = self.neighbour(t, tri[k], tri[(k + 1) % 3])
                        if s is not None and kpt in self.tris[s]:
                            if self.try_flip(t, k):
                                flips += 1
                                restart = True
                            break
                    if restart:
                        break
        return flips


def delaunay_optimize(mesh: Mesh, max_passes: int = 100, full_scan: bool = False,
                      tie_rng: np.random.Generator | None = None) -> tuple[Mesh, FlipStats]:
    """Flip edges until a full pass makes no change or ``max_passes`` is reached.

    Co-circular configurations are never flipped by the improvement test.  With
    ``tie_rng`` the converged mesh additionally gets a seeded choice of diagonal
    for every co-circular quad.
    """
    _check_input(mesh)
    f = _Flipper(mesh)
    if tie_rng is not None:
        f.resolve_ties(tie_rng)
    for _ in range(max_passes):
        f.stats.passes += 1
        flips = f.pass_full_scan() if full_scan else f.pass_adjacent()
        if flips == 0:
            break
    return replace(mesh, triangles=np.array(f.tris, dtype=np.int64).reshape(-1, 3)), f.stats


def delaunay_violations(mesh: Mesh, eps: float | None = None) -> list[tuple[int, int]]:
    """Interior edges whose opposite vertex lies strictly inside the neighbour's circumcircle."""
    if eps is None:
        eps = incircle_eps(mesh)
    p = mesh.points
    bad = []
    for (u, v), owners in edge_map(mesh.triangles).items():
        if len(owners) != 2:
            continue
        t, s = owners
        tri_t, tri_s = mesh.triangles[t], mesh.triangles[s]
        x = next(n for n in tri_s if n != u and n != v)
        w = next(n for n in tri_t if n != u and n != v)
        gt = TriangleGeom.from_points(*p[tri_t])
        gs = TriangleGeom.from_points(*p[tri_s])
        if in_circumcircle(gt, p[x]) < -eps or in_circumcircle(gs, p[w]) < -eps:
            bad.append((u, v))
    return bad
