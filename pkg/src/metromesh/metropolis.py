"""Force-driven node relocation with Metropolis acceptance.

Each movable node is pulled along its edges towards edge length ``h``; the move is
scored by the change of the squared area deviation of its incident triangles and
accepted downhill, or uphill with probability ``exp(-dE / T)``.  Boundary nodes
feel only their two rim neighbours, so they slide along their segment.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from numba import njit

from .mesh import BoundarySegment, Mesh, SegmentKind, build_boundary_segments, incident_triangles, neighbours, segment_of


class CoincidentNodesError(ValueError):
    pass


class BoundaryAdjacencyError(ValueError):
    pass


@dataclass(frozen=True)
class MetropolisParams:
    force_F: float = 0.1
    temperature_T: float = 0.01
    tolerance: float | None = None  # None -> 1e-8 * A^2 * n_nodes
    max_sweeps: int = 10_000
    rng_seed: int = 0
    min_area_fraction: float = 1e-6  # moves leaving a triangle below this * A are rejected as folds

    def __post_init__(self):
        if not self.force_F > 0:
            raise ValueError("force_F must be positive")
        if not self.temperature_T > 0:
            raise ValueError("temperature_T must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")
        if self.min_area_fraction < 0:
            raise ValueError("min_area_fraction must be non-negative")


@dataclass
class SweepReport:
    sweeps_run: int = 0
    moves_proposed: int = 0
    moves_accepted_downhill: int = 0
    moves_accepted_metropolis: int = 0
    moves_rejected_inversion: int = 0
    initial_energy: float = 0.0
    final_energy: float = 0.0
    sweep_energies: list[float] | None = None

    @property
    def moves_accepted(self) -> int:
        return self.moves_accepted_downhill + self.moves_accepted_metropolis


def node_energy(mesh: Mesh, node: int) -> float:
    """Sum of squared deviations from the prescribed area over the node's triangles."""
    A = mesh.prescribed_area
    mask = np.any(mesh.triangles == node, axis=1)
    areas = np.abs(mesh.signed_areas()[mask])
    return float(np.sum((areas - A) ** 2))


def total_energy(mesh: Mesh) -> float:
    return float(np.sum((mesh.areas() - mesh.prescribed_area) ** 2))


def spring_step(px: float, py: float, nbrs, xs, ys, h: float, F: float) -> tuple[float, float]:
    fx = fy = 0.0
    for j in nbrs:
        rx, ry = px - xs[j], py - ys[j]
        r = math.hypot(rx, ry)
        if r == 0.0:
            raise CoincidentNodesError("coincident nodes")
        s = F * (r - h) / r
        fx += s * rx
        fy += s * ry
    return px - fx, py - fy


def propose_internal(mesh: Mesh, node: int, params: MetropolisParams) -> tuple[float, float]:
    """New position pulled by springs of rest length ``h`` along every incident edge."""
    if mesh.boundary[node]:
        raise ValueError(f"node {node} is a boundary node")
    nbrs = neighbours(mesh.triangles, mesh.n_points)[node]
    xs, ys = mesh.points[:, 0].tolist(), mesh.points[:, 1].tolist()
    return spring_step(xs[node], ys[node], nbrs, xs, ys, mesh.h, params.force_F)


def rim_neighbours(node: int, candidates: Sequence[int], xs, ys, seg: BoundarySegment, tol: float) -> tuple[int, int]:
    """The closest boundary neighbour on either side of ``node`` along its segment."""
    if seg.kind is SegmentKind.VERTICAL:
        dx, dy = 0.0, 1.0
    else:
        n = math.hypot(1.0, seg.a)
        dx, dy = 1.0 / n, seg.a / n
    before = after = None
    for j in candidates:
        if not seg.contains(xs[j], ys[j], tol):
            continue
        s = (xs[j] - xs[node]) * dx + (ys[j] - ys[node]) * dy
        if s < 0 and (before is None or s > before[0]):
            before = (s, j)
        elif s > 0 and (after is None or s < after[0]):
            after = (s, j)
    if before is None or after is None:
        raise BoundaryAdjacencyError(f"boundary adjacency broken at node {node}")
    return before[1], after[1]


def _clamp_to_segment(x, y, seg: BoundarySegment, xs, ys) -> tuple[float, float]:
    i, j = seg.endpoints
    x0, y0, x1, y1 = xs[i], ys[i], xs[j], ys[j]
    dx, dy = x1 - x0, y1 - y0
    t = ((x - x0) * dx + (y - y0) * dy) / (dx * dx + dy * dy)
    t = min(max(t, 0.0), 1.0)
    return x0 + t * dx, y0 + t * dy


def propose_boundary(mesh: Mesh, node: int, segments: Sequence[BoundarySegment],
                     params: MetropolisParams) -> tuple[float, float]:
    """New position of a non-constant boundary node, kept on its segment."""
    if not mesh.boundary[node] or node in mesh.constant_nodes:
        raise ValueError(f"node {node} is not a movable boundary node")
    xs, ys = mesh.points[:, 0].tolist(), mesh.points[:, 1].tolist()
    k = segment_of((xs[node], ys[node]), segments, mesh.tol)
    if k is None:
        raise BoundaryAdjacencyError(f"boundary adjacency broken at node {node}")
    nbrs = neighbours(mesh.triangles, mesh.n_points)[node]
    cand = [j for j in nbrs if mesh.boundary[j]]
    pair = rim_neighbours(node, cand, xs, ys, segments[k], mesh.tol)
    x, y = spring_step(xs[node], ys[node], pair, xs, ys, mesh.h, params.force_F)
    return _clamp_to_segment(x, y, segments[k], xs, ys)


def metropolis_accept(dE: float, T: float, rng: np.random.Generator) -> tuple[bool, bool]:
    """(accepted, used_random_draw)."""
    if dE < 0.0:
        return True, False
    r = rng.random()
    # exp underflows to 0 for tiny T, so only downhill moves pass
    return math.exp(-dE / T) > r, True


@njit(cache=True)
def _sweep(xs, ys, tris, inc_ptr, inc_idx, nbr_ptr, nbr_idx, order, on_rim, pair, seg,
           h, F, T, A, eps, draws, draw_pos, counts):
    """One pass over ``order``; positions are updated in place.

    counts: proposed, downhill, metropolis, folded.  Returns (sum |dE| accepted, draw_pos).
    """
    moved = 0.0
    for oi in range(order.shape[0]):
        i = order[oi]
        px = xs[i]
        py = ys[i]
        fx = 0.0
        fy = 0.0
        if on_rim[oi]:
            for q in range(2):
                j = pair[oi, q]
                rx = px - xs[j]
                ry = py - ys[j]
                r = math.hypot(rx, ry)
                s = F * (r - h) / r
                fx += s * rx
                fy += s * ry
            nx = px - fx
            ny = py - fy
            x0 = seg[oi, 0]
            y0 = seg[oi, 1]
            dx = seg[oi, 2] - x0
            dy = seg[oi, 3] - y0
            t = ((nx - x0) * dx + (ny - y0) * dy) / (dx * dx + dy * dy)
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
            nx = x0 + t * dx
            ny = y0 + t * dy
        else:
            for q in range(nbr_ptr[i], nbr_ptr[i + 1]):
                j = nbr_idx[q]
                rx = px - xs[j]
                ry = py - ys[j]
                r = math.hypot(rx, ry)
                s = F * (r - h) / r
                fx += s * rx
                fy += s * ry
            nx = px - fx
            ny = py - fy
        if nx == px and ny == py:
            continue
        counts[0] += 1
        dE = 0.0
        folded = False
        for q in range(inc_ptr[i], inc_ptr[i + 1]):
            tt = inc_idx[q]
            a = tris[tt, 0]
            b = tris[tt, 1]
            c = tris[tt, 2]
            ax = xs[a]
            ay = ys[a]
            bx = xs[b]
            by = ys[b]
            cx = xs[c]
            cy = ys[c]
            old = 0.5 * ((bx - ax) * (cy - ay) - (cx - ax) * (by - ay))
            if a == i:
                ax = nx
                ay = ny
            elif b == i:
                bx = nx
                by = ny
            else:
                cx = nx
                cy = ny
            new = 0.5 * ((bx - ax) * (cy - ay) - (cx - ax) * (by - ay))
            if new <= eps:
                folded = True
                break
            dE += (new - A) ** 2 - (old - A) ** 2
        if folded:
            counts[3] += 1
            continue
        if dE < 0.0:
            counts[1] += 1
        else:
            r = draws[draw_pos]
            draw_pos += 1
            if not math.exp(-dE / T) > r:
                continue
            counts[2] += 1
        xs[i] = nx
        ys[i] = ny
        moved += abs(dE)
    return moved, draw_pos


def _csr(lists) -> tuple[np.ndarray, np.ndarray]:
    ptr = np.zeros(len(lists) + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(x) for x in lists])
    idx = np.array([v for x in lists for v in x], dtype=np.int64)
    return ptr, idx


def metropolis_sweeps(mesh: Mesh, params: MetropolisParams,
                      segments: Sequence[BoundarySegment] | None = None,
                      record_energy: bool = False) -> tuple[Mesh, SweepReport]:
    """Sweep internal then boundary nodes in ascending order until converged.

    A sweep converges when the summed |dE| of its accepted moves drops below the
    tolerance.  Random numbers are drawn only for uphill moves, in sweep order.
    """
    if segments is None:
        segments = build_boundary_segments(mesh)
    rng = np.random.default_rng(params.rng_seed)
    A = mesh.prescribed_area
    tol = params.tolerance
    if tol is None:
        tol = 1e-8 * A * A * mesh.n_points

    xs = mesh.points[:, 0].copy()
    ys = mesh.points[:, 1].copy()
    xl, yl = xs.tolist(), ys.tolist()
    nbr = neighbours(mesh.triangles, mesh.n_points)
    constant = set(mesh.constant_nodes)
    internal = [i for i in range(mesh.n_points) if not mesh.boundary[i]]
    movable_bnd = [i for i in range(mesh.n_points) if mesh.boundary[i] and i not in constant]

    order = np.array(internal + movable_bnd, dtype=np.int64)
    on_rim = np.zeros(len(order), dtype=np.bool_)
    on_rim[len(internal):] = True
    pair = np.zeros((len(order), 2), dtype=np.int64)
    seg = np.zeros((len(order), 4))
    for oi, i in enumerate(movable_bnd, start=len(internal)):
        k = segment_of((xl[i], yl[i]), segments, mesh.tol)
        if k is None:
            raise BoundaryAdjacencyError(f"boundary adjacency broken at node {i}")
        cand = [j for j in nbr[i] if mesh.boundary[j]]
        pair[oi] = rim_neighbours(i, cand, xl, yl, segments[k], mesh.tol)
        e0, e1 = segments[k].endpoints
        seg[oi] = (xl[e0], yl[e0], xl[e1], yl[e1])
    for i in internal:
        for j in nbr[i]:
            if xl[i] == xl[j] and yl[i] == yl[j]:
                raise CoincidentNodesError("coincident nodes")

    nbr_ptr, nbr_idx = _csr(nbr)
    inc_ptr, inc_idx = _csr(incident_triangles(mesh.triangles, mesh.n_points))
    tris = np.ascontiguousarray(mesh.triangles, dtype=np.int64)
    counts = np.zeros(4, dtype=np.int64)
    draws = rng.random(max(len(order), 1))
    pos = 0
    fold_eps = max(mesh.eps_degen, params.min_area_fraction * A)

    report = SweepReport(sweep_energies=[] if record_energy else None)
    report.initial_energy = total_energy(mesh)
    for sweep in range(params.max_sweeps):
        if len(draws) - pos < len(order):
            # keep the unread tail so the stream is consumed strictly in order
            draws = np.concatenate([draws[pos:], rng.random(max(len(order), 1))])
            pos = 0
        moved, pos = _sweep(xs, ys, tris, inc_ptr, inc_idx, nbr_ptr, nbr_idx, order, on_rim, pair, seg,
                            mesh.h, params.force_F, params.temperature_T, A, fold_eps,
                            draws, pos, counts)
        report.sweeps_run = sweep + 1
        if record_energy:
            report.sweep_energies.append(total_energy(replace(mesh, points=np.column_stack([xs, ys]))))
        if moved < tol:
            break

    report.moves_proposed, report.moves_accepted_downhill, report.moves_accepted_metropolis, \
        report.moves_rejected_inversion = (int(c) for c in counts)
    out = replace(mesh, points=np.column_stack([xs, ys]))
    report.final_energy = total_energy(out)
    return out, report
