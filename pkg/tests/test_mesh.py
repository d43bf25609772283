import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from metromesh.mesh import (CenterPlacementError, Mesh, NodeKind, SegmentKind, build_boundary_segments,
                            classify_node, conformity_problems, find_illegal, mesh_init, mesh_init_explicit,
                            prescribed_area, quality, refine_pass, repair_illegal, signed_polygon_area,
                            weighted_center)

from conftest import L_HEX, NONCONVEX_HEX


def h_for_area(A):
    return math.sqrt(4 * A / math.sqrt(3))


def single(points, h):
    n = len(points)
    return Mesh(np.array(points, float), np.array([[0, 1, 2]]), tuple(range(n)), np.ones(n, bool), h)


def test_prescribed_area_is_equilateral():
    assert prescribed_area(2.0) == pytest.approx(math.sqrt(3))


def test_mesh_init_square():
    m = mesh_init(4, 1.0)
    assert np.allclose(m.points[:4], [(1, 0), (0, 1), (-1, 0), (0, -1)], atol=1e-15)
    assert np.allclose(m.points[4], (0, 0), atol=1e-15)
    assert m.n_elements == 4
    assert m.constant_nodes == (0, 1, 2, 3)
    assert m.boundary.tolist() == [True] * 4 + [False]
    assert np.all(m.signed_areas() > 0)


@pytest.mark.parametrize("n", [3, 5, 16])
def test_mesh_init_fan_sizes(n):
    m = mesh_init(n, 1.0)
    assert m.n_elements == n
    assert m.total_area() == pytest.approx(0.5 * n * math.sin(2 * math.pi / n))


def test_mesh_init_rejects_small_n():
    with pytest.raises(ValueError):
        mesh_init(2, 1.0)


def test_superdomain_and_tol():
    m = mesh_init_explicit(((-1, 0), (1, 0), (1, 1), (-1, 1)))
    assert m.superdomain == (-1.0, 1.0, 0.0, 1.0)
    assert m.tol == pytest.approx(1e-5 * math.sqrt(5))


def test_explicit_square_uses_mean():
    m = mesh_init_explicit(((0, 0), (1, 0), (1, 1), (0, 1)))
    assert np.allclose(m.points[4], (0.5, 0.5))
    assert m.n_elements == 4


def test_explicit_nonconvex_with_weight():
    m = mesh_init_explicit(L_HEX, weight=(0.25, 0.75))
    assert conformity_problems(m) == []
    assert m.total_area() == pytest.approx(signed_polygon_area(np.array(L_HEX)))


def test_weighted_center_by_hand():
    # bbox center (0, 0); q = vertices; mean of q = (-1/30, 1/60)
    p = np.array(L_HEX)
    qc = p.mean(axis=0)
    far = np.sum(p**2 - qc**2, axis=1) >= 0
    expected = (0.5 * p[far].sum(axis=0) + 0.5 * p[~far].sum(axis=0)) / len(p)
    assert np.allclose(weighted_center(p, (0.5, 0.5)), expected)
    assert np.allclose(weighted_center(p, (0.5, 0.5)), 0.5 * p.mean(axis=0))
    assert np.array_equal(weighted_center(p, (0.25, 0.75)), weighted_center(p, (0.25, 0.75)))


def test_center_placement_failure():
    # a deep notch puts the vertex mean outside the visible kernel
    notch = ((0, 0), (4, 0), (4, 4), (2.2, 0.3), (1.8, 0.3), (0, 4))
    with pytest.raises(CenterPlacementError, match="center placement failed"):
        mesh_init_explicit(notch)


def test_explicit_rejects_bad_input():
    with pytest.raises(ValueError):
        mesh_init_explicit(((0, 0), (1, 0)))
    with pytest.raises(ValueError):
        mesh_init_explicit(((0, 0), (0, 1), (1, 1), (1, 0)))  # clockwise


def test_refine_fixed_point():
    m = mesh_init(4, 1.0, h=3.0)
    out, n = refine_pass(m)
    assert n == 0
    assert np.array_equal(out.triangles, m.triangles)


def test_refine_single_triangle_halves():
    m = single([(0, 0), (2, 0), (0, 2)], h_for_area(0.5))
    out, n = refine_pass(m)
    assert n == 1 and out.n_elements == 2
    assert out.areas() == pytest.approx([1.0, 1.0])
    assert np.allclose(out.points[3], (1, 1))
    assert out.boundary[3]


def test_refine_square_fan_splits_rim_edges():
    m = mesh_init(4, 1.0, h=h_for_area(0.25))
    out, n = refine_pass(m)
    assert n == 4 and out.n_elements == 8
    # each new node is the midpoint of a rim edge
    mids = {tuple(np.round(p, 12)) for p in out.points[5:]}
    assert mids == {(0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5), (0.5, -0.5)}
    assert out.boundary[5:].all()
    assert conformity_problems(out) == []


def test_repair_noop():
    m = mesh_init(5, 1.0)
    out, n = repair_illegal(m)
    assert n == 0 and np.array_equal(out.triangles, m.triangles)


def test_repair_forced_construction():
    pts = [(0, 0), (2, 0), (0, 2), (1, 0)]
    m = Mesh(np.array(pts, float), np.array([[0, 1, 2]]), (0, 1, 2), np.ones(4, bool))
    out, n = repair_illegal(m)
    assert n == 1
    tris = {tuple(sorted(t)) for t in out.triangles.tolist()}
    assert tris == {(0, 2, 3), (1, 2, 3)}
    assert np.all(out.signed_areas() > 0)


def test_refine_then_repair_hanging_node():
    # the big triangle bisects its shared edge; the thin neighbour must follow
    pts = [(0, 0), (2, 0), (1.2, 1.2), (0, 2)]
    m = Mesh(np.array(pts, float), np.array([[0, 1, 3], [1, 2, 3]]), (0, 1, 2, 3),
             np.ones(4, bool), h_for_area(1.0))
    out, n = refine_pass(m)
    assert n == 1
    assert len(find_illegal(out)) == 1
    fixed, k = repair_illegal(out)
    assert k == 1
    assert find_illegal(fixed) == []
    assert conformity_problems(fixed) == []


def test_segments_diamond():
    segs = build_boundary_segments(mesh_init(4, 1.0))
    assert len(segs) == 4
    assert all(s.kind is SegmentKind.SLOPED for s in segs)
    assert sorted(round(s.a, 12) for s in segs) == [-1, -1, 1, 1]


def test_segments_rectangle():
    segs = build_boundary_segments(mesh_init_explicit(((-1, 0), (1, 0), (1, 1), (-1, 1))))
    kinds = [s.kind for s in segs]
    assert kinds.count(SegmentKind.VERTICAL) == 2
    horiz = [s for s in segs if s.kind is SegmentKind.SLOPED]
    assert len(horiz) == 2 and all(s.a == 0 for s in horiz)


def test_segments_16gon_not_vertical():
    segs = build_boundary_segments(mesh_init(16, 1.0))
    assert len(segs) == 16
    assert all(s.kind is SegmentKind.SLOPED for s in segs)


def test_classify_examples():
    m = mesh_init(6, 1.0)
    segs = build_boundary_segments(m)
    mid = 0.5 * (m.points[0] + m.points[1])
    assert classify_node(mid, segs, m.tol) is NodeKind.BOUNDARY
    assert classify_node(m.points[6], segs, m.tol) is NodeKind.INTERNAL
    normal = mid / np.linalg.norm(mid)
    assert classify_node(mid - 2 * m.tol * normal, segs, m.tol) is NodeKind.INTERNAL
    # on the supporting line but beyond the segment's extent
    beyond = m.points[0] + 0.5 * (m.points[0] - m.points[1])
    assert classify_node(beyond, segs, m.tol) is NodeKind.INTERNAL


def test_quality_examples():
    A = prescribed_area(1.0)
    s = math.sqrt(2 * A)  # right isosceles triangle with legs s has area A
    m = Mesh(np.array([(0, 0), (s, 0), (0, s), (s, s)]), np.array([[0, 1, 2], [1, 3, 2]]),
             (0, 1, 3, 2), np.ones(4, bool), 1.0)
    q = quality(m)
    assert q.S_N_mean == pytest.approx(1.0) and q.S_var == pytest.approx(0.0, abs=1e-12)
    # areas 0.5A and 1.5A
    m3 = Mesh(np.array([(0, 0), (0.5 * s, 0), (0, s), (2 * s, 0)]), np.array([[0, 1, 2], [1, 3, 2]]),
              (0, 3, 2), np.ones(4, bool), 1.0)
    q3 = quality(m3)
    assert m3.areas() == pytest.approx([0.5 * A, 1.5 * A])
    assert q3.S_N_mean == pytest.approx(1.0) and q3.S_var == pytest.approx(0.5)


def test_conformity_detects_overlap():
    m = mesh_init(4, 1.0)
    bad = Mesh(m.points, np.vstack([m.triangles, m.triangles[:1]]), m.constant_nodes, m.boundary)
    assert conformity_problems(bad)


@settings(max_examples=25)
@given(st.integers(3, 12), st.floats(0.25, 0.6))
def test_refine_repair_keeps_conformity(n, h):
    m = mesh_init(n, 1.0, h=h)
    poly = m.total_area()
    for _ in range(4):
        m, split = refine_pass(m)
        m, _ = repair_illegal(m)
        assert conformity_problems(m, poly) == []
        if split == 0:
            break
