import numpy as np
import pytest

from metromesh.delaunay import NonConformingMeshError, delaunay_optimize, delaunay_violations
from metromesh.mesh import Mesh, conformity_problems, mesh_init, refine_pass, repair_illegal


def quad(points, tris):
    n = len(points)
    return Mesh(np.array(points, float), np.array(tris), tuple(range(n)), np.ones(n, bool))


def test_already_delaunay_unchanged():
    m = mesh_init(6, 1.0)
    out, stats = delaunay_optimize(m)
    assert stats.flips_accepted == 0
    assert np.array_equal(out.triangles, m.triangles)


def test_flip_replaces_ac_by_bd():
    # a, b, c, d counterclockwise; d sits inside the circumcircle of (a, b, c)
    a, b, c, d = (0, 0), (2, -0.2), (2.2, 1.0), (0.5, 0.9)
    m = quad([a, b, c, d], [[0, 1, 2], [0, 2, 3]])
    out, stats = delaunay_optimize(m)
    assert stats.flips_accepted == 1
    edges = {tuple(sorted((t[k], t[(k + 1) % 3]))) for t in out.triangles.tolist() for k in range(3)}
    assert (1, 3) in edges and (0, 2) not in edges
    assert np.all(out.signed_areas() > 0)
    assert np.array_equal(out.points, m.points)


def test_cocircular_square_not_flipped():
    m = quad([(0, 0), (1, 0), (1, 1), (0, 1)], [[0, 1, 2], [0, 2, 3]])
    out, stats = delaunay_optimize(m)
    assert stats.flips_accepted == 0
    assert np.array_equal(out.triangles, m.triangles)


def test_tie_resolution_is_seeded():
    m = quad([(0, 0), (1, 0), (1, 1), (0, 1)], [[0, 1, 2], [0, 2, 3]])
    outcomes = set()
    for seed in range(16):
        out, stats = delaunay_optimize(m, tie_rng=np.random.default_rng(seed))
        again, _ = delaunay_optimize(m, tie_rng=np.random.default_rng(seed))
        assert np.array_equal(out.triangles, again.triangles)
        assert delaunay_violations(out) == []
        outcomes.add(stats.ties_flipped)
    assert outcomes == {0, 1}


def test_rejects_nonconforming():
    m = mesh_init(4, 1.0)
    bad = Mesh(m.points, np.vstack([m.triangles, m.triangles[:1]]), m.constant_nodes, m.boundary)
    with pytest.raises(NonConformingMeshError, match="non-conforming mesh"):
        delaunay_optimize(bad)


def refined(n, h, steps):
    m = mesh_init(n, 1.0, h=h)
    for _ in range(steps):
        m, _ = refine_pass(m)
        m, _ = repair_illegal(m)
    return m


@pytest.mark.parametrize("full_scan", [False, True])
def test_audit_after_optimize(full_scan):
    m = refined(7, 0.12, 6)
    out, stats = delaunay_optimize(m, full_scan=full_scan)
    assert stats.flips_accepted > 0
    assert delaunay_violations(out) == []
    assert conformity_problems(out) == []
    # node positions and counts never change
    assert np.array_equal(out.points, m.points) and out.n_elements == m.n_elements
    assert out.total_area() == pytest.approx(m.total_area(), rel=1e-12)


def test_full_scan_agrees_with_adjacent_scan():
    m = refined(5, 0.15, 6)
    a, _ = delaunay_optimize(m)
    b, _ = delaunay_optimize(m, full_scan=True)
    key = lambda t: sorted(tuple(np.roll(r, -int(np.argmin(r)))) for r in t.tolist())
    assert key(a.triangles) == key(b.triangles)
