import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from metromesh.mesh import (Mesh, build_boundary_segments, conformity_problems, mesh_init, mesh_init_explicit,
                            prescribed_area, refine_pass, repair_illegal)
from metromesh.metropolis import (CoincidentNodesError, MetropolisParams, metropolis_accept, metropolis_sweeps,
                                  node_energy, propose_boundary, propose_internal, spring_step, total_energy)


def h_for_area(A):
    return math.sqrt(4 * A / math.sqrt(3))


def refined(m, steps):
    for _ in range(steps):
        m, _ = refine_pass(m)
        m, _ = repair_illegal(m)
    return m


def hexagon_patch(jitter=0.06, seed=3):
    """Regular hexagon split into 24 triangles (7 internal nodes), internal nodes jittered."""
    m = refined(mesh_init(6, 1.0, h=0.5), 3)
    assert len(m.internal_nodes) == 7
    rng = np.random.default_rng(seed)
    pts = m.points.copy()
    pts[m.internal_nodes] += rng.uniform(-jitter, jitter, size=(7, 2))
    return replace(m, points=pts)


def test_params_validation():
    with pytest.raises(ValueError):
        MetropolisParams(force_F=0)
    with pytest.raises(ValueError):
        MetropolisParams(temperature_T=-1)
    with pytest.raises(ValueError):
        MetropolisParams(max_sweeps=0)


def test_node_energy_zero_at_prescribed_area():
    m = mesh_init(4, 1.0, h=h_for_area(0.5))  # fan triangles have area 1/2
    assert node_energy(m, 4) == pytest.approx(0.0, abs=1e-15)


def test_node_energy_symmetric_deviation():
    A = prescribed_area(1.0)
    d = 0.2 * A
    # two right triangles with legs (b, c) and (b2, c) sharing the vertical leg
    c = 1.0
    b1, b2 = 2 * (A + d) / c, 2 * (A - d) / c
    pts = np.array([(0, 0), (b1, 0), (0, c), (-b2, 0)])
    m = Mesh(pts, np.array([[0, 1, 2], [0, 2, 3]]), (1, 2, 3), np.array([False, True, True, True]), 1.0)
    assert sorted(m.areas()) == pytest.approx([A - d, A + d])
    assert node_energy(m, 0) == pytest.approx(2 * d * d)


def test_spring_single_neighbour():
    h, d, F = 0.5, 0.2, 0.1
    x, y = spring_step(0.0, 0.0, [1], [0.0, h + d], [0.0, 0.0], h, F)
    # r = p_i - p_j points away from the neighbour, so an over-long edge pulls the node towards it
    assert x == pytest.approx(F * d) and y == 0.0


def test_spring_rest_length_is_fixed_point():
    m = mesh_init(4, 0.7, h=0.7)
    assert propose_internal(m, 4, MetropolisParams()) == pytest.approx((0.0, 0.0), abs=1e-15)


def test_symmetric_star_cancels():
    m = mesh_init(4, 1.0, h=0.3)  # all four edges over-long by the same amount
    assert propose_internal(m, 4, MetropolisParams()) == pytest.approx((0.0, 0.0), abs=1e-15)


def test_coincident_nodes():
    with pytest.raises(CoincidentNodesError, match="coincident nodes"):
        spring_step(0.0, 0.0, [1], [0.0, 0.0], [0.0, 0.0], 1.0, 0.1)


def rectangle_refined(steps=2, h=0.5):
    return refined(mesh_init_explicit(((-1, 0), (1, 0), (1, 1), (-1, 1)), h=h), steps)


def test_boundary_midpoint_fixed():
    m = refined(mesh_init(4, 1.0, h=h_for_area(0.2)), 1)
    segs = build_boundary_segments(m)
    node = next(i for i in m.boundary_nodes if i not in m.constant_nodes)
    assert propose_boundary(m, node, segs, MetropolisParams()) == pytest.approx(tuple(m.points[node]))


def test_boundary_move_is_tangential():
    m = rectangle_refined()
    segs = build_boundary_segments(m)
    bottom = [i for i in m.boundary_nodes if i not in m.constant_nodes and abs(m.points[i, 1]) < 1e-12]
    node = bottom[0]
    pts = m.points.copy()
    pts[node, 0] += 0.1
    moved = replace(m, points=pts)
    x, y = propose_boundary(moved, node, segs, MetropolisParams())
    assert y == 0.0 and x != pts[node, 0]


def test_constant_node_not_proposed():
    m = rectangle_refined()
    with pytest.raises(ValueError):
        propose_boundary(m, 0, build_boundary_segments(m), MetropolisParams())


def test_accept_downhill_without_draw():
    rng = np.random.default_rng(0)
    assert metropolis_accept(-1.0, 0.01, rng) == (True, False)


def test_acceptance_rate_binomial():
    T, dE, n = 1.0, 0.7, 10_000
    rng = np.random.default_rng(2024)
    hits = sum(metropolis_accept(dE, T, rng)[0] for _ in range(n))
    p = math.exp(-dE / T)
    sigma = math.sqrt(n * p * (1 - p))
    assert abs(hits - n * p) <= 3 * sigma


def test_fig5_style_relaxation_lowers_energy():
    m = hexagon_patch()
    out, rep = metropolis_sweeps(m, MetropolisParams(force_F=0.1, temperature_T=0.01, rng_seed=5))
    assert rep.final_energy < rep.initial_energy
    assert rep.final_energy == pytest.approx(total_energy(out))
    assert conformity_problems(out) == []
    # springs of rest length h restore the regular layout
    assert rep.final_energy < 1e-3 * rep.initial_energy


@pytest.mark.parametrize("mesh_factory", [hexagon_patch, lambda: refined(mesh_init(7, 1.0, h=0.18), 6)])
def test_tiny_temperature_is_monotone(mesh_factory):
    m = mesh_factory()
    out, rep = metropolis_sweeps(m, MetropolisParams(temperature_T=1e-300, max_sweeps=200), record_energy=True)
    assert rep.sweeps_run > 3
    # exp(-dE/T) underflows for any dE > 0, so only non-increasing moves pass
    e = [rep.initial_energy] + rep.sweep_energies
    assert all(b <= a * (1 + 1e-12) for a, b in zip(e, e[1:]))


def test_seed_determinism():
    m = refined(mesh_init(5, 1.0, h=0.3), 4)
    p = MetropolisParams(rng_seed=11, temperature_T=1e-7)
    a, ra = metropolis_sweeps(m, p)
    b, rb = metropolis_sweeps(m, p)
    assert a.points.tobytes() == b.points.tobytes()
    assert ra == rb


def test_constant_nodes_fixed_and_boundary_on_segments():
    m = rectangle_refined(steps=4, h=0.2)
    segs = build_boundary_segments(m)
    out, _ = metropolis_sweeps(m, MetropolisParams(rng_seed=1), segs)
    c = list(m.constant_nodes)
    assert np.array_equal(out.points[c], m.points[c])
    for i in out.boundary_nodes:
        assert min(s.distance(*out.points[i]) for s in segs) <= out.tol
    assert conformity_problems(out) == []


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1), st.floats(1e-9, 1.0))
def test_sweeps_never_fold(seed, T):
    m = refined(mesh_init(6, 1.0, h=0.3), 4)
    out, _ = metropolis_sweeps(m, MetropolisParams(rng_seed=seed, temperature_T=T, max_sweeps=30))
    assert np.all(out.signed_areas() > 0)
    assert out.total_area() == pytest.approx(m.total_area(), rel=1e-9)
