"""Benchmark runs shared by the acceptance suite and the scripts."""
from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from .delaunay import delaunay_optimize
from .fem import solve_problem
from .mesh import quality
from .metropolis import MetropolisParams
from .pipeline import GenerateConfig, generate
from .problems import CirclePoissonSpec, RectLaplaceSpec, circle_fields, circle_reference, compare, compare_rect, rect_fields

# non-regular outlines: one convex, one non-convex needing a shifted fan center
PENTAGON = ((0.0, 0.0), (2.0, 0.0), (2.4, 1.2), (1.0, 2.0), (-0.4, 1.1))
NONCONVEX_HEX = ((-1.0, -0.8), (1.1, -1.0), (0.9, 0.3), (0.1, 0.1), (0.3, 1.1), (-1.2, 0.9))
NONREGULAR_FIXTURES = {
    "convex-pentagon": GenerateConfig(h=0.15, shape="explicit-vertices", vertices=PENTAGON),
    "nonconvex-hexagon": GenerateConfig(h=0.15, shape="explicit-vertices", vertices=NONCONVEX_HEX,
                                        weight=(0.25, 0.75)),
}
SQUARE_H = 0.1  # eight bisection rounds of the unit-radius square


def with_seed(cfg: GenerateConfig, seed: int) -> GenerateConfig:
    return replace(cfg, params=replace(cfg.params, rng_seed=seed))


@dataclass
class SolveCase:
    problem: str
    h: float
    seed: int
    n_points: int
    n_elements: int
    max_abs_error: float
    worst_node: tuple[float, float]
    seconds: float


def rect_case(h: float, seed: int = 0, spec: RectLaplaceSpec = RectLaplaceSpec()) -> SolveCase:
    t0 = time.perf_counter()
    mesh, _ = generate(GenerateConfig(h=h, shape="rectangle", params=MetropolisParams(rng_seed=seed)))
    phi = solve_problem(mesh, rect_fields(spec))
    rep = compare_rect(mesh, phi, spec)
    return SolveCase("rect-laplace", h, seed, mesh.n_points, mesh.n_elements, rep.max_abs_error,
                     tuple(mesh.points[rep.argmax]), time.perf_counter() - t0)


def circle_case(h: float, seed: int = 0, spec: CirclePoissonSpec = CirclePoissonSpec()) -> SolveCase:
    t0 = time.perf_counter()
    mesh, _ = generate(GenerateConfig(h=h, shape="circle16", params=MetropolisParams(rng_seed=seed)))
    phi = solve_problem(mesh, circle_fields(spec))
    rep = compare(mesh, phi, circle_reference(spec))
    return SolveCase("circle-poisson", h, seed, mesh.n_points, mesh.n_elements, rep.max_abs_error,
                     tuple(mesh.points[rep.argmax]), time.perf_counter() - t0)


@dataclass
class MeshStats:
    seed: int
    n_points: int
    n_elements: int
    n_divisions: int
    S_N_mean: float
    S_var: float


def mesh_stats(cfg: GenerateConfig, seed: int = 0) -> MeshStats:
    mesh, rep = generate(with_seed(cfg, seed))
    q = quality(mesh)
    return MeshStats(seed, q.n_points, q.n_elements, rep.n_divisions, q.S_N_mean, q.S_var)


def square_config(optimised: bool) -> GenerateConfig:
    return GenerateConfig(h=SQUARE_H, shape="regular-polygon", n_vertices=4,
                          delaunay=optimised, metropolis=optimised)


def svar_study(cfg: GenerateConfig, seeds) -> tuple[float, list[float]]:
    """S_var without relaxation, and with Metropolis relaxation (no flips) per seed."""
    before = quality(generate(replace(cfg, delaunay=False, metropolis=False))[0]).S_var
    after = [quality(generate(with_seed(replace(cfg, delaunay=False), s))[0]).S_var for s in seeds]
    return before, after


@dataclass
class StabilityCase:
    name: str
    n_elements: int
    S_N_mean: float
    n_elements_after: int
    S_N_mean_after: float
    flips: int

    @property
    def dS_N(self) -> float:
        return abs(self.S_N_mean_after - self.S_N_mean)

    @property
    def dcount_rel(self) -> float:
        return abs(self.n_elements_after - self.n_elements) / self.n_elements


def stability_case(name: str, cfg: GenerateConfig, seed: int = 0) -> StabilityCase:
    """Re-run edge flipping on a relaxed mesh and report what moved."""
    mesh, _ = generate(with_seed(cfg, seed))
    again, stats = delaunay_optimize(mesh)
    q0, q1 = quality(mesh), quality(again)
    return StabilityCase(name, q0.n_elements, q0.S_N_mean, q1.n_elements, q1.S_N_mean, stats.flips_accepted)


def summarise(values) -> str:
    v = np.asarray(values, dtype=float)
    return f"mean {v.mean():.4g} min {v.min():.4g} max {v.max():.4g}"
