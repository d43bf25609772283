"""Generation pipeline: divide, repair, flip, relax, repeated until no element is too big."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .delaunay import FlipStats, delaunay_optimize
from .mesh import Mesh, MeshQuality, build_boundary_segments, mesh_init, mesh_init_explicit, quality, refine_pass, repair_illegal
from .metropolis import MetropolisParams, SweepReport, metropolis_sweeps

log = logging.getLogger(__name__)

RECTANGLE = ((-1.0, 0.0), (1.0, 0.0), (1.0, 1.0), (-1.0, 1.0))


@dataclass(frozen=True)
class GenerateConfig:
    h: float
    shape: str = "regular-polygon"  # regular-polygon | explicit-vertices | rectangle | circle16
    n_vertices: int = 4
    radius: float = 1.0
    vertices: tuple[tuple[float, float], ...] | None = None
    weight: tuple[float, float] | None = None
    divisions_cap: int = 50
    delaunay: bool = True
    metropolis: bool = True
    post_delaunay: bool = False
    resolve_ties: bool = True
    params: MetropolisParams = field(default_factory=MetropolisParams)


@dataclass
class DivisionRecord:
    division: int
    split: int
    repaired: int
    flips: FlipStats | None
    sweeps: SweepReport | None
    quality: MeshQuality


@dataclass
class GenerateReport:
    divisions: list[DivisionRecord] = field(default_factory=list)
    post_flips: FlipStats | None = None  # the optional final re-pass after the last relaxation

    @property
    def n_divisions(self) -> int:
        return sum(1 for d in self.divisions if d.split > 0)


def initial_mesh(cfg: GenerateConfig) -> Mesh:
    if cfg.shape == "regular-polygon":
        return mesh_init(cfg.n_vertices, cfg.radius, h=cfg.h)
    if cfg.shape == "circle16":
        return mesh_init(16, cfg.radius, h=cfg.h)
    if cfg.shape == "rectangle":
        return mesh_init_explicit(cfg.vertices or RECTANGLE, cfg.weight, h=cfg.h)
    if cfg.shape == "explicit-vertices":
        if not cfg.vertices:
            raise ValueError("explicit-vertices needs a vertex list")
        return mesh_init_explicit(cfg.vertices, cfg.weight, h=cfg.h)
    raise ValueError(f"unknown shape {cfg.shape!r}")


Observer = Callable[[str, Mesh], None]


def _noop(stage: str, mesh: Mesh) -> None:
    pass


def optimise(mesh: Mesh, cfg: GenerateConfig, params: MetropolisParams, segments=None,
             observer: Observer = _noop):
    flips = sweeps = None
    if cfg.delaunay:
        tie_rng = np.random.default_rng([params.rng_seed, 1]) if cfg.resolve_ties else None
        mesh, flips = delaunay_optimize(mesh, tie_rng=tie_rng)
        observer("delaunay", mesh)
    if cfg.metropolis:
        mesh, sweeps = metropolis_sweeps(mesh, params, segments)
        observer("metropolis", mesh)
    return mesh, flips, sweeps


def generate(cfg: GenerateConfig, mesh: Mesh | None = None,
             observer: Observer = _noop) -> tuple[Mesh, GenerateReport]:
    """Run the full pipeline from the configured outline (or a given start mesh).

    ``observer(stage, mesh)`` is called after each stage ("init", "repair",
    "delaunay", "metropolis", "post-delaunay"); splitting and repair count as one
    stage because a bisection pass leaves hanging nodes until repaired.
    """
    if mesh is None:
        mesh = initial_mesh(cfg)
    observer("init", mesh)
    segments = build_boundary_segments(mesh)
    report = GenerateReport()
    for division in range(1, cfg.divisions_cap + 1):
        mesh, split = refine_pass(mesh)
        if split == 0:
            break
        mesh, repaired = repair_illegal(mesh)
        observer("repair", mesh)
        # seed varies per division so repeated stages draw independent streams
        params = replace(cfg.params, rng_seed=cfg.params.rng_seed * 1000 + division)
        mesh, flips, sweeps = optimise(mesh, cfg, params, segments, observer)
        q = quality(mesh)
        report.divisions.append(DivisionRecord(division, split, repaired, flips, sweeps, q))
        log.info("division %d: split %d, repaired %d, %d points, %d elements, S_N %.4f",
                 division, split, repaired, q.n_points, q.n_elements, q.S_N_mean)
    if cfg.post_delaunay:
        # stability probe: reconfigure the relaxed mesh once more, nodes untouched
        mesh, report.post_flips = delaunay_optimize(mesh)
        observer("post-delaunay", mesh)
        log.info("post pass: %d flips", report.post_flips.flips_accepted)
    return mesh, report


def outline(vertices: Sequence[Sequence[float]]) -> tuple[tuple[float, float], ...]:
    return tuple((float(x), float(y)) for x, y in vertices)
