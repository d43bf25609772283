"""Command-line front end: generate, solve, validate, render."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .fem import SolveError, apply_dirichlet, assemble, residual, solve
from .formats import FormatError, error_report_to_csv, read_mesh, read_solution, write_mesh, write_solution
from .mesh import CenterPlacementError, quality
from .metropolis import MetropolisParams
from .pipeline import GenerateConfig, generate
from .problems import (CirclePoissonSpec, RectLaplaceSpec, circle_fields, circle_reference, compare,
                       compare_rect, rect_fields)
from .render import render_svg

log = logging.getLogger("metromesh")

SHAPES = ("regular-polygon", "explicit-vertices", "rectangle", "circle16")
PROBLEMS = ("rect-laplace", "circle-poisson")


@dataclass
class RunConfig:
    command: str
    shape: str = "regular-polygon"
    h: float = 0.1
    divisions_cap: int = 50
    delaunay: bool = True
    metropolis: bool = True
    post_delaunay: bool = False
    n_vertices: int = 4
    radius: float = 1.0
    vertices: tuple[tuple[float, float], ...] | None = None
    weight: tuple[float, float] | None = None
    metropolis_params: MetropolisParams = field(default_factory=MetropolisParams)
    problem: str = "rect-laplace"
    phi0: float = 1.0
    series_terms: int = 200
    mesh_path: str | None = None
    solution_path: str | None = None
    out: str | None = None
    tolerance: float | None = None

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("h must be positive")
        if self.shape not in SHAPES:
            raise ValueError(f"unknown shape {self.shape!r}")
        if self.problem not in PROBLEMS:
            raise ValueError(f"unknown problem {self.problem!r}")


def _pair(text: str) -> tuple[float, float]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != 2:
        raise ValueError(f"expected two numbers, got {text!r}")
    return float(parts[0]), float(parts[1])


def read_vertices(path: str) -> tuple[tuple[float, float], ...]:
    verts = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            verts.append(_pair(line))
    return tuple(verts)


def read_config_file(path: str) -> dict[str, str]:
    """``key = value`` lines; '#' starts a comment.  Keys use the long flag names."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def _truthy(v: str) -> bool:
    if v.lower() in ("1", "true", "yes", "on"):
        return True
    if v.lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="metromesh", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        # defaults are None so config-file values can fill the gaps
        sp.add_argument("--config", help="key = value file; flags win on conflict")
        sp.add_argument("--out")

    g = sub.add_parser("generate", help="build a mesh")
    common(g)
    g.add_argument("--shape", choices=SHAPES)
    g.add_argument("--vertices-file")
    g.add_argument("--n-vertices", type=int)
    g.add_argument("--radius", type=float)
    g.add_argument("--h", type=float)
    g.add_argument("--divisions", type=int, dest="divisions_cap")
    g.add_argument("--no-delaunay", action="store_const", const=False, dest="delaunay")
    g.add_argument("--no-metropolis", action="store_const", const=False, dest="metropolis")
    g.add_argument("--post-delaunay", action="store_const", const=True, dest="post_delaunay")
    g.add_argument("--force", type=float)
    g.add_argument("--temperature", type=float)
    g.add_argument("--seed", type=int)
    g.add_argument("--weight", type=_pair)

    s = sub.add_parser("solve", help="solve a benchmark problem on a mesh")
    common(s)
    s.add_argument("--mesh", dest="mesh_path")
    s.add_argument("--problem", choices=PROBLEMS)
    s.add_argument("--phi0", type=float)
    s.add_argument("--series-terms", type=int)

    v = sub.add_parser("validate", help="compare a solution with the analytic reference")
    common(v)
    v.add_argument("--mesh", dest="mesh_path")
    v.add_argument("--solution", dest="solution_path")
    v.add_argument("--problem", choices=PROBLEMS)
    v.add_argument("--phi0", type=float)
    v.add_argument("--series-terms", type=int)
    v.add_argument("--tolerance", type=float, help="fail when max error exceeds this")

    r = sub.add_parser("render", help="write an SVG of a mesh, optionally coloured by a solution")
    common(r)
    r.add_argument("--mesh", dest="mesh_path")
    r.add_argument("--solution", dest="solution_path")
    return p


_CASTS = {
    "h": float, "radius": float, "force": float, "temperature": float, "phi0": float, "tolerance": float,
    "n_vertices": int, "divisions_cap": int, "divisions": int, "seed": int, "series_terms": int,
    "delaunay": _truthy, "metropolis": _truthy, "post_delaunay": _truthy, "weight": _pair,
}


def config_from_args(ns: argparse.Namespace, env: dict[str, str] | None = None) -> RunConfig:
    env = os.environ if env is None else env
    values: dict = {}
    if getattr(ns, "config", None):
        allowed = set(RunConfig.__dataclass_fields__) | {"force", "temperature", "seed", "vertices_file"}
        for k, v in read_config_file(ns.config).items():
            if k == "divisions":
                k = "divisions_cap"
            if k not in allowed or k == "command":
                raise ValueError(f"unknown config key {k!r}")
            values[k] = _CASTS.get(k, str)(v)
    for k, v in vars(ns).items():
        if v is not None and k not in ("config", "verbose"):
            values[k] = v
    if "seed" not in values and env.get("METROMESH_SEED"):
        values["seed"] = int(env["METROMESH_SEED"])
    if values.get("vertices_file"):
        values["vertices"] = read_vertices(values["vertices_file"])
    params = MetropolisParams(
        force_F=values.get("force", 0.1),
        temperature_T=values.get("temperature", 0.01),
        rng_seed=values.get("seed", 0),
    )
    known = RunConfig.__dataclass_fields__
    kwargs = {k: v for k, v in values.items() if k in known and k != "metropolis_params"}
    return RunConfig(metropolis_params=params, **kwargs)


def _need(path: str | None, what: str) -> str:
    if not path:
        raise ValueError(f"{what} path is required")
    return path


def cmd_generate(cfg: RunConfig) -> int:
    gc = GenerateConfig(
        h=cfg.h, shape=cfg.shape, n_vertices=cfg.n_vertices, radius=cfg.radius, vertices=cfg.vertices,
        weight=cfg.weight, divisions_cap=cfg.divisions_cap, delaunay=cfg.delaunay,
        metropolis=cfg.metropolis, post_delaunay=cfg.post_delaunay, params=cfg.metropolis_params,
    )
    mesh, report = generate(gc)
    write_mesh(mesh, _need(cfg.out, "--out"))
    q = quality(mesh)
    print(f"n_points={q.n_points} n_elements={q.n_elements} divisions={report.n_divisions} "
          f"S_N_mean={q.S_N_mean:.6f} S_var={q.S_var:.6f}")
    return 0


def _problem(cfg: RunConfig):
    if cfg.problem == "rect-laplace":
        spec = RectLaplaceSpec(phi0=cfg.phi0, series_terms_N=cfg.series_terms)
        return spec, rect_fields(spec)
    spec = CirclePoissonSpec()
    return spec, circle_fields(spec)


def cmd_solve(cfg: RunConfig) -> int:
    mesh = read_mesh(_need(cfg.mesh_path, "--mesh"))
    _, fields = _problem(cfg)
    system = apply_dirichlet(assemble(mesh, fields), mesh, fields.gamma)
    phi = solve(system)
    write_solution(mesh, phi, _need(cfg.out, "--out"))
    print(f"nodes={mesh.n_points} relative_residual={residual(system, phi):.3e}")
    return 0


def cmd_validate(cfg: RunConfig) -> int:
    mesh = read_mesh(_need(cfg.mesh_path, "--mesh"))
    pts, phi = read_solution(_need(cfg.solution_path, "--solution"))
    if pts.shape != mesh.points.shape or not np.allclose(pts, mesh.points, rtol=0, atol=1e-12):
        raise FormatError("solution does not match the mesh nodes")
    spec, _ = _problem(cfg)
    if isinstance(spec, RectLaplaceSpec):
        report = compare_rect(mesh, phi, spec)
    else:
        report = compare(mesh, phi, circle_reference(spec))
    if cfg.out:
        Path(cfg.out).write_text(error_report_to_csv(mesh, report))
    print(report.summary())
    if cfg.tolerance is not None and report.max_abs_error > cfg.tolerance:
        print(f"max error {report.max_abs_error:.6g} exceeds tolerance {cfg.tolerance:g}", file=sys.stderr)
        return 1
    return 0


def cmd_render(cfg: RunConfig) -> int:
    mesh = read_mesh(_need(cfg.mesh_path, "--mesh"))
    values = None
    if cfg.solution_path:
        pts, values = read_solution(cfg.solution_path)
        if pts.shape != mesh.points.shape:
            raise FormatError("solution does not match the mesh nodes")
    Path(_need(cfg.out, "--out")).write_text(render_svg(mesh, values))
    return 0


COMMANDS = {"generate": cmd_generate, "solve": cmd_solve, "validate": cmd_validate, "render": cmd_render}


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (ValueError, OSError, SolveError, CenterPlacementError) as exc:
        print(f"metromesh {ns.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
