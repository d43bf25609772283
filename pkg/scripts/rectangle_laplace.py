"""Laplace problem on the rectangle: max nodal error against the series solution."""
import argparse
from dataclasses import dataclass, field
from pathlib import Path

from metromesh.render import render_svg
from metromesh.experiments import rect_case, summarise
from metromesh.fem import solve_problem
from metromesh.metropolis import MetropolisParams
from metromesh.pipeline import GenerateConfig, generate
from metromesh.problems import RectLaplaceSpec, compare_rect, rect_fields


@dataclass
class Config:
    hs: list[float] = field(default_factory=lambda: [0.2, 0.1, 0.08, 0.06])
    seeds: int = 3
    out: str | None = None  # directory for SVGs of the seed-0 solutions


def main(cfg: Config) -> None:
    print("h      nodes  seed0 error  worst node            seeds")
    for h in cfg.hs:
        runs = [rect_case(h, s) for s in range(cfg.seeds)]
        r = runs[0]
        print(f"{h:<6g} {r.n_points:5d}  {r.max_abs_error:.4f}       "
              f"({r.worst_node[0]:.3f}, {r.worst_node[1]:.3f})  {summarise([c.max_abs_error for c in runs])}")
        if cfg.out:
            mesh, _ = generate(GenerateConfig(h=h, shape="rectangle", params=MetropolisParams(rng_seed=0)))
            phi = solve_problem(mesh, rect_fields(RectLaplaceSpec()))
            rep = compare_rect(mesh, phi, RectLaplaceSpec())
            Path(cfg.out).mkdir(parents=True, exist_ok=True)
            Path(cfg.out, f"rect_h{h:g}_phi.svg").write_text(render_svg(mesh, phi, f"phi, h={h:g}"))
            Path(cfg.out, f"rect_h{h:g}_err.svg").write_text(render_svg(mesh, rep.nodewise_errors, f"|error|, h={h:g}"))


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--hs", type=float, nargs="+", default=Config().hs)
    p.add_argument("--seeds", type=int, default=Config.seeds)
    p.add_argument("--out")
    main(Config(**vars(p.parse_args())))
