"""Effect of one more edge-flip pass on relaxed meshes."""
import argparse
from dataclasses import dataclass, replace

from metromesh.experiments import NONREGULAR_FIXTURES, mesh_stats, square_config, stability_case
from metromesh.pipeline import GenerateConfig


@dataclass
class Config:
    seeds: int = 3


def main(cfg: Config) -> None:
    fixtures = {"square": square_config(optimised=True), "circle16": GenerateConfig(h=0.1, shape="circle16"),
                **NONREGULAR_FIXTURES}
    print("name               seed flips elements      S_N")
    for name, fx in fixtures.items():
        for seed in range(cfg.seeds):
            c = stability_case(name, fx, seed)
            print(f"{name:18s} {seed:4d} {c.flips:5d} {c.n_elements:4d}->{c.n_elements_after:<4d} "
                  f"{c.S_N_mean:.4f}->{c.S_N_mean_after:.4f}")
    print("pipeline with and without the final pass (seed 0):")
    for name, fx in fixtures.items():
        a, b = mesh_stats(fx), mesh_stats(replace(fx, post_delaunay=True))
        print(f"  {name:18s} {a.n_elements} -> {b.n_elements} elements, S_N {a.S_N_mean:.4f} -> {b.S_N_mean:.4f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seeds", type=int, default=Config.seeds)
    main(Config(**vars(p.parse_args())))
