"""Element statistics of the square outline with and without optimisation."""
import argparse
from collections import Counter
from dataclasses import dataclass

from metromesh.experiments import mesh_stats, square_config


@dataclass
class Config:
    seeds: int = 10


def main(cfg: Config) -> None:
    plain = mesh_stats(square_config(optimised=False))
    print(f"plain      : {plain.n_points} points, {plain.n_elements} elements, "
          f"{plain.n_divisions} divisions, S_N {plain.S_N_mean:.4f}")
    runs = [mesh_stats(square_config(optimised=True), s) for s in range(cfg.seeds)]
    print("seed points elements divisions S_N    S_var")
    for r in runs:
        print(f"{r.seed:4d} {r.n_points:6d} {r.n_elements:8d} {r.n_divisions:9d} {r.S_N_mean:.4f} {r.S_var:.4f}")
    print("outcomes:", dict(Counter((r.n_elements, round(r.S_N_mean, 4)) for r in runs)))


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seeds", type=int, default=Config.seeds)
    main(Config(**vars(p.parse_args())))
