"""Poisson problem on the 16-gon disc: max nodal error and its spread over seeds."""
import argparse
from dataclasses import dataclass, field

from metromesh.experiments import circle_case, summarise


@dataclass
class Config:
    hs: list[float] = field(default_factory=lambda: [0.28, 0.2, 0.1])
    seeds: int = 10


def main(cfg: Config) -> None:
    print("h      nodes  seed0 error  seeds")
    for h in cfg.hs:
        runs = [circle_case(h, s) for s in range(cfg.seeds)]
        print(f"{h:<6g} {runs[0].n_points:5d}  {runs[0].max_abs_error:.4f}       "
              f"{summarise([c.max_abs_error for c in runs])}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--hs", type=float, nargs="+", default=Config().hs)
    p.add_argument("--seeds", type=int, default=Config.seeds)
    main(Config(**vars(p.parse_args())))
