"""Spread of element areas before and after Metropolis relaxation on non-regular outlines."""
import argparse
from dataclasses import dataclass, replace

import numpy as np

from metromesh.experiments import NONREGULAR_FIXTURES, svar_study


@dataclass
class Config:
    seeds: int = 10
    h: float | None = None  # override the fixture element size


def main(cfg: Config) -> None:
    for name, fixture in NONREGULAR_FIXTURES.items():
        if cfg.h is not None:
            fixture = replace(fixture, h=cfg.h)
        before, after = svar_study(fixture, range(cfg.seeds))
        print(f"{name:18s} h={fixture.h:<5g} S_var before {before:.3f}  after {np.mean(after):.3f} "
              f"(seed range {min(after):.3f}-{max(after):.3f})")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seeds", type=int, default=Config.seeds)
    p.add_argument("--h", type=float, default=None)
    main(Config(**vars(p.parse_args())))
