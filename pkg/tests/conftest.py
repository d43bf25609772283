import os
from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings

from metromesh.experiments import NONCONVEX_HEX, PENTAGON
from metromesh.metropolis import MetropolisParams
from metromesh.pipeline import GenerateConfig, generate

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

L_HEX = ((-1.0, -1.0), (1.0, -1.0), (1.0, 0.2), (0.2, 0.2), (0.2, 1.0), (-1.0, 1.0))

# small configurations covering every outline kind; all stay under 2,000 elements
SMALL_CONFIGS = {
    "square": GenerateConfig(h=0.15, shape="regular-polygon", n_vertices=4),
    "circle16": GenerateConfig(h=0.15, shape="circle16"),
    "rectangle": GenerateConfig(h=0.12, shape="rectangle"),
    "pentagon": GenerateConfig(h=0.25, shape="explicit-vertices", vertices=PENTAGON),
    "hexagon": GenerateConfig(h=0.25, shape="explicit-vertices", vertices=NONCONVEX_HEX, weight=(0.25, 0.75)),
    "square-plain": GenerateConfig(h=0.15, shape="regular-polygon", n_vertices=4, delaunay=False, metropolis=False),
}


@lru_cache(maxsize=None)
def generated(name: str):
    return generate(SMALL_CONFIGS[name])


@pytest.fixture(params=sorted(SMALL_CONFIGS))
def small_mesh(request):
    return generated(request.param)[0]


def seeded(cfg: GenerateConfig, seed: int) -> GenerateConfig:
    from dataclasses import replace
    return replace(cfg, params=MetropolisParams(rng_seed=seed))


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
