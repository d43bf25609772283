"""Benchmark boundary-value problems with analytic references and nodal error metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .fem import CoefficientFields
from .mesh import Mesh

RECT_DOMAIN = (-1.0, 1.0, 0.0, 1.0)


@dataclass(frozen=True)
class RectLaplaceSpec:
    """Laplace on [-1,1]x[0,1] with phi = phi0 on x = +-1 and 0 elsewhere."""
    phi0: float = 1.0
    series_terms_N: int = 200
    domain: tuple[float, float, float, float] = RECT_DOMAIN
    corner_value: str = "mean"  # value at the four corners: "mean" (phi0/2), "phi0" or "zero"
    exclude_corners: bool = True

    def __post_init__(self):
        if self.series_terms_N < 1:
            raise ValueError("series_terms_N must be >= 1")
        if self.corner_value not in ("mean", "phi0", "zero"):
            raise ValueError(f"unknown corner_value {self.corner_value!r}")


@dataclass(frozen=True)
class CirclePoissonSpec:
    """Poisson on the unit disc with lap(phi) = rhs_constant and phi = 0 on the rim."""
    radius: float = 1.0
    rhs_constant: float = -1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")


@dataclass
class ErrorReport:
    max_abs_error: float
    nodewise_errors: list[float]
    h_used: float
    excluded: list[int] = field(default_factory=list)

    @property
    def argmax(self) -> int:
        errs = np.array(self.nodewise_errors)
        if self.excluded:
            errs[self.excluded] = -np.inf
        return int(np.argmax(errs))

    def summary(self) -> str:
        return (f"max_abs_error={self.max_abs_error:.6g} at node {self.argmax} "
                f"h={self.h_used:g} nodes={len(self.nodewise_errors)} excluded={len(self.excluded)}")


def _cosh_ratio(n: int, x: float) -> float:
    """cosh(n pi x) / cosh(n pi) without overflow."""
    ax = abs(x)
    k = n * math.pi
    return math.exp(k * (ax - 1.0)) * (1.0 + math.exp(-2.0 * k * ax)) / (1.0 + math.exp(-2.0 * k))


def rect_series(p: Sequence[float], spec: RectLaplaceSpec = RectLaplaceSpec()) -> float:
    x, y = float(p[0]), float(p[1])
    terms = [(1.0 / n) * _cosh_ratio(n, x) * math.sin(n * math.pi * y)
             for n in range(1, spec.series_terms_N + 1, 2)]
    return 4.0 * spec.phi0 / math.pi * math.fsum(terms)


def circle_exact(p: Sequence[float]) -> float:
    x, y = float(p[0]), float(p[1])
    return 0.25 * (1.0 - x * x - y * y)


def circle_reference(spec: CirclePoissonSpec = CirclePoissonSpec()) -> Callable[[float, float], float]:
    """Exact solution of lap(phi) = s on a disc of radius R with zero rim data."""
    R2, s = spec.radius**2, spec.rhs_constant
    return lambda x, y: -0.25 * s * (R2 - x * x - y * y)


def _on(v: float, target: float, tol: float) -> bool:
    return abs(v - target) <= tol


def rect_gamma(spec: RectLaplaceSpec, tol: float = 1e-9) -> Callable[[float, float], float]:
    x0, x1, y0, y1 = spec.domain
    corner = {"mean": 0.5 * spec.phi0, "phi0": spec.phi0, "zero": 0.0}[spec.corner_value]

    def gamma(x: float, y: float) -> float:
        on_side = _on(x, x0, tol) or _on(x, x1, tol)
        on_cap = _on(y, y0, tol) or _on(y, y1, tol)
        if on_side and on_cap:
            return corner
        return spec.phi0 if on_side else 0.0

    return gamma


def rect_corner_nodes(mesh: Mesh, spec: RectLaplaceSpec) -> list[int]:
    x0, x1, y0, y1 = spec.domain
    tol = mesh.tol
    out = []
    for i, (x, y) in enumerate(mesh.points.tolist()):
        if (_on(x, x0, tol) or _on(x, x1, tol)) and (_on(y, y0, tol) or _on(y, y1, tol)):
            out.append(i)
    return out


def rect_fields(spec: RectLaplaceSpec) -> CoefficientFields:
    return CoefficientFields.constant(epsilon=1.0, rho=0.0, gamma=rect_gamma(spec))


def circle_fields(spec: CirclePoissonSpec = CirclePoissonSpec()) -> CoefficientFields:
    # weak form K phi + f = 0 with f = int rho L  <=>  eps lap(phi) = rho, so rho = eps * s
    return CoefficientFields.constant(epsilon=1.0, rho=spec.rhs_constant, gamma=0.0)


def compare(mesh: Mesh, numeric: Sequence[float], reference: Callable[[float, float], float],
            exclude: Sequence[int] = ()) -> ErrorReport:
    numeric = np.asarray(numeric, dtype=float)
    if numeric.shape != (mesh.n_points,):
        raise ValueError(f"invalid argument: expected {mesh.n_points} values, got {numeric.shape}")
    ref = np.array([reference(x, y) for x, y in mesh.points.tolist()])
    errs = np.abs(numeric - ref)
    mask = np.ones(len(errs), dtype=bool)
    mask[list(exclude)] = False
    mx = float(errs[mask].max()) if mask.any() else 0.0
    return ErrorReport(mx, errs.tolist(), mesh.h, sorted(int(i) for i in exclude))


def rect_reference(spec: RectLaplaceSpec) -> Callable[[float, float], float]:
    return lambda x, y: rect_series((x, y), spec)


def compare_rect(mesh: Mesh, numeric: Sequence[float], spec: RectLaplaceSpec = RectLaplaceSpec()) -> ErrorReport:
    exclude = rect_corner_nodes(mesh, spec) if spec.exclude_corners else []
    return compare(mesh, numeric, rect_reference(spec), exclude)
