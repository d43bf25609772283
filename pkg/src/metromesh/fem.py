"""Linear-triangle finite elements for -div(eps grad phi) + rho = 0 with Dirichlet data.

Assembly follows the stationarity condition K phi + f = 0, so the solved system is
K phi = -f.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .geometry import AreaCoords, SingularTransformError, TriangleGeom
from .mesh import Mesh

Field = Callable[[float, float], float]


class SolveError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadratureRule:
    points: tuple[AreaCoords, ...]
    weights: tuple[float, ...]  # sum to 1; physical integral is |det J|/2 * sum(W f)

    @property
    def order(self) -> int:
        return len(self.points)


def quadrature_rule(order: int) -> QuadratureRule:
    """1-point (exact to degree 1) or 3-point midpoint rule (exact to degree 2)."""
    if order == 1:
        return QuadratureRule((AreaCoords(1 / 3, 1 / 3),), (1.0,))
    if order == 3:
        return QuadratureRule(
            (AreaCoords(0.5, 0.5), AreaCoords(0.0, 0.5), AreaCoords(0.5, 0.0)),
            (1 / 3, 1 / 3, 1 / 3),
        )
    raise ValueError(f"unsupported quadrature order {order}; use 1 or 3")


def integrate(tri: TriangleGeom, f: Callable[[float, float, float], float], rule: QuadratureRule) -> float:
    """Integrate f(L1, L2, L3) over the triangle."""
    half_det = tri.area  # |det J| / 2
    return half_det * math.fsum(w * f(*q.as_tuple()) for q, w in zip(rule.points, rule.weights))


def _const(value: float) -> Field:
    return lambda x, y: value


@dataclass(frozen=True)
class CoefficientFields:
    epsilon: Field = field(default_factory=lambda: _const(1.0))
    rho: Field = field(default_factory=lambda: _const(0.0))
    gamma: Field = field(default_factory=lambda: _const(0.0))
    constant_epsilon: float | None = 1.0  # set when epsilon is known to be constant

    @classmethod
    def constant(cls, epsilon: float = 1.0, rho: float = 0.0, gamma: Field | float = 0.0) -> "CoefficientFields":
        g = gamma if callable(gamma) else _const(float(gamma))
        return cls(_const(float(epsilon)), _const(float(rho)), g, float(epsilon))


@dataclass(frozen=True)
class ElementMatrices:
    K_local: np.ndarray
    f_local: np.ndarray
    node_ids: tuple[int, int, int]


def element_matrices(tri: TriangleGeom, fields: CoefficientFields, rule: QuadratureRule,
                     node_ids: tuple[int, int, int] = (0, 1, 2)) -> ElementMatrices:
    if tri.signed_area == 0.0 or tri.area < 1e-300:
        raise SingularTransformError("singular transform: degenerate element")
    T = tri.gradient_transform()  # row k is grad L_k
    G = T @ T.T
    half_det = tri.area
    eps_int = 0.0
    f_local = np.zeros(3)
    for q, w in zip(rule.points, rule.weights):
        L = q.as_tuple()
        x, y = tri.to_cartesian(q)
        eps_int += w * fields.epsilon(x, y)
        rho = fields.rho(x, y)
        f_local += w * rho * np.asarray(L)
    return ElementMatrices(half_det * eps_int * G, half_det * f_local, node_ids)


@dataclass(frozen=True)
class LinearSystem:
    """K phi + f = 0; rows listed in ``dirichlet`` are identity rows after constraints."""
    matrix: sp.csr_matrix
    rhs: np.ndarray
    dirichlet: Mapping[int, float] = field(default_factory=dict)


def assemble(mesh: Mesh, fields: CoefficientFields, rule: QuadratureRule | None = None) -> LinearSystem:
    rule = rule or quadrature_rule(3)
    n = mesh.n_points
    rows, cols, vals = [], [], []
    f = np.zeros(n)
    for tri in mesh.triangles.tolist():
        geom = TriangleGeom.from_points(*mesh.points[tri])
        em = element_matrices(geom, fields, rule, tuple(tri))
        for l in range(3):
            f[tri[l]] += em.f_local[l]
            for m in range(3):
                rows.append(tri[l])
                cols.append(tri[m])
                vals.append(em.K_local[l, m])
    K = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    K.sum_duplicates()
    return LinearSystem(K, f, {})


def apply_dirichlet(system: LinearSystem, mesh: Mesh, gamma: Field) -> LinearSystem:
    """Impose phi = gamma at boundary nodes by symmetric elimination."""
    nodes = mesh.boundary_nodes
    g = np.zeros(mesh.n_points)
    values = {}
    for b in nodes.tolist():
        values[b] = float(gamma(*mesh.points[b]))
        g[b] = values[b]
    is_fixed = np.zeros(mesh.n_points, dtype=bool)
    is_fixed[nodes] = True
    K = system.matrix.tocsr()
    # K phi + f = 0 with phi = phi_free + g: move K g to the free rows
    f = system.rhs + K @ g
    keep = sp.diags((~is_fixed).astype(float))
    K_new = (keep @ K @ keep + sp.diags(is_fixed.astype(float))).tocsr()
    K_new.eliminate_zeros()
    f[is_fixed] = -g[is_fixed]
    return LinearSystem(K_new, f, values)


def residual(system: LinearSystem, phi: np.ndarray) -> float:
    r = system.matrix @ phi + system.rhs
    scale = float(np.linalg.norm(system.rhs))
    if scale == 0.0:
        scale = max(float(np.linalg.norm(system.matrix @ phi)), 1.0)
    return float(np.linalg.norm(r)) / scale


def solve(system: LinearSystem, rtol: float = 1e-10) -> np.ndarray:
    K = system.matrix.tocsc()
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        try:
            lu = spla.splu(K)
        except (RuntimeError, spla.MatrixRankWarning) as exc:
            raise SolveError(f"solve failed: {exc}") from exc
    diag_u = lu.U.diagonal()
    bad = np.flatnonzero(~np.isfinite(diag_u) | (np.abs(diag_u) <= 1e-14 * np.abs(diag_u).max()))
    if bad.size:
        raise SolveError(f"solve failed: zero pivot at position {int(bad[0])}")
    phi = lu.solve(-system.rhs)
    if not np.all(np.isfinite(phi)):
        raise SolveError("solve failed: non-finite solution")
    res = residual(system, phi)
    if res > rtol:
        raise SolveError(f"solve failed: relative residual {res:.3e} above {rtol:.1e}")
    return phi


def solve_problem(mesh: Mesh, fields: CoefficientFields, rule: QuadratureRule | None = None) -> np.ndarray:
    system = apply_dirichlet(assemble(mesh, fields, rule), mesh, fields.gamma)
    return solve(system)


def with_gamma(fields: CoefficientFields, gamma: Field) -> CoefficientFields:
    return replace(fields, gamma=gamma)
