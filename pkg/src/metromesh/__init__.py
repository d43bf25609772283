"""Triangular mesh generation with Metropolis node relaxation, and a linear FEM Poisson solver."""
from .delaunay import delaunay_optimize, delaunay_violations
from .fem import apply_dirichlet, assemble, element_matrices, quadrature_rule, solve, solve_problem
from .mesh import Mesh, mesh_init, mesh_init_explicit, quality, refine_pass, repair_illegal
from .metropolis import MetropolisParams, metropolis_sweeps
from .pipeline import GenerateConfig, generate
from .problems import CirclePoissonSpec, RectLaplaceSpec, circle_exact, compare, rect_series

__all__ = [
    "CirclePoissonSpec", "GenerateConfig", "Mesh", "MetropolisParams", "RectLaplaceSpec",
    "apply_dirichlet", "assemble", "circle_exact", "compare", "delaunay_optimize", "delaunay_violations",
    "element_matrices", "generate", "mesh_init", "mesh_init_explicit", "metropolis_sweeps", "quadrature_rule",
    "quality", "rect_series", "refine_pass", "repair_illegal", "solve", "solve_problem",
]
