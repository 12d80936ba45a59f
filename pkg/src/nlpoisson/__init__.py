"""Mesh-free nonlocal Poisson solver with boundary-penalty Dirichlet data."""

from .analysis import (
    ConvergenceReport,
    convergence_study,
    error_norms,
    fit_order,
    kernel_estimates,
    max_principle_audit,
    truncation_residual,
    truncation_residual_profile,
)
from .cases import CATALOG, ManufacturedCase, get_case
from .geometry import (
    Disk,
    Interval,
    QuadratureSet,
    build_boundary_quadrature,
    build_interior_quadrature,
    build_quadrature,
    distance_and_projection,
)
from .kernels import (
    POLY2,
    DegenerateKernelError,
    KernelProfile,
    RescaledKernel,
    eval_profile,
    normalization_constant,
)
from .model import (
    NonlocalProblem,
    PenaltyMode,
    PointSources,
    SmoothField,
    apply_operator,
    assemble_rhs,
    energy,
    penalty_weight,
    penalty_weights,
)
from .solver import (
    DiscreteSystem,
    NonConvergenceError,
    ResolutionError,
    Solution,
    assemble_system,
    default_resolution,
    residual_norm,
    solve_cg,
    solve_jacobi,
)

__all__ = [
    "CATALOG",
    "ConvergenceReport",
    "DegenerateKernelError",
    "Disk",
    "DiscreteSystem",
    "Interval",
    "KernelProfile",
    "ManufacturedCase",
    "NonConvergenceError",
    "NonlocalProblem",
    "POLY2",
    "PenaltyMode",
    "PointSources",
    "QuadratureSet",
    "RescaledKernel",
    "ResolutionError",
    "SmoothField",
    "Solution",
    "apply_operator",
    "assemble_rhs",
    "assemble_system",
    "build_boundary_quadrature",
    "build_interior_quadrature",
    "build_quadrature",
    "convergence_study",
    "default_resolution",
    "distance_and_projection",
    "energy",
    "error_norms",
    "eval_profile",
    "fit_order",
    "get_case",
    "kernel_estimates",
    "max_principle_audit",
    "normalization_constant",
    "penalty_weight",
    "penalty_weights",
    "residual_norm",
    "solve_cg",
    "solve_jacobi",
    "truncation_residual",
    "truncation_residual_profile",
]

__version__ = "0.1.0"
