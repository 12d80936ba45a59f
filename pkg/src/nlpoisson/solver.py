"""Sparse collocation assembly and linear solvers (CG and Jacobi fixed point).

The assembled matrix is an M-matrix for the symmetric modes: nonpositive
off-diagonals, positive diagonal, and row sums equal to the boundary
penalty column (2/mu) * s_delta, which is strictly positive in the
boundary layer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .geometry import Interval, QuadratureSet
from .interactions import cross_graph, kernel_matrix, neighbor_graph
from .model import (
    NonlocalProblem,
    PenaltyMode,
    boundary_values,
    interior_source_values,
    nearest_interior_indices,
    penalty_weights,
)


class ResolutionError(ValueError):
    """Quadrature too coarse for the requested horizon."""


class NonConvergenceError(RuntimeError):
    """Iterative solver failed to reach tolerance."""

    def __init__(self, message: str, iterations: int, last_change: float):
        super().__init__(message)
        self.iterations = iterations
        self.last_change = last_change


@dataclass
class Solution:
    """Solution values on the interior nodes plus solver metadata."""

    values: np.ndarray
    iterations: int
    residual: float
    method: str


@dataclass
class DiscreteSystem:
    """Assembled sparse system A u = b on the interior nodes.

    Besides (matrix, rhs) it keeps the kernel row sums and boundary
    couplings needed by the Jacobi fixed point and the diagnostics:
    ``kernel_row`` holds R_delta(x_i, x_j) w_j including the self term,
    ``w_delta`` its row sums, ``s_delta`` the boundary kernel sums.
    """

    matrix: sparse.csr_matrix
    rhs: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    mode: PenaltyMode
    delta: float
    mu: np.ndarray
    s_delta: np.ndarray
    w_delta: np.ndarray
    kernel_row: sparse.csr_matrix
    boundary_matrix: sparse.csr_matrix
    fhat: np.ndarray
    ghat: np.ndarray
    robin_coupling: sparse.csr_matrix | None
    h: float

    @property
    def n(self) -> int:
        return self.rhs.shape[0]


def check_resolution(problem: NonlocalProblem, h: float) -> None:
    """Refuse resolutions where quadrature error would pollute the model error."""
    delta = problem.delta
    slack = 1.0 + 1e-9
    if isinstance(problem.domain, Interval):
        gate = delta**2 / 2.0
        rule = "h <= delta^2 / 2"
    else:
        gate = delta / 16.0
        rule = "h <= delta / 16"
    if h > gate * slack:
        raise ResolutionError(
            f"cell size h={h:g} too coarse for delta={delta:g}: the rule {rule} "
            f"(= {gate:g}) keeps quadrature error below the model error being measured"
        )


def default_resolution(problem: NonlocalProblem) -> float:
    """The coarsest cell size admitted by the resolution gate."""
    if isinstance(problem.domain, Interval):
        return problem.delta**2 / 2.0
    return problem.delta / 16.0


def assemble_system(problem: NonlocalProblem, quad: QuadratureSet) -> DiscreteSystem:
    check_resolution(problem, quad.resolution_h)
    kern = problem.kernel
    pts = quad.interior_nodes
    w = quad.interior_weights
    n = quad.n_interior
    delta = problem.delta

    rows, cols, dist2 = neighbor_graph(pts, kern.support_radius)
    kernel_row = kernel_matrix(kern, "R", rows, cols, dist2, (n, n), col_weights=w)
    w_delta = np.asarray(kernel_row.sum(axis=1)).ravel()
    self_vals = kern.eval_dist2("R", 0.0) * w

    mu = penalty_weights(problem.mode, pts, delta, problem.domain)
    br, bc, bd2 = cross_graph(pts, quad.boundary_nodes, kern.support_radius)
    boundary_matrix = kernel_matrix(
        kern, "Rbar", br, bc, bd2, (n, quad.n_boundary),
        col_weights=quad.boundary_weights,
    )
    s_delta = np.asarray(boundary_matrix.sum(axis=1)).ravel()

    # A = (1/delta^2) (diag(w_delta) - Kw) + penalty; the self term cancels in
    # the difference so the diagonal is the j != i kernel sum.
    matrix = (sparse.diags(w_delta) - kernel_row) / delta**2

    robin_coupling = None
    if problem.mode is PenaltyMode.ROBIN_BASELINE:
        near = nearest_interior_indices(quad)
        nb = quad.n_boundary
        select = sparse.csr_matrix(
            (np.ones(nb), (np.arange(nb), near)), shape=(nb, n)
        )
        robin_coupling = (boundary_matrix @ select).tocsr()
        matrix = (matrix + (2.0 / delta) * robin_coupling).tocsr()
    else:
        matrix = (matrix + sparse.diags(2.0 * s_delta / mu)).tocsr()

    fhat = interior_source_values(problem, quad, graph=(rows, cols, dist2))
    g = boundary_values(problem, quad)
    ghat = boundary_matrix @ g
    rhs = fhat + (2.0 / mu) * ghat

    return DiscreteSystem(
        matrix=matrix,
        rhs=rhs,
        nodes=pts,
        weights=w,
        mode=problem.mode,
        delta=delta,
        mu=mu,
        s_delta=s_delta,
        w_delta=w_delta,
        kernel_row=kernel_row,
        boundary_matrix=boundary_matrix,
        fhat=fhat,
        ghat=ghat,
        robin_coupling=robin_coupling,
        h=quad.resolution_h,
    )


def residual_norm(system: DiscreteSystem, u: np.ndarray) -> float:
    """||A u - b||_2 / ||b||_2, or the absolute norm when b = 0."""
    u = np.asarray(u, dtype=float)
    if u.shape[0] != system.n:
        raise ValueError("solution length does not match the system")
    r = np.linalg.norm(system.matrix @ u - system.rhs)
    b = np.linalg.norm(system.rhs)
    return r / b if b > 0 else r


def solve_cg(system: DiscreteSystem, tol: float = 1e-10) -> Solution:
    """Conjugate gradients with a diagonal preconditioner.

    Runs on the weight-scaled system W A (symmetric also for non-uniform
    interior weights); the stopping rule is the relative residual of the
    original system.
    """
    if not system.mode.is_symmetric:
        raise ValueError("CG requires a symmetric mode; use solve_jacobi")
    n = system.n
    b = system.rhs
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return Solution(np.zeros(n), 0, 0.0, "cg")

    w = system.weights
    a_scaled = sparse.diags(w) @ system.matrix
    bs = w * b
    minv = 1.0 / a_scaled.diagonal()

    cap = 10 * n
    x = np.zeros(n)
    r = bs.copy()
    z = minv * r
    p = z.copy()
    rz = float(r @ z)
    for k in range(1, cap + 1):
        ap = a_scaled @ p
        alpha = rz / float(p @ ap)
        x += alpha * p
        r -= alpha * ap
        # residual of the original system: A x - b = W^(-1) (As x - bs)
        res = np.linalg.norm(r / w)
        if res <= tol * bnorm:
            return Solution(x, k, res / bnorm, "cg")
        z = minv * r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise NonConvergenceError(
        f"CG exceeded the iteration cap {cap} (residual {res / bnorm:.3e})",
        cap,
        res / bnorm,
    )


def solve_jacobi(
    problem: NonlocalProblem,
    quad: QuadratureSet,
    tol: float = 1e-10,
    max_iters: int = 200_000,
    system: DiscreteSystem | None = None,
    u0: np.ndarray | None = None,
) -> Solution:
    """Closed-form fixed-point iteration

        u <- (delta^2 fhat + Kw u + (2 delta^2 / mu) ghat)
             / (w_delta + (2 delta^2 / mu) s_delta)

    which is the Jacobi splitting of the assembled system scaled by delta^2
    with the kernel self term kept on both sides.  Undamped; diverging
    iterations (change growing 10 times in a row) fail fast.
    """
    if system is None:
        system = assemble_system(problem, quad)
    delta = system.delta
    kw = system.kernel_row
    if system.mode is PenaltyMode.ROBIN_BASELINE:
        denom = system.w_delta
        const = delta**2 * system.fhat + 2.0 * delta * system.ghat
        coupling = system.robin_coupling

        def step(u):
            return (const + kw @ u - 2.0 * delta * (coupling @ u)) / denom
    else:
        pen = 2.0 * delta**2 / system.mu
        denom = system.w_delta + pen * system.s_delta
        const = delta**2 * system.fhat + pen * system.ghat

        def step(u):
            return (const + kw @ u) / denom

    u = np.zeros(system.n) if u0 is None else np.asarray(u0, dtype=float).copy()
    prev_change = np.inf
    growth_streak = 0
    for k in range(1, max_iters + 1):
        u_next = step(u)
        change = float(np.max(np.abs(u_next - u)))
        u = u_next
        if change <= tol:
            return Solution(u, k, residual_norm(system, u), "jacobi")
        if change > prev_change:
            growth_streak += 1
            if growth_streak >= 10:
                raise NonConvergenceError(
                    f"Jacobi iteration diverging (change grew 10 times in a row, "
                    f"last change {change:.3e})",
                    k,
                    change,
                )
        else:
            growth_streak = 0
        prev_change = change
    raise NonConvergenceError(
        f"Jacobi exceeded max_iters={max_iters} (last change {prev_change:.3e})",
        max_iters,
        prev_change,
    )


def dump_matrix(system: DiscreteSystem) -> str:
    """Coordinate (row, col, value) text dump, one triple per line."""
    coo = system.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    lines = [
        f"{coo.row[k]} {coo.col[k]} {coo.data[k]:.17g}" for k in order
    ]
    return "\n".join(lines) + "\n"
