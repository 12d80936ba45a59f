"""Error norms, truncation-residual diagnostics, maximum-principle audits,
and horizon-sweep convergence studies with fitted observed orders."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .cases import ManufacturedCase
from .geometry import Domain, Interval, QuadratureSet, boundary_distances, build_quadrature
from .interactions import kernel_matrix, neighbor_graph
from .kernels import RescaledKernel
from .model import NonlocalProblem, PenaltyMode
from .solver import assemble_system, default_resolution, solve_cg, solve_jacobi


def error_norms(
    u_num: np.ndarray, case: ManufacturedCase, quad: QuadratureSet, domain: Domain
) -> tuple[float, float, float]:
    """(Linf, L2, H1) errors against the exact solution on the node set.

    The H1 gradient part compares a finite-difference gradient of the
    numerical solution (central; one-sided at the ends) with the analytic
    gradient, so it carries an O(h^2) floor.  It is computed on the uniform
    1D grid only; the disk reports NaN.
    """
    u_num = np.asarray(u_num, dtype=float)
    if u_num.shape[0] != quad.n_interior:
        raise ValueError("solution length does not match the quadrature set")
    e = u_num - case.u(quad.interior_nodes)
    linf = float(np.max(np.abs(e)))
    l2 = float(np.sqrt(np.sum(quad.interior_weights * e**2)))
    if isinstance(domain, Interval):
        x = quad.interior_nodes[:, 0]
        du = np.gradient(u_num, x)
        grad_err = du - case.grad_u(quad.interior_nodes)[:, 0]
        h1 = float(np.sqrt(l2**2 + np.sum(quad.interior_weights * grad_err**2)))
    else:
        h1 = float("nan")
    return linf, l2, h1


def fit_order(deltas, errors) -> tuple[float, float]:
    """Least-squares slope of log error vs log delta, plus the fit R^2."""
    x = np.log(np.asarray(deltas, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), r2


def _boundary_flux(case: ManufacturedCase, quad: QuadratureSet) -> np.ndarray:
    grad = case.grad_u(quad.boundary_nodes)
    return np.sum(grad * quad.boundary_normals, axis=1)


def truncation_residual_profile(
    case: ManufacturedCase,
    domain: Domain,
    kernel: RescaledKernel,
    quad: QuadratureSet,
) -> np.ndarray:
    """Per-node truncation residual of the integral approximation,

        r(x) = int Rbar_d Laplace(u) + (1/d^2) int R_d (u(x) - u(y))
               - 2 int_bnd Rbar_d du/dn,

    evaluated with the exact catalog solution (Laplace(u) = -f)."""
    if case.f is None:
        raise ValueError(f"case {case.name!r} has no smooth source term")
    pts = quad.interior_nodes
    w = quad.interior_weights
    n = quad.n_interior
    rows, cols, dist2 = neighbor_graph(pts, kernel.support_radius)
    rbar_w = kernel_matrix(kernel, "Rbar", rows, cols, dist2, (n, n), col_weights=w)
    r_w = kernel_matrix(kernel, "R", rows, cols, dist2, (n, n), col_weights=w)
    uvals = case.u(pts)
    fvals = case.f(pts)
    t1 = -(rbar_w @ fvals)
    t2 = (uvals * np.asarray(r_w.sum(axis=1)).ravel() - r_w @ uvals) / kernel.delta**2

    flux = _boundary_flux(case, quad)
    bdist2 = (
        np.sum(pts**2, axis=1)[:, None]
        - 2.0 * pts @ quad.boundary_nodes.T
        + np.sum(quad.boundary_nodes**2, axis=1)[None, :]
    )
    bvals = kernel.eval_dist2("Rbar", np.clip(bdist2, 0.0, None))
    t3 = -2.0 * bvals @ (quad.boundary_weights * flux)
    return t1 + t2 + t3


def truncation_residual(
    case: ManufacturedCase,
    domain: Domain,
    kernel: RescaledKernel,
    quad: QuadratureSet,
    x,
) -> float:
    """Truncation residual at a single point x (direct quadrature sums)."""
    if case.f is None:
        raise ValueError(f"case {case.name!r} has no smooth source term")
    x = np.asarray(x, dtype=float).reshape(1, -1)
    pts = quad.interior_nodes
    w = quad.interior_weights
    dist2 = np.sum((pts - x) ** 2, axis=1)
    ux = float(case.u(x)[0])
    t1 = -float(np.dot(kernel.eval_dist2("Rbar", dist2) * w, case.f(pts)))
    t2 = float(
        np.dot(kernel.eval_dist2("R", dist2) * w, ux - case.u(pts))
    ) / kernel.delta**2
    bdist2 = np.sum((quad.boundary_nodes - x) ** 2, axis=1)
    flux = _boundary_flux(case, quad)
    t3 = -2.0 * float(
        np.dot(kernel.eval_dist2("Rbar", bdist2) * quad.boundary_weights, flux)
    )
    return t1 + t2 + t3


def boundary_kernel_sums(kernel: RescaledKernel, quad: QuadratureSet) -> np.ndarray:
    """s_delta(x_i) = int_bnd Rbar_delta(x_i, y) dS_y on the interior nodes."""
    pts = quad.interior_nodes
    out = np.zeros(quad.n_interior)
    for b, wb in zip(quad.boundary_nodes, quad.boundary_weights):
        dist2 = np.sum((pts - b) ** 2, axis=1)
        out += wb * kernel.eval_dist2("Rbar", dist2)
    return out


def kernel_estimates(kernel: RescaledKernel, quad: QuadratureSet, domain: Domain):
    """Per-node kernel integrals used by the a-priori estimates.

    Returns (d, wbar, s): boundary distance, int_Omega Rbar_delta, and
    int_bnd Rbar_delta for every interior node.
    """
    pts = quad.interior_nodes
    rows, cols, dist2 = neighbor_graph(pts, kernel.support_radius)
    rbar_w = kernel_matrix(
        kernel, "Rbar", rows, cols, dist2,
        (quad.n_interior, quad.n_interior), col_weights=quad.interior_weights,
    )
    wbar = np.asarray(rbar_w.sum(axis=1)).ravel()
    s = boundary_kernel_sums(kernel, quad)
    d = boundary_distances(domain, pts)
    return d, wbar, s


@dataclass
class AuditTrial:
    trial: int
    min_value: float
    max_value: float


@dataclass
class AuditReport:
    seed: int
    trials: list[AuditTrial]
    tolerance: float
    passed: bool


def max_principle_audit(
    problem: NonlocalProblem,
    quad: QuadratureSet,
    trials: int = 100,
    seed: int = 0,
    tol: float = 1e-10,
) -> AuditReport:
    """Solve seeded random nonnegative-data instances and check min u >= -tol * max u."""
    if not problem.mode.is_symmetric:
        raise ValueError("the maximum-principle audit requires a symmetric mode")
    system = assemble_system(problem, quad)
    pts = quad.interior_nodes
    n = quad.n_interior
    rows, cols, dist2 = neighbor_graph(pts, problem.kernel.support_radius)
    rbar_w = kernel_matrix(
        problem.kernel, "Rbar", rows, cols, dist2, (n, n),
        col_weights=quad.interior_weights,
    )
    rng = np.random.default_rng(seed)
    results = []
    ok = True
    for t in range(trials):
        fvals = rng.uniform(0.0, 1.0, n)
        gvals = rng.uniform(0.0, 1.0, quad.n_boundary)
        system.rhs = rbar_w @ fvals + (2.0 / system.mu) * (system.boundary_matrix @ gvals)
        sol = solve_cg(system, tol=1e-10)
        lo = float(np.min(sol.values))
        hi = float(np.max(sol.values))
        results.append(AuditTrial(t, lo, hi))
        if lo < -tol * max(hi, 0.0):
            ok = False
    return AuditReport(seed=seed, trials=results, tolerance=tol, passed=ok)


@dataclass
class ReportRow:
    delta: float
    h: float
    linf: float
    l2: float
    h1: float
    runtime_s: float


@dataclass
class ConvergenceReport:
    """Per-horizon error norms plus least-squares fitted observed orders."""

    mode: PenaltyMode
    case_name: str
    rows: list[ReportRow] = field(default_factory=list)
    p_linf: float = float("nan")
    p_l2: float = float("nan")
    p_h1: float = float("nan")
    r2_linf: float = float("nan")
    r2_l2: float = float("nan")
    r2_h1: float = float("nan")

    def fit(self) -> None:
        deltas = [r.delta for r in self.rows]
        self.p_linf, self.r2_linf = fit_order(deltas, [r.linf for r in self.rows])
        self.p_l2, self.r2_l2 = fit_order(deltas, [r.l2 for r in self.rows])
        h1s = [r.h1 for r in self.rows]
        if np.all(np.isfinite(h1s)):
            self.p_h1, self.r2_h1 = fit_order(deltas, h1s)


def convergence_study(
    case: ManufacturedCase,
    mode: PenaltyMode,
    deltas,
    domain: Domain,
    tol: float = 1e-10,
    h_for_delta=None,
) -> ConvergenceReport:
    """Solve the case over a decreasing horizon sweep and fit observed orders.

    ``h_for_delta`` overrides the default resolution rule (still subject to
    the assembly gate).  The Robin baseline is solved by the fixed-point
    iteration; symmetric modes by CG.
    """
    deltas = [float(d) for d in deltas]
    if len(deltas) < 4:
        raise ValueError("a convergence sweep needs at least 4 horizon values")
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("horizon values must be strictly decreasing")
    report = ConvergenceReport(mode=mode, case_name=case.name)
    for delta in deltas:
        t0 = time.perf_counter()
        problem = NonlocalProblem(
            domain=domain,
            delta=delta,
            mode=mode,
            rhs=case.rhs(),
            boundary_data=case.boundary_data,
        )
        h = default_resolution(problem) if h_for_delta is None else h_for_delta(delta)
        quad = build_quadrature(domain, h)
        system = assemble_system(problem, quad)
        if mode.is_symmetric:
            sol = solve_cg(system, tol=tol)
        else:
            sol = solve_jacobi(problem, quad, tol=tol, system=system)
        linf, l2, h1 = error_norms(sol.values, case, quad, domain)
        report.rows.append(
            ReportRow(delta, h, linf, l2, h1, time.perf_counter() - t0)
        )
    report.fit()
    return report
