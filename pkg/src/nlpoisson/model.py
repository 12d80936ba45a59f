"""Nonlocal Poisson model variants with boundary-penalty Dirichlet data.

Three variants share the interior diffusion term
    (1/delta^2) int_Omega R_delta(x, y) (u(x) - u(y)) dy
and differ in how the boundary integral couples to u:

* ``FIRST_ORDER``: symmetric penalty with constant weight mu(x) = delta.
* ``SECOND_ORDER_GRADED``: symmetric penalty with graded weight
  mu(x) = min(2 delta, max(delta^2, d(x))).
* ``ROBIN_BASELINE``: the boundary integral carries u(y) instead of u(x)
  with weight 1/delta; kept as an empirical comparison baseline (neither
  symmetric nor maximum-principle preserving).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Union

import numpy as np
from scipy.spatial import cKDTree

from .geometry import Domain, QuadratureSet, boundary_distances
from .interactions import cross_graph, kernel_matrix, neighbor_graph
from .kernels import POLY2, KernelProfile, RescaledKernel


class PenaltyMode(str, Enum):
    ROBIN_BASELINE = "robin_baseline"
    FIRST_ORDER = "first_order"
    SECOND_ORDER_GRADED = "second_order_graded"

    @property
    def is_symmetric(self) -> bool:
        return self is not PenaltyMode.ROBIN_BASELINE


@dataclass(frozen=True)
class SmoothField:
    """Right-hand side given as a function on Omega, vectorized over (n, dim)."""

    fn: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PointSources:
    """Right-hand side as a sum of Dirac charges at interior locations."""

    locations: np.ndarray
    charges: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "locations", np.atleast_2d(np.asarray(self.locations, dtype=float)))
        object.__setattr__(self, "charges", np.atleast_1d(np.asarray(self.charges, dtype=float)))
        if self.locations.shape[0] != self.charges.shape[0]:
            raise ValueError("point-source locations and charges must pair up")


RightHandSide = Union[SmoothField, PointSources]


def penalty_weights(mode: PenaltyMode, pts: np.ndarray, delta: float, domain: Domain) -> np.ndarray:
    """Per-point penalty weight mu(x); constant delta except for the graded mode."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if mode is PenaltyMode.SECOND_ORDER_GRADED:
        d = boundary_distances(domain, pts)
        return np.minimum(2.0 * delta, np.maximum(delta**2, d))
    return np.full(pts.shape[0], delta)


def penalty_weight(mode: PenaltyMode, x, delta: float, domain: Domain) -> float:
    return float(penalty_weights(mode, np.atleast_2d(x), delta, domain)[0])


@dataclass(frozen=True)
class NonlocalProblem:
    """A nonlocal Poisson problem: domain, horizon, model variant, data.

    ``boundary_data`` is the Dirichlet datum g, vectorized over boundary
    points of shape (m, dim).
    """

    domain: Domain
    delta: float
    mode: PenaltyMode
    rhs: RightHandSide
    boundary_data: Callable[[np.ndarray], np.ndarray]
    profile: KernelProfile = POLY2
    kernel: RescaledKernel = field(init=False)

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError(f"horizon delta must be positive, got {self.delta}")
        if 2.0 * self.delta >= self.domain.inradius:
            raise ValueError(
                f"horizon delta={self.delta} too large: 2*delta must stay below "
                f"the inradius {self.domain.inradius}"
            )
        object.__setattr__(
            self, "kernel", RescaledKernel(self.profile, self.delta, self.domain.dim)
        )
        if isinstance(self.rhs, PointSources):
            d = boundary_distances(self.domain, self.rhs.locations)
            if np.any(d <= 2.0 * self.delta):
                raise ValueError(
                    "point sources must lie strictly inside Omega at distance "
                    "> 2*delta from the boundary"
                )


def nearest_interior_indices(quad: QuadratureSet) -> np.ndarray:
    """Index of the interior node nearest to each boundary node."""
    tree = cKDTree(quad.interior_nodes)
    _, idx = tree.query(quad.boundary_nodes)
    return np.atleast_1d(idx)


def boundary_values(problem: NonlocalProblem, quad: QuadratureSet) -> np.ndarray:
    g = problem.boundary_data(quad.boundary_nodes)
    return np.broadcast_to(np.asarray(g, dtype=float), (quad.n_boundary,)).copy()


def interior_source_values(problem: NonlocalProblem, quad: QuadratureSet, graph=None) -> np.ndarray:
    """The smoothed source fhat(x_i) = int Rbar_delta(x_i, y) f(y) dy.

    Smooth fields are integrated by the interior quadrature; Dirac sums are
    evaluated exactly as sum_k c_k * Rbar_delta(x_i, y_k).
    """
    pts = quad.interior_nodes
    n = quad.n_interior
    kern = problem.kernel
    if isinstance(problem.rhs, PointSources):
        fhat = np.zeros(n)
        for loc, c in zip(problem.rhs.locations, problem.rhs.charges):
            dist2 = np.sum((pts - loc) ** 2, axis=1)
            fhat += c * kern.eval_dist2("Rbar", dist2)
        return fhat
    if graph is None:
        graph = neighbor_graph(pts, kern.support_radius)
    rows, cols, dist2 = graph
    rbar_w = kernel_matrix(
        kern, "Rbar", rows, cols, dist2, (n, n), col_weights=quad.interior_weights
    )
    fvals = np.asarray(problem.rhs.fn(pts), dtype=float)
    return rbar_w @ fvals


def assemble_rhs(problem: NonlocalProblem, quad: QuadratureSet) -> np.ndarray:
    """Right-hand-side vector: smoothed source plus penalty-weighted boundary term."""
    kern = problem.kernel
    mu = penalty_weights(problem.mode, quad.interior_nodes, problem.delta, problem.domain)
    g = boundary_values(problem, quad)
    br, bc, bd2 = cross_graph(quad.interior_nodes, quad.boundary_nodes, kern.support_radius)
    bbar_w = kernel_matrix(
        kern, "Rbar", br, bc, bd2,
        (quad.n_interior, quad.n_boundary), col_weights=quad.boundary_weights,
    )
    return interior_source_values(problem, quad) + (2.0 / mu) * (bbar_w @ g)


def apply_operator(problem: NonlocalProblem, quad: QuadratureSet, u: np.ndarray, i: int) -> float:
    """Collocated operator L_{delta,mu} u at interior node i (direct sums).

    The self term j == i is skipped: u(x) - u(y) vanishes there.
    """
    u = np.asarray(u, dtype=float)
    if u.shape[0] != quad.n_interior:
        raise ValueError("u must be defined on all interior nodes")
    if not 0 <= i < quad.n_interior:
        raise IndexError(f"node index {i} out of range")
    kern = problem.kernel
    x = quad.interior_nodes[i]
    dist2 = np.sum((quad.interior_nodes - x) ** 2, axis=1)
    rvals = kern.eval_dist2("R", dist2)
    rvals[i] = 0.0
    interior = np.dot(rvals * quad.interior_weights, u[i] - u) / problem.delta**2

    bdist2 = np.sum((quad.boundary_nodes - x) ** 2, axis=1)
    bvals = kern.eval_dist2("Rbar", bdist2) * quad.boundary_weights
    if problem.mode is PenaltyMode.ROBIN_BASELINE:
        # Boundary values of u are taken from the nearest interior node; the
        # g part of the Robin term lives on the right-hand side.
        near = nearest_interior_indices(quad)
        return interior + (2.0 / problem.delta) * np.dot(bvals, u[near])
    mu = penalty_weight(problem.mode, x, problem.delta, problem.domain)
    return interior + (2.0 / mu) * u[i] * np.sum(bvals)


def energy(problem: NonlocalProblem, quad: QuadratureSet, u: np.ndarray) -> float:
    """Discrete value of the variational energy for the symmetric modes."""
    if not problem.mode.is_symmetric:
        raise ValueError("the Robin baseline has no variational form")
    u = np.asarray(u, dtype=float)
    kern = problem.kernel
    pts = quad.interior_nodes
    w = quad.interior_weights
    rows, cols, dist2 = neighbor_graph(pts, kern.support_radius)
    rvals = kern.eval_dist2("R", dist2)
    diff2 = (u[rows] - u[cols]) ** 2
    interior = np.sum(rvals * diff2 * w[rows] * w[cols]) / (4.0 * problem.delta**2)

    mu = penalty_weights(problem.mode, pts, problem.delta, problem.domain)
    g = boundary_values(problem, quad)
    br, bc, bd2 = cross_graph(pts, quad.boundary_nodes, kern.support_radius)
    bvals = kern.eval_dist2("Rbar", bd2) * quad.boundary_weights[bc]
    mismatch2 = (u[br] - g[bc]) ** 2
    penalty = np.sum((w[br] / mu[br]) * bvals * mismatch2)

    fhat = interior_source_values(problem, quad, graph=(rows, cols, dist2))
    source = np.sum(w * u * fhat)
    return float(interior + penalty - source)
