"""Computational domains (1D interval, 2D disk) and their quadrature sets.

The interval's boundary is two weighted atoms, so the boundary integral
degenerates to endpoint evaluation and every model shares one code path
across dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"interval requires a < b, got a={self.a}, b={self.b}")

    dim = 1

    @property
    def measure(self) -> float:
        return self.b - self.a

    @property
    def boundary_measure(self) -> float:
        # count measure on the two endpoint atoms
        return 2.0

    @property
    def inradius(self) -> float:
        return 0.5 * (self.b - self.a)

    @property
    def diameter(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class Disk:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"disk radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    dim = 2

    @property
    def measure(self) -> float:
        return math.pi * self.radius**2

    @property
    def boundary_measure(self) -> float:
        return 2.0 * math.pi * self.radius

    @property
    def inradius(self) -> float:
        return self.radius

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius


Domain = Union[Interval, Disk]


@dataclass(frozen=True)
class QuadratureSet:
    """Interior and boundary nodes/weights for a domain at resolution h.

    Arrays are immutable by convention; interior nodes have shape (n, dim),
    boundary normals are unit outward vectors of shape (nb, dim).
    """

    interior_nodes: np.ndarray
    interior_weights: np.ndarray
    boundary_nodes: np.ndarray
    boundary_weights: np.ndarray
    boundary_normals: np.ndarray
    resolution_h: float

    @property
    def n_interior(self) -> int:
        return self.interior_nodes.shape[0]

    @property
    def n_boundary(self) -> int:
        return self.boundary_nodes.shape[0]


def _empty(dim: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return (
        np.empty((0, dim)),
        np.empty(0),
        np.empty((0, dim)),
    )


def build_interior_quadrature(domain: Domain, h: float) -> QuadratureSet:
    """Midpoint-rule interior quadrature: uniform cells (interval) or a
    tensor polar grid with arc spacing <= h (disk)."""
    if h <= 0:
        raise ValueError(f"cell size h must be positive, got {h}")
    if h >= domain.diameter:
        raise ValueError(f"cell size h={h} must be below the domain diameter")
    if isinstance(domain, Interval):
        n = max(1, round((domain.b - domain.a) / h))
        cell = (domain.b - domain.a) / n
        nodes = domain.a + (np.arange(n) + 0.5) * cell
        nodes = nodes.reshape(-1, 1)
        weights = np.full(n, cell)
    else:
        cx, cy = domain.center
        nr = max(1, math.ceil(domain.radius / h))
        dr = domain.radius / nr
        xs, ys, ws = [], [], []
        for i in range(nr):
            r = (i + 0.5) * dr
            m = max(1, math.ceil(2.0 * math.pi * r / h))
            theta = (np.arange(m) + 0.5) * (2.0 * math.pi / m)
            xs.append(cx + r * np.cos(theta))
            ys.append(cy + r * np.sin(theta))
            ws.append(np.full(m, r * dr * 2.0 * math.pi / m))
        nodes = np.column_stack([np.concatenate(xs), np.concatenate(ys)])
        weights = np.concatenate(ws)
    eb, ew, en = np.empty((0, domain.dim)), np.empty(0), np.empty((0, domain.dim))
    return QuadratureSet(nodes, weights, eb, ew, en, h)


def build_boundary_quadrature(domain: Domain, h_b: float) -> QuadratureSet:
    """Boundary quadrature: two endpoint atoms of weight 1 (interval) or
    equispaced arc nodes (disk)."""
    if h_b <= 0:
        raise ValueError(f"boundary spacing h_b must be positive, got {h_b}")
    if isinstance(domain, Interval):
        nodes = np.array([[domain.a], [domain.b]])
        weights = np.ones(2)
        normals = np.array([[-1.0], [1.0]])
    else:
        cx, cy = domain.center
        m = max(3, math.ceil(2.0 * math.pi * domain.radius / h_b))
        theta = np.arange(m) * (2.0 * math.pi / m)
        normals = np.column_stack([np.cos(theta), np.sin(theta)])
        nodes = np.array([cx, cy]) + domain.radius * normals
        weights = np.full(m, 2.0 * math.pi * domain.radius / m)
    ei, ew = np.empty((0, domain.dim)), np.empty(0)
    return QuadratureSet(ei, ew, nodes, weights, normals, h_b)


def build_quadrature(domain: Domain, h: float, h_b: float | None = None) -> QuadratureSet:
    """Combined interior + boundary quadrature; h_b defaults to h."""
    interior = build_interior_quadrature(domain, h)
    boundary = build_boundary_quadrature(domain, h if h_b is None else h_b)
    return QuadratureSet(
        interior.interior_nodes,
        interior.interior_weights,
        boundary.boundary_nodes,
        boundary.boundary_weights,
        boundary.boundary_normals,
        h,
    )


def boundary_distances(domain: Domain, pts: np.ndarray) -> np.ndarray:
    """Vectorized distance to the boundary for points inside the domain."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if isinstance(domain, Interval):
        x = pts[:, 0]
        return np.minimum(x - domain.a, domain.b - x)
    rho = np.linalg.norm(pts - np.asarray(domain.center), axis=1)
    return domain.radius - rho


def distance_and_projection(domain: Domain, x) -> tuple[float, np.ndarray, np.ndarray]:
    """Distance to the boundary, nearest boundary point, and outward normal.

    Ties (interval midpoint, disk center) break toward the smaller
    coordinate / zero angle so results are deterministic.  The identity
    x = z - d * nu holds for the returned triple.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    tol = 1e-12
    if isinstance(domain, Interval):
        (xv,) = x
        if xv < domain.a - tol or xv > domain.b + tol:
            raise ValueError(f"point {xv} lies outside [{domain.a}, {domain.b}]")
        d_left = xv - domain.a
        d_right = domain.b - xv
        if d_left <= d_right:
            return d_left, np.array([domain.a]), np.array([-1.0])
        return d_right, np.array([domain.b]), np.array([1.0])
    center = np.asarray(domain.center)
    rel = x - center
    rho = float(np.linalg.norm(rel))
    if rho > domain.radius + tol:
        raise ValueError(f"point {x} lies outside the disk")
    if rho == 0.0:
        nu = np.array([1.0, 0.0])
    else:
        nu = rel / rho
    z = center + domain.radius * nu
    return domain.radius - rho, z, nu
