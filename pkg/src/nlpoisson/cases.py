"""Manufactured-solution catalog.

Each case packages an exact solution u, its source f = -Laplace(u), the
boundary trace g (the same function restricted to the boundary), and the
analytic gradient needed for boundary-flux diagnostics.  The smooth
entries are C-infinity; the tent case is the 1D Green's function for a
unit point charge and pairs with the point-source right-hand side.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .model import PointSources, RightHandSide, SmoothField


@dataclass(frozen=True)
class ManufacturedCase:
    name: str
    dim: int
    u: Callable[[np.ndarray], np.ndarray]
    f: Optional[Callable[[np.ndarray], np.ndarray]]
    grad_u: Callable[[np.ndarray], np.ndarray]
    point_sources: Optional[PointSources] = None
    note: str = ""

    def rhs(self) -> RightHandSide:
        if self.point_sources is not None:
            return self.point_sources
        return SmoothField(self.f)

    def boundary_data(self, pts: np.ndarray) -> np.ndarray:
        return self.u(pts)


def _sin_u(p):
    return np.sin(np.pi * p[:, 0])


def _sin_f(p):
    return np.pi**2 * np.sin(np.pi * p[:, 0])


def _sin_grad(p):
    return (np.pi * np.cos(np.pi * p[:, 0]))[:, None]


def _cubic_u(p):
    return p[:, 0] ** 3 + 1.0


def _cubic_f(p):
    return -6.0 * p[:, 0]


def _cubic_grad(p):
    return (3.0 * p[:, 0] ** 2)[:, None]


def _const_u(p):
    return np.ones(p.shape[0])


def _const_f(p):
    return np.zeros(p.shape[0])


def _const_grad(p):
    return np.zeros_like(p)


def _harm_u(p):
    return p[:, 0] ** 2 - p[:, 1] ** 2 + 1.0


def _harm_f(p):
    return np.zeros(p.shape[0])


def _harm_grad(p):
    return np.column_stack([2.0 * p[:, 0], -2.0 * p[:, 1]])


_TENT_X0 = 0.4


def _tent_u(p):
    x = p[:, 0]
    return np.where(x <= _TENT_X0, (1.0 - _TENT_X0) * x, _TENT_X0 * (1.0 - x))


def _tent_grad(p):
    x = p[:, 0]
    return np.where(x <= _TENT_X0, 1.0 - _TENT_X0, -_TENT_X0)[:, None]


CATALOG = {
    "sin": ManufacturedCase(
        name="sin", dim=1, u=_sin_u, f=_sin_f, grad_u=_sin_grad,
        note="sin(pi x) on (0, 1)",
    ),
    "cubic": ManufacturedCase(
        name="cubic", dim=1, u=_cubic_u, f=_cubic_f, grad_u=_cubic_grad,
        note="x^3 + 1: nonzero f and nonconstant g",
    ),
    "const1": ManufacturedCase(
        name="const1", dim=1, u=_const_u, f=_const_f, grad_u=_const_grad,
        note="u = 1: pure boundary reproduction",
    ),
    "harmonic2d": ManufacturedCase(
        name="harmonic2d", dim=2, u=_harm_u, f=_harm_f, grad_u=_harm_grad,
        note="x^2 - y^2 + 1 on the disk: harmonic, exercises the penalty alone",
    ),
    "tent": ManufacturedCase(
        name="tent", dim=1, u=_tent_u, f=None, grad_u=_tent_grad,
        point_sources=PointSources(np.array([[_TENT_X0]]), np.array([1.0])),
        note="Green's function of a unit charge at x0 = 0.4, g = 0",
    ),
}


def get_case(name: str) -> ManufacturedCase:
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(
            f"unknown case {name!r}; available: {', '.join(sorted(CATALOG))}"
        ) from None
