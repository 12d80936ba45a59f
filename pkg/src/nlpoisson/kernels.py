"""Radial kernel profiles and their horizon-rescaled evaluation.

The profile family is a triple (R, Rbar, Rbarbar) of a compactly supported
radial function and its successive antiderivative tails,

    Rbar(r)    = int_r^inf R(s) ds,
    Rbarbar(r) = int_r^inf Rbar(s) ds,

all evaluated in the dimensionless variable r = |x - y|^2 / (4 delta^2).
Rescaling by alpha_n * delta^(-n) normalizes the Rbar kernel to unit mass
over R^n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
from scipy.integrate import quad

ProfileKind = Literal["R", "Rbar", "Rbarbar"]

# Surface measure of the unit sphere, indexed by space dimension.
SPHERE_AREA = {1: 2.0, 2: 2.0 * np.pi}


class DegenerateKernelError(ValueError):
    """Raised when a profile integrates to zero and cannot be normalized."""


@dataclass(frozen=True)
class KernelProfile:
    """Radial profile with support in [0, 1] and its antiderivative tails.

    ``gamma0`` is the nondegeneracy floor: R(r) >= gamma0 on [0, 1/2].
    """

    name: str
    gamma0: float
    r_fn: Callable[[np.ndarray], np.ndarray]
    rbar_fn: Callable[[np.ndarray], np.ndarray]
    rbarbar_fn: Callable[[np.ndarray], np.ndarray]
    support_radius: float = 1.0

    def __call__(self, kind: ProfileKind, r):
        return eval_profile(kind, r, self)

    def scaled(self, factor: float) -> "KernelProfile":
        """Profile with all three members multiplied by ``factor``."""
        if factor <= 0:
            raise ValueError(f"scale factor must be positive, got {factor}")
        return KernelProfile(
            name=f"{self.name}*{factor:g}",
            gamma0=self.gamma0 * factor,
            r_fn=lambda r, f=self.r_fn: factor * f(r),
            rbar_fn=lambda r, f=self.rbar_fn: factor * f(r),
            rbarbar_fn=lambda r, f=self.rbarbar_fn: factor * f(r),
        )


def _poly2_r(r: np.ndarray) -> np.ndarray:
    t = np.clip(1.0 - r, 0.0, None)
    return t * t


def _poly2_rbar(r: np.ndarray) -> np.ndarray:
    t = np.clip(1.0 - r, 0.0, None)
    return t**3 / 3.0


def _poly2_rbarbar(r: np.ndarray) -> np.ndarray:
    t = np.clip(1.0 - r, 0.0, None)
    return t**4 / 12.0


#: Default profile R(r) = (1 - r)_+^2.  C^1 on [0, inf) with R(1) = R'(1) = 0,
#: nondegeneracy floor 1/4 on [0, 1/2], and closed-form tails.
POLY2 = KernelProfile(
    name="poly2",
    gamma0=0.25,
    r_fn=_poly2_r,
    rbar_fn=_poly2_rbar,
    rbarbar_fn=_poly2_rbarbar,
)

PROFILES = {"poly2": POLY2}


def eval_profile(kind: ProfileKind, r, profile: KernelProfile = POLY2):
    """Evaluate one member of the profile triple at radial argument(s) r >= 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("profile argument must be nonnegative")
    if kind == "R":
        out = profile.r_fn(r)
    elif kind == "Rbar":
        out = profile.rbar_fn(r)
    elif kind == "Rbarbar":
        out = profile.rbarbar_fn(r)
    else:
        raise ValueError(f"unknown profile kind {kind!r}")
    return out if out.ndim else float(out)


def normalization_constant(dim: int, profile: KernelProfile = POLY2) -> float:
    """Constant alpha_n with alpha_n * S_n * int_0^2 Rbar(r^2/4) r^(n-1) dr = 1."""
    if dim not in SPHERE_AREA:
        raise ValueError(f"dimension must be 1 or 2, got {dim}")
    integrand = lambda s: profile.rbar_fn(np.asarray(s * s / 4.0)) * s ** (dim - 1)
    total, _ = quad(integrand, 0.0, 2.0, epsabs=1e-14, epsrel=1e-12)
    total *= SPHERE_AREA[dim]
    if total <= 1e-300:
        raise DegenerateKernelError(
            f"profile {profile.name!r} has zero mass in dimension {dim}"
        )
    return 1.0 / total


@dataclass(frozen=True)
class RescaledKernel:
    """Kernel family rescaled to horizon delta in dimension dim.

    Evaluation follows
        Rtilde_delta(x, y) = alpha_n * delta^(-n) * Rtilde(|x-y|^2 / (4 delta^2))
    and vanishes for |x - y| > 2 delta.
    """

    profile: KernelProfile
    delta: float
    dim: int
    alpha: float = field(init=False)

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError(f"horizon delta must be positive, got {self.delta}")
        object.__setattr__(
            self, "alpha", normalization_constant(self.dim, self.profile)
        )

    @property
    def support_radius(self) -> float:
        return 2.0 * self.delta

    @property
    def scale(self) -> float:
        """The prefactor alpha_n * delta^(-n)."""
        return self.alpha * self.delta ** (-self.dim)

    def eval_dist2(self, kind: ProfileKind, dist2) -> np.ndarray:
        """Evaluate on (an array of) squared distances |x - y|^2."""
        r = np.asarray(dist2, dtype=float) / (4.0 * self.delta**2)
        return self.scale * eval_profile(kind, r, self.profile)

    def eval(self, kind: ProfileKind, x, y) -> float:
        x = np.asarray(x, dtype=float).reshape(-1)
        y = np.asarray(y, dtype=float).reshape(-1)
        if x.size != self.dim or y.size != self.dim:
            raise ValueError(
                f"points must have dimension {self.dim}, got {x.size} and {y.size}"
            )
        return float(self.eval_dist2(kind, np.sum((x - y) ** 2)))
