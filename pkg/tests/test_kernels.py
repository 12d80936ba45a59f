import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from nlpoisson.kernels import (
    POLY2,
    DegenerateKernelError,
    KernelProfile,
    RescaledKernel,
    eval_profile,
    normalization_constant,
)


def test_profile_point_values():
    assert eval_profile("R", 0.0) == 1.0
    assert eval_profile("R", 1.2) == 0.0
    # oracle: int_0^1 (1-s)^2 ds and int_0^1 (1-s)^3/3 ds
    rbar0, _ = quad(lambda s: (1 - s) ** 2, 0, 1, epsrel=1e-13)
    rbarbar0, _ = quad(lambda s: (1 - s) ** 3 / 3.0, 0, 1, epsrel=1e-13)
    assert eval_profile("Rbar", 0.0) == pytest.approx(rbar0, rel=1e-12)
    assert eval_profile("Rbarbar", 0.0) == pytest.approx(rbarbar0, rel=1e-12)
    assert eval_profile("Rbar", 0.0) == pytest.approx(1.0 / 3.0)
    assert eval_profile("Rbarbar", 0.0) == pytest.approx(1.0 / 12.0)


def test_profile_rejects_negative_argument():
    with pytest.raises(ValueError):
        eval_profile("R", -0.1)
    with pytest.raises(ValueError):
        eval_profile("Rbar", np.array([0.2, -1.0]))


def test_profile_unknown_kind():
    with pytest.raises(ValueError):
        eval_profile("Rbarbarbar", 0.0)


def test_normalization_1d():
    # independent oracle: alpha * 2 * int_0^2 (1 - r^2/4)^3 / 3 dr = 1
    total, _ = quad(lambda r: (1 - r * r / 4.0) ** 3 / 3.0, 0, 2, epsrel=1e-13)
    assert normalization_constant(1) == pytest.approx(1.0 / (2.0 * total), rel=1e-10)
    assert normalization_constant(1) == pytest.approx(105.0 / 64.0, rel=1e-10)


def test_normalization_2d():
    total, _ = quad(lambda r: (1 - r * r / 4.0) ** 3 / 3.0 * r, 0, 2, epsrel=1e-13)
    assert normalization_constant(2) == pytest.approx(1.0 / (2.0 * np.pi * total), rel=1e-10)
    assert normalization_constant(2) == pytest.approx(3.0 / np.pi, rel=1e-10)


def test_normalization_scales_inversely_with_amplitude():
    assert normalization_constant(1, POLY2.scaled(2.0)) == pytest.approx(
        105.0 / 128.0, rel=1e-10
    )


def test_normalization_bad_dimension():
    with pytest.raises(ValueError):
        normalization_constant(3)


def test_degenerate_profile_rejected():
    zero = KernelProfile(
        name="zero", gamma0=0.0,
        r_fn=lambda r: np.zeros_like(r),
        rbar_fn=lambda r: np.zeros_like(r),
        rbarbar_fn=lambda r: np.zeros_like(r),
    )
    with pytest.raises(DegenerateKernelError):
        normalization_constant(1, zero)


def test_rescaled_eval_1d():
    kern = RescaledKernel(POLY2, delta=0.1, dim=1)
    assert kern.eval("R", [0.0], [0.25]) == 0.0
    assert kern.eval("R", [0.0], [0.0]) == pytest.approx(105.0 / 64.0 * 10.0, rel=1e-10)


def test_rescaled_eval_2d():
    kern = RescaledKernel(POLY2, delta=0.1, dim=2)
    expected = (3.0 / np.pi) * 100.0 * (1.0 / 3.0)
    assert kern.eval("Rbar", [0.0, 0.0], [0.0, 0.0]) == pytest.approx(expected, rel=1e-10)


def test_rescaled_support():
    kern = RescaledKernel(POLY2, delta=0.05, dim=1)
    assert kern.eval("Rbar", [0.0], [0.11]) == 0.0
    assert kern.eval("Rbar", [0.0], [0.09]) > 0.0


def test_rescaled_dimension_mismatch():
    kern = RescaledKernel(POLY2, delta=0.1, dim=2)
    with pytest.raises(ValueError):
        kern.eval("R", [0.0], [0.0, 0.0])


@pytest.mark.parametrize("delta", [0.05, 0.1])
def test_rbar_unit_mass_1d(delta):
    # midpoint rule over the full interaction ball with cells delta/256
    kern = RescaledKernel(POLY2, delta, dim=1)
    h = delta / 256.0
    n = int(round(4 * delta / h))
    y = -2 * delta + (np.arange(n) + 0.5) * h
    mass = np.sum(kern.eval_dist2("Rbar", y**2)) * h
    assert mass == pytest.approx(1.0, abs=1e-6)


def test_rbar_unit_mass_2d():
    kern = RescaledKernel(POLY2, delta=0.1, dim=2)
    h = kern.delta / 256.0
    n = int(round(4 * kern.delta / h))
    c = -2 * kern.delta + (np.arange(n) + 0.5) * h
    xx, yy = np.meshgrid(c, c)
    mass = np.sum(kern.eval_dist2("Rbar", xx**2 + yy**2)) * h * h
    assert mass == pytest.approx(1.0, abs=1e-4)


@given(
    st.floats(min_value=0.0, max_value=1.5),
    st.floats(min_value=0.0, max_value=1.5),
)
def test_tail_profiles_nonincreasing(r1, r2):
    lo, hi = sorted([r1, r2])
    assert eval_profile("Rbar", lo) >= eval_profile("Rbar", hi)
    assert eval_profile("Rbarbar", lo) >= eval_profile("Rbarbar", hi)


@given(st.floats(min_value=0.0, max_value=1.0))
def test_rbarbar_dominated_by_rbar(r):
    assert eval_profile("Rbarbar", r) <= eval_profile("Rbar", r) + 1e-15


def test_c1_continuity_at_support_edge():
    # finite-difference slope across r = 1 tends to zero with the step
    slopes = []
    for step in (1e-2, 1e-3, 1e-4):
        slopes.append(
            (eval_profile("R", 1.0 + step) - eval_profile("R", 1.0 - step)) / (2 * step)
        )
    assert abs(slopes[-1]) < abs(slopes[0])
    assert abs(slopes[-1]) < 1e-3


def test_nondegeneracy_floor():
    r = np.linspace(0.0, 0.5, 501)
    assert np.min(eval_profile("R", r)) >= 0.25
    assert POLY2.gamma0 == 0.25
