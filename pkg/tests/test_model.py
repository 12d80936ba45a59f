import numpy as np
import pytest

from nlpoisson.cases import get_case
from nlpoisson.geometry import Disk, Interval, build_quadrature
from nlpoisson.model import (
    NonlocalProblem,
    PenaltyMode,
    PointSources,
    SmoothField,
    apply_operator,
    assemble_rhs,
    energy,
    interior_source_values,
    nearest_interior_indices,
    penalty_weight,
    penalty_weights,
)
from nlpoisson.solver import assemble_system, solve_cg

DOM = Interval(0.0, 1.0)


def _problem(mode, delta=0.1, case_name="sin"):
    case = get_case(case_name)
    return NonlocalProblem(
        domain=DOM,
        delta=delta,
        mode=mode,
        rhs=case.rhs(),
        boundary_data=case.boundary_data,
    )


def test_penalty_constant_modes():
    for mode in (PenaltyMode.FIRST_ORDER, PenaltyMode.ROBIN_BASELINE):
        assert penalty_weight(mode, [0.5], 0.1, DOM) == 0.1
        assert penalty_weight(mode, [0.001], 0.1, DOM) == 0.1


def test_penalty_graded():
    mode = PenaltyMode.SECOND_ORDER_GRADED
    # far from the boundary: capped at 2 delta
    assert penalty_weight(mode, [0.5], 0.1, DOM) == pytest.approx(0.2)
    # deep inside the layer: floored at delta^2
    assert penalty_weight(mode, [0.005], 0.1, DOM) == pytest.approx(0.01)
    # in between: the boundary distance itself
    assert penalty_weight(mode, [0.05], 0.1, DOM) == pytest.approx(0.05)


def test_penalty_weights_vectorized():
    pts = np.array([[0.5], [0.005], [0.05]])
    mu = penalty_weights(PenaltyMode.SECOND_ORDER_GRADED, pts, 0.1, DOM)
    assert np.allclose(mu, [0.2, 0.01, 0.05])


def test_mode_symmetry_flags():
    assert PenaltyMode.FIRST_ORDER.is_symmetric
    assert PenaltyMode.SECOND_ORDER_GRADED.is_symmetric
    assert not PenaltyMode.ROBIN_BASELINE.is_symmetric


def test_problem_rejects_large_horizon():
    with pytest.raises(ValueError):
        _problem(PenaltyMode.FIRST_ORDER, delta=0.3)
    with pytest.raises(ValueError):
        _problem(PenaltyMode.FIRST_ORDER, delta=-0.1)


def test_problem_rejects_point_source_near_boundary():
    with pytest.raises(ValueError):
        NonlocalProblem(
            domain=DOM,
            delta=0.1,
            mode=PenaltyMode.FIRST_ORDER,
            rhs=PointSources(np.array([[0.15]]), np.array([1.0])),
            boundary_data=lambda p: np.zeros(p.shape[0]),
        )


def test_point_sources_pairing():
    with pytest.raises(ValueError):
        PointSources(np.array([[0.4], [0.5]]), np.array([1.0]))


def test_point_source_smoothing_exact():
    problem = NonlocalProblem(
        domain=DOM,
        delta=0.1,
        mode=PenaltyMode.FIRST_ORDER,
        rhs=PointSources(np.array([[0.4]]), np.array([2.0])),
        boundary_data=lambda p: np.zeros(p.shape[0]),
    )
    quad = build_quadrature(DOM, 0.005)
    fhat = interior_source_values(problem, quad)
    x = quad.interior_nodes[:, 0]
    expected = 2.0 * problem.kernel.eval_dist2("Rbar", (x - 0.4) ** 2)
    assert np.allclose(fhat, expected, rtol=0, atol=1e-14)
    assert fhat[np.abs(x - 0.4) > 0.2].max() == 0.0


@pytest.mark.parametrize(
    "mode",
    [PenaltyMode.FIRST_ORDER, PenaltyMode.SECOND_ORDER_GRADED, PenaltyMode.ROBIN_BASELINE],
)
def test_operator_linearity(mode):
    problem = _problem(mode)
    quad = build_quadrature(DOM, 0.005)
    rng = np.random.default_rng(7)
    u = rng.normal(size=quad.n_interior)
    v = rng.normal(size=quad.n_interior)
    for i in (0, quad.n_interior // 2, quad.n_interior - 1):
        lhs = apply_operator(problem, quad, 2.0 * u - 3.0 * v, i)
        rhs = 2.0 * apply_operator(problem, quad, u, i) - 3.0 * apply_operator(
            problem, quad, v, i
        )
        assert lhs == pytest.approx(rhs, abs=1e-12 * max(1.0, abs(rhs)))


@pytest.mark.parametrize(
    "mode",
    [PenaltyMode.FIRST_ORDER, PenaltyMode.SECOND_ORDER_GRADED, PenaltyMode.ROBIN_BASELINE],
)
def test_operator_annihilates_zero(mode):
    problem = _problem(mode)
    quad = build_quadrature(DOM, 0.005)
    u = np.zeros(quad.n_interior)
    assert apply_operator(problem, quad, u, 0) == 0.0


def test_operator_matches_assembled_matrix():
    problem = _problem(PenaltyMode.FIRST_ORDER)
    quad = build_quadrature(DOM, 0.005)
    system = assemble_system(problem, quad)
    rng = np.random.default_rng(3)
    u = rng.normal(size=quad.n_interior)
    au = system.matrix @ u
    for i in (0, 57, quad.n_interior - 1):
        assert apply_operator(problem, quad, u, i) == pytest.approx(au[i], rel=1e-12)


def test_operator_index_validation():
    problem = _problem(PenaltyMode.FIRST_ORDER)
    quad = build_quadrature(DOM, 0.005)
    u = np.zeros(quad.n_interior)
    with pytest.raises(IndexError):
        apply_operator(problem, quad, u, quad.n_interior)
    with pytest.raises(ValueError):
        apply_operator(problem, quad, u[:-1], 0)


def test_assemble_rhs_matches_system():
    problem = _problem(PenaltyMode.SECOND_ORDER_GRADED)
    quad = build_quadrature(DOM, 0.005)
    b = assemble_rhs(problem, quad)
    system = assemble_system(problem, quad)
    assert np.allclose(b, system.rhs, rtol=1e-14)


def test_constant_data_reproduced():
    # f = 0, g = 1 has the exact discrete solution u = 1
    problem = NonlocalProblem(
        domain=DOM,
        delta=0.1,
        mode=PenaltyMode.FIRST_ORDER,
        rhs=SmoothField(lambda p: np.zeros(p.shape[0])),
        boundary_data=lambda p: np.ones(p.shape[0]),
    )
    quad = build_quadrature(DOM, 0.005)
    system = assemble_system(problem, quad)
    ones = np.ones(quad.n_interior)
    assert np.max(np.abs(system.matrix @ ones - system.rhs)) < 1e-12 * np.max(system.rhs)


def test_nearest_interior_indices():
    quad = build_quadrature(DOM, 0.1)
    idx = nearest_interior_indices(quad)
    assert idx[0] == 0
    assert idx[1] == quad.n_interior - 1


def test_energy_rejects_robin():
    problem = _problem(PenaltyMode.ROBIN_BASELINE)
    quad = build_quadrature(DOM, 0.005)
    with pytest.raises(ValueError):
        energy(problem, quad, np.zeros(quad.n_interior))


def test_energy_minimized_at_solution():
    problem = _problem(PenaltyMode.FIRST_ORDER)
    quad = build_quadrature(DOM, 0.005)
    system = assemble_system(problem, quad)
    sol = solve_cg(system, tol=1e-12)
    e0 = energy(problem, quad, sol.values)
    rng = np.random.default_rng(11)
    for _ in range(20):
        pert = rng.normal(size=quad.n_interior)
        pert *= 1e-3 / np.linalg.norm(pert)
        assert energy(problem, quad, sol.values + pert) >= e0 - 1e-14


def test_energy_gradient_matches_residual():
    # d/du_i E(u) = w_i (A u - b)_i, checked by central differences
    problem = _problem(PenaltyMode.FIRST_ORDER)
    quad = build_quadrature(DOM, 0.005)
    system = assemble_system(problem, quad)
    rng = np.random.default_rng(5)
    u = rng.normal(size=quad.n_interior)
    grad = quad.interior_weights * (system.matrix @ u - system.rhs)
    eps = 1e-6
    for i in (0, 42, 199):
        up = u.copy()
        up[i] += eps
        dn = u.copy()
        dn[i] -= eps
        fd = (energy(problem, quad, up) - energy(problem, quad, dn)) / (2 * eps)
        assert fd == pytest.approx(grad[i], rel=1e-5, abs=1e-10)


def test_disk_problem_assembles():
    dom = Disk((0.0, 0.0), 1.0)
    case = get_case("harmonic2d")
    problem = NonlocalProblem(
        domain=dom,
        delta=0.4,
        mode=PenaltyMode.FIRST_ORDER,
        rhs=case.rhs(),
        boundary_data=case.boundary_data,
    )
    quad = build_quadrature(dom, 0.025)
    b = assemble_rhs(problem, quad)
    assert b.shape == (quad.n_interior,)
    assert np.all(np.isfinite(b))
