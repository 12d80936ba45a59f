import numpy as np
import pytest
from hypothesis import given, strategies as st

from nlpoisson.geometry import (
    Disk,
    Interval,
    boundary_distances,
    build_boundary_quadrature,
    build_interior_quadrature,
    build_quadrature,
    distance_and_projection,
)


def test_interval_validation():
    with pytest.raises(ValueError):
        Interval(1.0, 1.0)
    with pytest.raises(ValueError):
        Disk((0.0, 0.0), -1.0)


def test_interval_properties():
    dom = Interval(0.0, 1.0)
    assert dom.dim == 1
    assert dom.measure == 1.0
    assert dom.inradius == 0.5
    assert dom.diameter == 1.0


def test_disk_properties():
    dom = Disk((0.5, -0.5), 2.0)
    assert dom.dim == 2
    assert dom.measure == pytest.approx(np.pi * 4.0)
    assert dom.boundary_measure == pytest.approx(4.0 * np.pi)
    assert dom.inradius == 2.0
    assert dom.diameter == 4.0


def test_interval_interior_quadrature():
    quad = build_interior_quadrature(Interval(0.0, 1.0), 0.1)
    assert quad.n_interior == 10
    assert quad.interior_nodes[0, 0] == pytest.approx(0.05)
    assert quad.interior_nodes[-1, 0] == pytest.approx(0.95)
    assert np.sum(quad.interior_weights) == pytest.approx(1.0, rel=1e-14)


def test_interior_quadrature_rejects_bad_h():
    with pytest.raises(ValueError):
        build_interior_quadrature(Interval(0.0, 1.0), 0.0)
    with pytest.raises(ValueError):
        build_interior_quadrature(Interval(0.0, 1.0), 2.0)


def test_disk_interior_weights_sum_to_area():
    dom = Disk((0.0, 0.0), 1.0)
    quad = build_interior_quadrature(dom, 0.05)
    assert np.sum(quad.interior_weights) == pytest.approx(np.pi, rel=1e-12)
    radii = np.linalg.norm(quad.interior_nodes, axis=1)
    assert np.all(radii < 1.0)


def test_interval_boundary_quadrature():
    quad = build_boundary_quadrature(Interval(0.0, 1.0), 0.1)
    assert quad.n_boundary == 2
    assert np.allclose(quad.boundary_nodes.ravel(), [0.0, 1.0])
    assert np.allclose(quad.boundary_weights, [1.0, 1.0])
    assert np.allclose(quad.boundary_normals.ravel(), [-1.0, 1.0])


def test_disk_boundary_quadrature():
    dom = Disk((1.0, 2.0), 0.5)
    quad = build_boundary_quadrature(dom, 0.01)
    assert np.sum(quad.boundary_weights) == pytest.approx(np.pi, rel=1e-12)
    radii = np.linalg.norm(quad.boundary_nodes - np.array([1.0, 2.0]), axis=1)
    assert np.allclose(radii, 0.5)
    norms = np.linalg.norm(quad.boundary_normals, axis=1)
    assert np.allclose(norms, 1.0)


def test_combined_quadrature():
    quad = build_quadrature(Interval(0.0, 1.0), 0.05)
    assert quad.n_interior == 20
    assert quad.n_boundary == 2
    assert quad.resolution_h == 0.05


def test_midpoint_rule_second_order():
    # integrating sin(pi x) over (0, 1): exact value 2/pi
    exact = 2.0 / np.pi
    errors = []
    for h in (0.1, 0.05, 0.025, 0.0125):
        quad = build_interior_quadrature(Interval(0.0, 1.0), h)
        val = np.sum(quad.interior_weights * np.sin(np.pi * quad.interior_nodes[:, 0]))
        errors.append(abs(val - exact))
    rates = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(rates > 1.9)


def test_boundary_distances_interval():
    dom = Interval(0.0, 1.0)
    pts = np.array([[0.1], [0.5], [0.9]])
    assert np.allclose(boundary_distances(dom, pts), [0.1, 0.5, 0.1])


def test_boundary_distances_disk():
    dom = Disk((0.0, 0.0), 1.0)
    pts = np.array([[0.0, 0.0], [0.6, 0.0], [0.0, -0.9]])
    assert np.allclose(boundary_distances(dom, pts), [1.0, 0.4, 0.1])


def test_projection_interval():
    dom = Interval(0.0, 1.0)
    d, z, nu = distance_and_projection(dom, [0.2])
    assert d == pytest.approx(0.2)
    assert z[0] == 0.0
    assert nu[0] == -1.0
    # identity x = z - d * nu
    assert np.allclose([0.2], z - d * nu)


def test_projection_interval_tiebreak_left():
    d, z, nu = distance_and_projection(Interval(0.0, 1.0), [0.5])
    assert d == pytest.approx(0.5)
    assert z[0] == 0.0
    assert nu[0] == -1.0


def test_projection_disk():
    dom = Disk((0.0, 0.0), 1.0)
    d, z, nu = distance_and_projection(dom, [0.0, 0.5])
    assert d == pytest.approx(0.5)
    assert np.allclose(z, [0.0, 1.0])
    assert np.allclose(nu, [0.0, 1.0])
    assert np.allclose([0.0, 0.5], z - d * nu)


def test_projection_disk_center_tiebreak():
    d, z, nu = distance_and_projection(Disk((0.0, 0.0), 1.0), [0.0, 0.0])
    assert d == pytest.approx(1.0)
    assert np.allclose(nu, [1.0, 0.0])
    assert np.allclose(z, [1.0, 0.0])


def test_projection_rejects_outside_points():
    with pytest.raises(ValueError):
        distance_and_projection(Interval(0.0, 1.0), [1.5])
    with pytest.raises(ValueError):
        distance_and_projection(Disk((0.0, 0.0), 1.0), [2.0, 0.0])


@given(st.floats(min_value=0.0, max_value=1.0), st.floats(min_value=0.0, max_value=1.0))
def test_boundary_distance_lipschitz_interval(x1, x2):
    dom = Interval(0.0, 1.0)
    d1 = boundary_distances(dom, np.array([[x1]]))[0]
    d2 = boundary_distances(dom, np.array([[x2]]))[0]
    assert abs(d1 - d2) <= abs(x1 - x2) + 1e-12


@given(
    st.floats(min_value=-0.7, max_value=0.7),
    st.floats(min_value=-0.7, max_value=0.7),
)
def test_projection_identity_disk(px, py):
    dom = Disk((0.0, 0.0), 1.0)
    d, z, nu = distance_and_projection(dom, [px, py])
    assert d >= 0.0
    assert np.allclose([px, py], z - d * nu, atol=1e-12)
    assert np.linalg.norm(z) == pytest.approx(1.0, abs=1e-12)
