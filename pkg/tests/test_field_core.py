import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eikonal_defects.field_core import (
    Point3,
    as_xyz,
    cartesian_to_elliptic,
    elliptic_to_cartesian,
    fd_gradient,
    fd_laplacian,
    stereographic_project,
    wrap_angle,
)

coord = st.floats(-50, 50, allow_nan=False)


def test_wrap_angle_range():
    a = wrap_angle(np.array([-1e-20, -np.pi, 7.0, 2 * np.pi]))
    assert np.all((a >= 0) & (a < 2 * np.pi))
    assert a[3] == 0.0


def test_point_canonicalisation():
    p = Point3.cylindrical(2.0, -np.pi / 2, 1.0)
    assert p.coords[1] == pytest.approx(3 * np.pi / 2)
    assert np.allclose(p.xyz, [0.0, -2.0, 1.0], atol=1e-15)
    with pytest.raises(ValueError):
        Point3.cylindrical(-1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        Point3.spherical(1.0, 4.0, 0.0)
    with pytest.raises(ValueError):
        Point3.elliptic(0.5, 0.0, 0.0, a=0.0)
    with pytest.raises(ValueError):
        Point3("polar", (1, 2, 3))


@settings(max_examples=200, deadline=None)
@given(coord, coord, coord)
def test_roundtrip_cylindrical_spherical(x, y, z):
    p = Point3.cartesian(x, y, z)
    for system in ("cylindrical", "spherical"):
        q = p.to(system).to("cartesian")
        assert np.allclose(q.xyz, p.xyz, atol=1e-12 * max(1.0, np.abs(p.xyz).max()))


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0.0, 2 * np.pi, exclude_max=True), coord, st.floats(0.1, 5.0))
def test_roundtrip_elliptic(eta, phi, z, a):
    xyz = elliptic_to_cartesian(eta, phi, z, a)
    e2, p2, z2 = cartesian_to_elliptic(xyz, a)
    assert np.allclose(elliptic_to_cartesian(e2, p2, z2, a), xyz, atol=1e-9 * a * np.cosh(eta))
    if eta > 1e-3:
        assert e2 == pytest.approx(eta, abs=1e-9)


def test_elliptic_point_needs_a():
    with pytest.raises(ValueError):
        Point3.cartesian(1, 0, 0).to("elliptic")
    p = Point3.cartesian(1.0, 0.5, 0.0).to("elliptic", a=1.0)
    assert np.allclose(p.to("cartesian").xyz, [1.0, 0.5, 0.0])


def test_as_xyz_checks_shape():
    assert as_xyz(Point3.cartesian(1, 2, 3)).tolist() == [1, 2, 3]
    with pytest.raises(ValueError):
        as_xyz(np.zeros((4, 2)))


@settings(max_examples=200, deadline=None)
@given(st.complex_numbers(max_magnitude=1e150, allow_nan=False, allow_infinity=False))
def test_projection_is_unit(u):
    n = stereographic_project(u)
    assert np.linalg.norm(n) == pytest.approx(1.0, abs=1e-14)


def test_projection_special_values():
    assert np.allclose(stereographic_project(0.0), [0, 0, -1])
    assert np.allclose(stereographic_project(1.0), [1, 0, 0])
    assert np.allclose(stereographic_project(1j), [0, 1, 0])
    assert np.allclose(stereographic_project(np.inf), [0, 0, 1])
    assert np.allclose(stereographic_project(1e300 + 0j), [0, 0, 1])
    assert np.allclose(stereographic_project(2.0, pole=True), [0, 0, 1])


def test_projection_inversion_symmetry():
    # u -> 1/conj(u) reflects n3
    u = np.array([0.3 + 0.4j, 2 - 1j, -5j])
    a, b = stereographic_project(u), stereographic_project(1 / np.conj(u))
    assert np.allclose(a[:, :2], b[:, :2]) and np.allclose(a[:, 2], -b[:, 2])


def poly(xyz):
    x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    return x**3 * y + 1j * z**2 * x + np.exp(y)


def poly_grad(xyz):
    x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    return np.stack([3 * x**2 * y + 1j * z**2, x**3 + np.exp(y), 2j * z * x], axis=-1)


def poly_lap(xyz):
    x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    return 6 * x * y + np.exp(y) + 2j * x


def test_fd_gradient_and_laplacian():
    pts = np.random.default_rng(1).uniform(-2, 2, size=(50, 3))
    assert np.max(np.abs(fd_gradient(poly, pts) - poly_grad(pts))) < 1e-8
    assert np.max(np.abs(fd_laplacian(poly, pts) - poly_lap(pts))) < 1e-7
    assert fd_gradient(poly, Point3.cartesian(0.1, 0.2, 0.3)).shape == (3,)


def test_fd_rejects_bad_step():
    with pytest.raises(ValueError):
        fd_gradient(poly, [0.0, 0.0, 0.0], h=0.0)
