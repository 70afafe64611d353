import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from eikonal_defects.special_functions import ellip_E, ellip_E_complete, ellip_E_imag

# mpmath at 30 digits, frozen
E_HALFPI_HALF = 1.35064388104767550252
E_IMAG_1_HALF = 1.09347930539213570086
E_COMPLETE_QUARTER = 1.46746220933942715546


def quad_E(phi, m):
    val, _ = quad(lambda t: np.sqrt(1.0 - m * np.sin(t) ** 2), 0.0, phi, epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


def quad_E_imag(eta, m):
    val, _ = quad(lambda t: np.sqrt(1.0 + m * np.sinh(t) ** 2), 0.0, eta, epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


GRID_E = [(phi, m) for phi in np.linspace(-3.0, 7.0, 10) for m in np.linspace(0.0, 0.99, 5)]
GRID_IMAG = [(eta, m) for eta in np.linspace(0.0, 2.5, 10) for m in np.linspace(0.0, 0.95, 5)]


def test_parameter_grids_have_fifty_points():
    assert len(GRID_E) == 50 and len(GRID_IMAG) == 50


@pytest.mark.parametrize("phi,m", GRID_E)
def test_incomplete_matches_quadrature(phi, m):
    assert ellip_E(phi, m) == pytest.approx(quad_E(phi, m), abs=1e-10, rel=1e-10)


@pytest.mark.parametrize("eta,m", GRID_IMAG)
def test_imaginary_amplitude_matches_quadrature(eta, m):
    assert ellip_E_imag(eta, m) == pytest.approx(quad_E_imag(eta, m), abs=1e-10, rel=1e-10)


def test_closed_forms():
    phis = np.linspace(-10, 10, 41)
    assert np.max(np.abs(ellip_E(phis, 0.0) - phis)) < 1e-12
    assert abs(ellip_E(np.pi / 2, 1.0) - 1.0) < 1e-12
    for m in (0.0, 0.3, 0.9, 1.0):
        assert abs(ellip_E(0.0, m)) < 1e-12
    assert abs(ellip_E_complete(1.0) - 1.0) < 1e-12
    assert abs(ellip_E_complete(0.0) - np.pi / 2) < 1e-12


def test_frozen_values():
    assert ellip_E(np.pi / 2, 0.5) == pytest.approx(E_HALFPI_HALF, rel=1e-14)
    assert ellip_E_imag(1.0, 0.5) == pytest.approx(E_IMAG_1_HALF, rel=1e-14)
    assert ellip_E_complete(0.25) == pytest.approx(E_COMPLETE_QUARTER, rel=1e-14)


def test_vectorised_shapes():
    phi = np.linspace(0, 3, 12).reshape(3, 4)
    assert ellip_E(phi, 0.4).shape == (3, 4)
    assert isinstance(ellip_E(0.3, 0.4), float)
    assert ellip_E_imag(np.array([0.1, 0.2]), 0.3).shape == (2,)


@pytest.mark.parametrize("m", [-0.1, 1.5, np.nan])
def test_bad_parameter(m):
    with pytest.raises(ValueError):
        ellip_E(0.5, m)


def test_imaginary_rejects_negative_eta_and_m_one():
    with pytest.raises(ValueError):
        ellip_E_imag(-0.1, 0.5)
    with pytest.raises(ValueError):
        ellip_E_imag(0.5, 1.0)


angles = st.floats(-20, 20, allow_nan=False)
params = st.floats(0.0, 1.0, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(angles, params)
def test_quasi_periodic(phi, m):
    shifted = ellip_E(phi + np.pi, m)
    assert shifted == pytest.approx(ellip_E(phi, m) + 2 * ellip_E_complete(m), abs=1e-12, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(angles, params)
def test_odd(phi, m):
    assert ellip_E(-phi, m) == pytest.approx(-ellip_E(phi, m), abs=1e-13)


@settings(max_examples=100, deadline=None)
@given(angles, st.floats(0.01, 1.0), params)
def test_increasing_in_amplitude(phi, dphi, m):
    assert ellip_E(phi + dphi, m) > ellip_E(phi, m)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0.0, 0.99))
def test_imaginary_derivative(eta, m):
    h = 1e-6
    d = (ellip_E_imag(eta + h, m) - ellip_E_imag(max(eta - h, 0.0), m)) / (eta + h - max(eta - h, 0.0))
    assert d == pytest.approx(np.sqrt(1 + m * np.sinh(eta) ** 2), rel=1e-6)
