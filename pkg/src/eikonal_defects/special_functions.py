"""Elliptic integrals of the second kind.

All three functions are built on Carlson's symmetric integrals ``R_F`` and
``R_D`` (``scipy.special.elliprf`` / ``elliprd``), which stay accurate up to
the endpoints of the parameter range.  The parameter convention is
``E(phi | m) = int_0^phi sqrt(1 - m sin^2 t) dt``.
"""
from __future__ import annotations

import numpy as np
from scipy.special import elliprd, elliprf


def _check_m(m, upper_inclusive=True):
    m = np.asarray(m, dtype=float)
    bad = (m < 0) | (m > 1) if upper_inclusive else (m < 0) | (m >= 1)
    if np.any(bad) or np.any(~np.isfinite(m)):
        rng = "[0, 1]" if upper_inclusive else "[0, 1)"
        raise ValueError(f"elliptic parameter m must lie in {rng}, got {m}")
    return m


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def ellip_E_complete(m):
    """Complete integral ``E(m) = E(pi/2 | m)`` for ``m`` in ``[0, 1]``."""
    m = _check_m(m)
    one_minus = 1.0 - m
    with np.errstate(divide="ignore", invalid="ignore"):
        val = elliprf(0.0, one_minus, 1.0) - m / 3.0 * elliprd(0.0, one_minus, 1.0)
    return _scalar_or_array(np.where(m == 1.0, 1.0, val))


def _ellip_E_principal(r, m):
    # r in [-pi/2, pi/2]
    s = np.sin(r)
    c2 = np.cos(r) ** 2
    y = 1.0 - m * s * s
    with np.errstate(divide="ignore", invalid="ignore"):
        val = s * elliprf(c2, y, 1.0) - m / 3.0 * s**3 * elliprd(c2, y, 1.0)
    # m == 1 degenerates to sin r; the Carlson form is inf - inf at r = +-pi/2
    return np.where(m == 1.0, s, val)


def ellip_E(phi, m):
    """Incomplete integral ``E(phi | m)`` for any real amplitude.

    Amplitudes outside ``[-pi/2, pi/2]`` use ``E(phi + pi | m) = E(phi | m) + 2 E(m)``.
    """
    m = _check_m(m)
    phi = np.asarray(phi, dtype=float)
    j = np.round(phi / np.pi)
    r = phi - j * np.pi
    out = 2.0 * j * np.asarray(ellip_E_complete(m)) + _ellip_E_principal(r, m)
    return _scalar_or_array(out)


def ellip_E_imag(eta, m):
    """Real ``F(eta | m)`` with ``E(i eta | m) = i F(eta | m)``.

    ``F(eta | m) = int_0^eta sqrt(1 + m sinh^2 t) dt``, evaluated through
    Jacobi's imaginary transformation with the complementary parameter
    ``1 - m`` and amplitude ``gd(eta)`` (so ``tan = sinh eta``)::

        F = (1-m)/3 sin^3 R_D(cos^2, 1 - (1-m) sin^2, 1) + sinh(eta) sqrt(1 - (1-m) sin^2)

    Negative ``eta`` is rejected; the function is odd, so callers reflect.
    """
    m = _check_m(m, upper_inclusive=False)
    eta = np.asarray(eta, dtype=float)
    if np.any(eta < 0) or np.any(~np.isfinite(eta)):
        raise ValueError("eta must be finite and non-negative")
    p = 1.0 - m
    s = np.tanh(eta)
    c2 = 1.0 / np.cosh(eta) ** 2
    y = c2 + m * s * s  # = 1 - p sin^2, written without cancellation
    val = p / 3.0 * s**3 * elliprd(c2, y, 1.0) + np.sinh(eta) * np.sqrt(y)
    return _scalar_or_array(np.where(eta == 0.0, 0.0, val))
