"""Strings on an elliptic cylinder.

In elliptic-cylinder coordinates ``x = (a/2) cos(phi) cosh(eta)``,
``y = (a/2) sin(phi) sinh(eta)`` the field is::

    u = C exp(-sign L F(eta|m)) exp(i sign (k z + L E(phi|m))) + c0

with ``L = sqrt(lambda^2 + k^2 a^2 / 4)``, ``m = k^2 a^2 / (4 lambda^2 + k^2 a^2)``
and ``F`` the imaginary-amplitude integral of
:func:`~eikonal_defects.special_functions.ellip_E_imag`.  Single-valuedness
in ``phi`` requires ``(2/pi) L E(m) = n``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..exceptions import ConstraintViolation, DomainError, NoRoot
from ..field_core import TWO_PI, cartesian_to_elliptic, wrap_angle
from ..special_functions import ellip_E, ellip_E_complete, ellip_E_imag
from .base import SNAP, Solution, as_complex, check_sign

QUANTIZATION_TOL = 1e-10


def elliptic_constants(k, a, lam):
    """``(L, m)`` for the given separation constant ``lam``."""
    kf2 = (0.5 * k * a) ** 2
    L2 = lam * lam + kf2
    m = kf2 / L2 if L2 > 0 else 0.0
    return np.sqrt(L2), m


def quantization_lhs(lam, k, a):
    """``(2/pi) sqrt(lam^2 + k^2 a^2/4) E(m)``; strictly increasing in ``lam >= 0``."""
    L, m = elliptic_constants(k, a, lam)
    return 2.0 / np.pi * L * ellip_E_complete(m)


def solve_elliptic_lambda(k: float, a: float, n: int) -> float:
    """Separation constant ``lambda > 0`` meeting the quantization condition for ``n``.

    The left-hand side lies between ``lambda`` and ``sqrt(lambda^2 + k^2 a^2/4)``,
    so the root is bracketed by ``[sqrt(max(0, n^2 - k^2 a^2/4)), n]``.
    """
    if n < 1 or int(n) != n:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if a < 0:
        raise ValueError("focal parameter a must be non-negative")
    if a == 0 or k == 0:
        return float(n)
    kf2 = (0.5 * k * a) ** 2
    lo = np.sqrt(max(0.0, n * n - kf2))
    hi = float(n)

    def g(lam):
        return quantization_lhs(lam, k, a) - n

    g_lo, g_hi = g(lo), g(hi)
    if g_lo > 0 or g_hi < 0:
        raise NoRoot(
            f"quantization condition has no root for k={k}, a={a}, n={n}: "
            f"scanned lambda in [{lo}, {hi}], lhs - n = [{g_lo}, {g_hi}]"
        )
    if g_lo == 0:
        lam = lo
    elif g_hi == 0:
        lam = hi
    else:
        lam = brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    if not lam > 0:
        raise NoRoot(f"quantization root lambda={lam} is not positive (k={k}, a={a}, n={n})")
    resid = abs(g(lam))
    if resid >= QUANTIZATION_TOL:
        raise NoRoot(f"quantization residual {resid} exceeds {QUANTIZATION_TOL}")
    return float(lam)


@dataclass(frozen=True)
class EllipticStringSpec(Solution):
    C: complex
    c0: float
    k: float
    a: float
    lam: float
    n: int
    sign: int = 1
    family = "elliptic_string"
    box_system = "elliptic"

    def __post_init__(self):
        object.__setattr__(self, "C", as_complex(self.C))
        object.__setattr__(self, "c0", float(self.c0))
        for name in ("k", "a", "lam"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "sign", check_sign(self.sign))

    @property
    def L(self) -> float:
        return float(elliptic_constants(self.k, self.a, self.lam)[0])

    @property
    def m(self) -> float:
        return float(elliptic_constants(self.k, self.a, self.lam)[1])

    @property
    def max_winding(self) -> int:
        return self.n

    def quantization_residual(self) -> float:
        return float(abs(quantization_lhs(self.lam, self.k, self.a) - self.n))

    def validate(self):
        if not self.a > 0:
            raise ConstraintViolation(f"focal parameter a must be positive, got {self.a}")
        if not self.lam > 0:
            raise ConstraintViolation(f"lambda must be positive, got {self.lam}")
        if self.n < 1:
            raise ConstraintViolation(f"n must be >= 1, got {self.n}")
        resid = self.quantization_residual()
        if not resid < QUANTIZATION_TOL:
            raise ConstraintViolation(
                "elliptic quantization condition (2/pi) sqrt(lambda^2 + k^2 a^2/4) E(m) = n "
                f"violated: residual {resid:.3e} for n = {self.n}"
            )

    # --- evaluation in natural coordinates ---------------------------------

    def value_natural(self, eta, phi, z):
        """Closed form at ``(eta, phi, z)`` *without* reducing ``phi`` mod ``2 pi``."""
        eta = np.asarray(eta, dtype=float)
        L, m = self.L, self.m
        expo = -self.sign * L * ellip_E_imag(eta, m) + 1j * self.sign * (
            self.k * np.asarray(z, dtype=float) + L * ellip_E(phi, m)
        )
        return self.C * np.exp(expo) + self.c0

    def _pole_mask(self, xyz):
        eta, _, _ = cartesian_to_elliptic(xyz, self.a)
        if np.any(eta <= SNAP):
            raise DomainError(
                "elliptic_string: field is discontinuous across the focal segment (eta = 0)"
            )
        return np.zeros(xyz.shape[:-1], dtype=bool)

    def _terms(self, xyz):
        eta, phi, z = cartesian_to_elliptic(xyz, self.a)
        L, m = self.L, self.m
        sig = self.sign
        v = self.value_natural(eta, phi, z) - self.c0
        sh, ch = np.sinh(eta), np.cosh(eta)
        sp, cp = np.sin(phi), np.cos(phi)
        w_eta = np.sqrt(1.0 + m * sh * sh)
        w_phi = np.sqrt(1.0 - m * sp * sp)
        v_eta = -sig * L * w_eta * v
        v_phi = 1j * sig * L * w_phi * v
        f = 0.5 * self.a
        h2 = f * f * (sh * sh + sp * sp)
        # conformal map: grad_xy = (v_eta dr/deta + v_phi dr/dphi) / h^2
        gx = (v_eta * f * cp * sh - v_phi * f * sp * ch) / h2
        gy = (v_eta * f * sp * ch + v_phi * f * cp * sh) / h2
        gz = 1j * sig * self.k * v
        grad = np.stack([gx, gy, gz], axis=-1)
        dw_eta = m * sh * ch / w_eta
        dw_phi = -m * sp * cp / w_phi
        lap = sig * L * (-dw_eta + 1j * dw_phi) * v / h2
        return v + self.c0, grad, lap

    def _value(self, xyz):
        eta, phi, z = cartesian_to_elliptic(xyz, self.a)
        return self.value_natural(eta, phi, z)

    def _gradient(self, xyz):
        return self._terms(xyz)[1]

    def _laplacian(self, xyz):
        return self._terms(xyz)[2]

    def default_box(self):
        return {"eta": (0.05, 2.0), "phi": (0.0, TWO_PI), "z": (-5.0, 5.0)}

    def fd_length(self, xyz):
        # distance scale to the focal segment is about f sinh(eta)
        eta = cartesian_to_elliptic(xyz, self.a)[0]
        far = np.maximum(1.0, np.linalg.norm(xyz, axis=-1))
        return np.minimum(far, 0.5 * self.a * np.sinh(eta))

    # --- string geometry ---------------------------------------------------

    def string_eta(self) -> float:
        """``eta_0`` where ``|C| exp(-sign L F(eta_0|m)) = |c0|`` (strings' elliptic radius)."""
        if self.c0 == 0 or self.C == 0:
            raise NoRoot("strings need nonzero C and c0")
        target = -self.sign * np.log(abs(self.c0) / abs(self.C)) / self.L
        if target <= 0:
            raise NoRoot(
                f"|c0|/|C| = {abs(self.c0) / abs(self.C)} is not attainable on the "
                f"{'decaying' if self.sign > 0 else 'growing'} branch (needs eta_0 > 0)"
            )
        m = self.m
        hi = 1.0
        while ellip_E_imag(hi, m) < target:
            hi *= 2.0
            if hi > 700:
                raise NoRoot(f"eta_0 beyond the search bracket [0, {hi}]")
        return float(brentq(lambda e: ellip_E_imag(e, m) - target, 0.0, hi, xtol=1e-15, rtol=1e-15))

    def string_phase_offset(self) -> float:
        """Phase ``p`` with strings on ``k z + L E(phi|m) = p + 2 pi l``."""
        # sign * phase + arg C = arg(-c0)  (mod 2 pi)
        return float(wrap_angle(self.sign * (np.angle(-self.c0) - np.angle(self.C))))


def make_elliptic(C=1.0, c0=0.5, k=1.0, a=1.0, n=1, sign=1, lam=None) -> EllipticStringSpec:
    """Validated elliptic string; ``lam`` is solved from the quantization condition if omitted."""
    if lam is None:
        lam = solve_elliptic_lambda(k, a, n)
    spec = EllipticStringSpec(C, c0, k, a, lam, n, sign)
    spec.validate()
    return spec
