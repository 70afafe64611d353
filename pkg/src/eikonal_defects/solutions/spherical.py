"""Hedgehog (monopole) solutions in spherical coordinates.

With ``zeta = tan(theta/2) exp(i phi) = (x + i y) / (r + z)`` the hedgehog
family is ``u = sum_j C_j zeta^(sign n_j) + c``.  On the southern
hemisphere the code switches to ``xi = 1/zeta = (x - i y) / (r - z)`` so
that no expression suffers cancellation near the polar axis.

The optional general separated form (``m_pow`` set) is::

    u = C r^(sign m) exp(sign G(theta)) exp(i sign n phi) + c
    G(theta) = |n| log(sin(theta) P / (q + |n| cos(theta))) + |m| asinh(|m| cos(theta) / P)

with ``q = sqrt(n^2 - m^2 sin^2 theta)`` and ``P = sqrt(n^2 - m^2)``, which
solves ``G'^2 = n^2 / sin^2 theta - m^2`` on ``(0, pi)`` for ``|m| < |n|``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..exceptions import ConstraintViolation, DomainError, DuplicateWinding
from ..field_core import TWO_PI
from .base import SNAP, Solution, as_complex, check_sign, require_positive_radius


@dataclass(frozen=True)
class SphComponent:
    C: complex
    n: int

    def __post_init__(self):
        object.__setattr__(self, "C", as_complex(self.C))
        if int(self.n) != self.n:
            raise ValueError(f"winding n must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))


def _zeta_and_xi(xyz):
    """``(r, north, b, grad_b)``: stable stereographic variable per hemisphere.

    ``b = zeta`` where ``z >= 0`` and ``b = xi = 1/zeta`` where ``z < 0``.
    """
    x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    r = np.sqrt(x * x + y * y + z * z)
    north = z >= 0
    d = np.where(north, r + z, r - z)
    # xi(x, y, z) = zeta(x, -y, -z)
    ys = np.where(north, y, -y)
    b = (x + 1j * ys) / d
    gx = (1.0 - b * x / r) / d
    gy_m = (1j - b * ys / r) / d
    gz_m = -b / r
    gy = np.where(north, gy_m, -gy_m)
    gz = np.where(north, gz_m, -gz_m)
    return r, north, b, np.stack([gx, gy, gz], axis=-1)


def theta_profile_log(theta, n, m):
    """``G(theta)`` of the general separated form; ``G' = sqrt(n^2/sin^2 - m^2)``."""
    theta = np.asarray(theta, dtype=float)
    N, M = abs(n), abs(m)
    s, c = np.sin(theta), np.cos(theta)
    P = np.sqrt(N * N - M * M)
    q = np.sqrt(N * N - M * M * s * s)
    # log(s P / (q + N c)); for c < 0 use the equal form log((q - N c) / (s P))
    with np.errstate(divide="ignore"):
        first = np.where(c >= 0, np.log(s * P) - np.log(q + N * c), np.log(q - N * c) - np.log(s * P))
    return N * first + M * np.arcsinh(M * c / P)


def theta_profile_slope(theta, n, m):
    theta = np.asarray(theta, dtype=float)
    s = np.sin(theta)
    return np.sqrt(n * n - m * m * s * s) / s


@dataclass(frozen=True)
class HedgehogSpec(Solution):
    components: Tuple[SphComponent, ...]
    c: complex = 0j
    sign: int = 1
    m_pow: Optional[float] = None
    family = "hedgehog"
    box_system = "spherical"

    def __post_init__(self):
        comps = tuple(
            comp if isinstance(comp, SphComponent) else SphComponent(*comp)
            for comp in self.components
        )
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "c", as_complex(self.c))
        object.__setattr__(self, "sign", check_sign(self.sign))
        if self.m_pow is not None:
            object.__setattr__(self, "m_pow", float(self.m_pow))

    @property
    def general(self) -> bool:
        return self.m_pow is not None

    def validate(self):
        if not self.components:
            raise ConstraintViolation("a hedgehog needs at least one component")
        ns = [comp.n for comp in self.components]
        if self.general:
            if len(self.components) != 1:
                raise ConstraintViolation(
                    "the general separated form (m_pow set) takes exactly one component"
                )
            n = ns[0]
            if n == 0 or not abs(self.m_pow) < abs(n):
                raise ConstraintViolation(
                    f"general spherical form needs |m_pow| < |n| and n != 0, got m_pow={self.m_pow}, n={n}"
                )
            return
        if any(n < 1 for n in ns):
            raise ConstraintViolation(f"hedgehog windings must be >= 1, got {ns}")
        if len(set(ns)) != len(ns):
            raise DuplicateWinding(f"hedgehog windings must be distinct, got {ns}")

    @property
    def max_winding(self) -> int:
        return max(abs(comp.n) for comp in self.components)

    def _pole_mask(self, xyz):
        x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
        r = np.sqrt(x * x + y * y + z * z)
        require_positive_radius(r, self.family)
        on_axis = np.hypot(x, y) <= SNAP * r
        if not any(comp.C != 0 for comp in self.components):
            return np.zeros(xyz.shape[:-1], dtype=bool)
        # sign=+ diverges at theta = pi, sign=- at theta = 0
        diverging = on_axis & ((z < 0) if self.sign > 0 else (z > 0))
        if self.general and np.any(on_axis & ~diverging):
            raise DomainError("hedgehog (general form): the polar axis is outside the domain")
        return diverging

    def _terms(self, xyz):
        if self.general:
            return self._general_terms(xyz)
        r, north, b, gb = _zeta_and_xi(xyz)
        u = np.full(xyz.shape[:-1], self.c, dtype=complex)
        g = np.zeros(xyz.shape, dtype=complex)
        for comp in self.components:
            if comp.C == 0:
                continue
            # exponent of b: zeta^(sign n) = xi^(-sign n)
            e = np.where(north, self.sign * comp.n, -self.sign * comp.n)
            with np.errstate(divide="ignore", invalid="ignore"):
                u = u + comp.C * b**e
                g = g + (comp.C * e * b ** (e - 1))[..., None] * gb
        return u, g

    def _general_terms(self, xyz):
        comp = self.components[0]
        x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
        rho = np.hypot(x, y)
        r = np.sqrt(rho * rho + z * z)
        theta = np.arctan2(rho, z)
        phi = np.arctan2(y, x)
        sig, m, n = self.sign, self.m_pow, comp.n
        v = comp.C * np.exp(
            sig * (m * np.log(r) + theta_profile_log(theta, n, m)) + 1j * sig * n * phi
        )
        st, ct = rho / r, z / r
        cp, sp = np.cos(phi), np.sin(phi)
        r_hat = np.stack([st * cp, st * sp, ct], axis=-1)
        th_hat = np.stack([ct * cp, ct * sp, -st], axis=-1)
        ph_hat = np.stack([-sp, cp, np.zeros_like(sp)], axis=-1)
        a = np.asarray
        dlog = sig * (
            a(m / r)[..., None] * r_hat
            + a(theta_profile_slope(theta, n, m) / r)[..., None] * th_hat
            + a(1j * n / rho)[..., None] * ph_hat
        )
        return v + self.c, v[..., None] * dlog

    def _value(self, xyz):
        return self._terms(xyz)[0]

    def _gradient(self, xyz):
        return self._terms(xyz)[1]

    @property
    def _laplacian(self):
        if self.general:
            return None
        # sums of zeta^n are harmonic in 3D
        return lambda xyz: np.zeros(xyz.shape[:-1], dtype=complex)

    def fd_length(self, xyz):
        # the field varies on the scale of the distance to the diverging half-axis
        rho = np.hypot(xyz[..., 0], xyz[..., 1])
        r = np.linalg.norm(xyz, axis=-1)
        toward_pole = (xyz[..., 2] < 0) if self.sign > 0 else (xyz[..., 2] > 0)
        if self.general:
            return np.minimum(r, rho)
        return np.where(toward_pole, np.minimum(r, rho), r)

    def default_box(self):
        return {"r": (0.2, 5.0), "theta": (1e-3, np.pi - 1e-3), "phi": (0.0, TWO_PI)}


def make_hedgehog(components, c=0j, sign=1, m_pow=None) -> HedgehogSpec:
    """Validated hedgehog; ``components`` are ``(C_j, n_j)`` pairs."""
    spec = HedgehogSpec(tuple(components), c, sign, m_pow)
    spec.validate()
    return spec
