"""Cylindrical string solutions, massless and massive."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Tuple

import numpy as np

from ..exceptions import ConstraintViolation, DuplicateWinding
from ..field_core import TWO_PI
from .base import SNAP, Solution, as_complex, check_sign

RATIO_TOL = 1e-12


def log_radial_factor(rho, n, k, sign=1, mass=0.0):
    """``log`` of ``(rho / (n + s))**(sign*n) * exp(sign*s)``, ``s = sqrt((k^2+m^2) rho^2 + n^2)``."""
    rho = np.asarray(rho, dtype=float)
    s = np.sqrt((k * k + mass * mass) * rho * rho + n * n)
    with np.errstate(divide="ignore"):
        return sign * (n * (np.log(rho) - np.log(n + s)) + s)


def radial_factor(rho, n, k, sign=1, mass=0.0):
    """The radial profile ``R(rho)`` of one separated mode."""
    with np.errstate(over="ignore"):
        return np.exp(log_radial_factor(rho, n, k, sign, mass))


def _mode(xyz, C, n, k, K2, sign):
    """Value, gradient and Laplacian coefficient of one separated mode.

    The mode is ``C w^(sign n) (n+s)^(-sign n) exp(sign s) exp(i sign k z)``
    with ``w = x + i y`` and ``s = sqrt(K2 rho^2 + n^2)``; ``K2`` is
    ``k^2`` for the massless family and ``k^2 + m^2`` for the massive one.
    Its log-gradient is ``sign * (n (1, i, 0)/w + K2/(n+s) (x, y, 0) + i k e_z)``
    and its Laplacian is ``(K2 - k^2 + sign K2 / s)`` times the mode.
    """
    x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    w = x + 1j * y
    s = np.sqrt(K2 * (x * x + y * y) + n * n)
    amp = C * np.exp(sign * (s - n * np.log(n + s)) + 1j * sign * k * z)
    if sign > 0:
        u = amp * w**n
        u_over_w = amp * w ** (n - 1) if n >= 1 else np.zeros_like(amp)
    else:
        u = amp / w**n
        u_over_w = u / w
    radial = K2 / (n + s)
    grad = np.stack(
        [
            sign * (n * u_over_w + radial * x * u),
            sign * (1j * n * u_over_w + radial * y * u),
            1j * k * sign * u,
        ],
        axis=-1,
    )
    lap_coeff = (K2 - k * k) + sign * K2 / s
    return u, grad, lap_coeff * u


@dataclass(frozen=True)
class CylComponent:
    C: complex
    n: int
    k: float

    def __post_init__(self):
        object.__setattr__(self, "C", as_complex(self.C))
        if int(self.n) != self.n:
            raise ValueError(f"winding n must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", float(self.k))


@dataclass(frozen=True)
class CylStringSpec(Solution):
    """Sum of separated cylindrical modes plus a constant offset ``c``.

    Constructing the dataclass directly does not check the winding-ratio
    constraint; use :func:`make_cyl_string` for a validated spec.
    """

    components: Tuple[CylComponent, ...]
    c: complex = 0j
    sign: int = 1
    family = "cyl_string"
    box_system = "cylindrical"

    def __post_init__(self):
        comps = tuple(
            comp if isinstance(comp, CylComponent) else CylComponent(*comp)
            for comp in self.components
        )
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "c", as_complex(self.c))
        object.__setattr__(self, "sign", check_sign(self.sign))

    def validate(self):
        if not self.components:
            raise ConstraintViolation("a cylindrical string needs at least one component")
        ns = [comp.n for comp in self.components]
        if any(n < 1 for n in ns):
            raise ConstraintViolation(f"windings n_j must be >= 1, got {ns}")
        if len(set(ns)) != len(ns):
            raise DuplicateWinding(f"windings n_j must be distinct, got {ns}")
        ratios = [comp.k / comp.n for comp in self.components]
        ref = ratios[0]
        for comp, r in zip(self.components, ratios):
            if abs(r - ref) > RATIO_TOL * max(1.0, abs(ref)):
                raise ConstraintViolation(
                    "winding ratio constraint k_j/n_j = const violated: "
                    f"k/n = {r!r} for n = {comp.n} but {ref!r} for the first component"
                )

    @property
    def ratio(self) -> float:
        comp = self.components[0]
        return comp.k / comp.n

    @property
    def max_winding(self) -> int:
        return max(comp.n for comp in self.components)

    def _active(self):
        return [comp for comp in self.components if comp.C != 0]

    def _pole_mask(self, xyz):
        if self.sign > 0 or not self._active():
            return np.zeros(xyz.shape[:-1], dtype=bool)
        return np.hypot(xyz[..., 0], xyz[..., 1]) <= SNAP

    def _terms(self, xyz):
        u = np.full(xyz.shape[:-1], self.c, dtype=complex)
        g = np.zeros(xyz.shape, dtype=complex)
        lap = np.zeros(xyz.shape[:-1], dtype=complex)
        for comp in self._active():
            uj, gj, lj = _mode(xyz, comp.C, comp.n, comp.k, comp.k**2, self.sign)
            u = u + uj
            g = g + gj
            lap = lap + lj
        return u, g, lap

    def _value(self, xyz):
        return self._terms(xyz)[0]

    def _gradient(self, xyz):
        return self._terms(xyz)[1]

    def _laplacian(self, xyz):
        return self._terms(xyz)[2]

    def default_box(self):
        return {"rho": (0.1, 5.0), "phi": (0.0, TWO_PI), "z": (-5.0, 5.0)}

    def fd_length(self, xyz):
        # radial profiles vary on the scale of rho near the axis
        rho = np.hypot(xyz[..., 0], xyz[..., 1])
        return np.minimum(np.maximum(1.0, np.linalg.norm(xyz, axis=-1)), rho)


def make_cyl_string(components: Iterable, c=0j, sign: int = 1) -> CylStringSpec:
    """Validated multi-component cylindrical string.

    ``components`` holds ``(C_j, n_j, k_j)`` triples or :class:`CylComponent`.

    Raises:
        ConstraintViolation: if the ratios ``k_j / n_j`` differ by more than 1e-12.
        DuplicateWinding: if two components share ``n_j``.
    """
    spec = CylStringSpec(tuple(components), c, sign)
    spec.validate()
    return spec


@dataclass(frozen=True)
class MassiveCylSpec(Solution):
    """Single-mode solution of ``(grad u)^2 = m^2 u^2``.

    ``dim=2`` is the planar solution: no ``z`` dependence and ``k = 0``.
    """

    C: complex
    n: int
    k: float
    m: float
    sign: int = 1
    dim: int = 3
    family = "massive_cyl"
    box_system = "cylindrical"

    def __post_init__(self):
        object.__setattr__(self, "C", as_complex(self.C))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", float(self.k))
        object.__setattr__(self, "m", float(self.m))
        object.__setattr__(self, "sign", check_sign(self.sign))
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim!r}")
        if self.dim == 2:
            object.__setattr__(self, "k", 0.0)

    def validate(self):
        if not self.m > 0:
            raise ConstraintViolation(f"mass must be positive, got m = {self.m!r}")
        if self.n < 1:
            raise ConstraintViolation(f"winding n must be >= 1, got {self.n}")

    @property
    def max_winding(self) -> int:
        return self.n

    def effective_mass_sq(self, rho):
        """``m^2 (1 + sign / sqrt(m^2 rho^2 + n^2))`` (planar solution)."""
        rho = np.asarray(rho, dtype=float)
        return self.m**2 * (1.0 + self.sign / np.sqrt(self.m**2 * rho**2 + self.n**2))

    def _pole_mask(self, xyz):
        if self.sign > 0 or self.C == 0:
            return np.zeros(xyz.shape[:-1], dtype=bool)
        return np.hypot(xyz[..., 0], xyz[..., 1]) <= SNAP

    def _terms(self, xyz):
        return _mode(xyz, self.C, self.n, self.k, self.k**2 + self.m**2, self.sign)

    def _value(self, xyz):
        return self._terms(xyz)[0]

    def _gradient(self, xyz):
        return self._terms(xyz)[1]

    def _laplacian(self, xyz):
        return self._terms(xyz)[2]

    def default_box(self):
        return {"rho": (0.1, 5.0), "phi": (0.0, TWO_PI), "z": (-5.0, 5.0)}

    def fd_length(self, xyz):
        # radial profiles vary on the scale of rho near the axis
        rho = np.hypot(xyz[..., 0], xyz[..., 1])
        return np.minimum(np.maximum(1.0, np.linalg.norm(xyz, axis=-1)), rho)


def make_massive(C=1.0, n=1, k=0.0, m=1.0, sign=1, dim=3) -> MassiveCylSpec:
    """Validated massive string; ``dim=2`` drops the ``k`` dependence."""
    spec = MassiveCylSpec(C, n, k, m, sign, dim)
    spec.validate()
    return spec
