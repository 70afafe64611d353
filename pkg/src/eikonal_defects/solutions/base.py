"""Common machinery for the closed-form solution families."""
from __future__ import annotations

from typing import Optional

import numpy as np

from ..exceptions import DomainError, PoleError
from ..field_core import FieldSample, PointLike, as_xyz, fd_laplacian

# points closer than this to a singular locus snap to the analytic limit
SNAP = 1e-12


def check_sign(sign) -> int:
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    return int(sign)


def as_complex(v) -> complex:
    """Accept a number, a ``[re, im]`` pair or a ``{"re":, "im":}`` mapping."""
    if isinstance(v, dict):
        return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex pair needs two entries, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(v)


class Solution:
    """Base class of the solution families.

    Subclasses implement ``_pole_mask`` (raising :class:`DomainError` for
    invalid points), ``_value`` and ``_gradient`` for pole-free points, and
    optionally ``_laplacian``.  The public methods add domain checking and
    accept any ``(..., 3)`` array of Cartesian points.
    """

    family: str = ""
    # natural coordinate system and box used by the default point sampler
    box_system: str = "cartesian"

    def _pole_mask(self, xyz: np.ndarray) -> np.ndarray:
        return np.zeros(xyz.shape[:-1], dtype=bool)

    def _value(self, xyz):
        raise NotImplementedError

    def _gradient(self, xyz):
        raise NotImplementedError

    _laplacian = None

    # --- public, checked API ---------------------------------------------

    def pole_mask(self, p: PointLike) -> np.ndarray:
        """Boolean mask of poles; raises :class:`DomainError` for invalid points."""
        return self._pole_mask(as_xyz(p))

    def _checked(self, p):
        xyz = as_xyz(p)
        if np.any(self._pole_mask(xyz)):
            raise PoleError(f"{self.family}: point(s) hit a pole of the field")
        return xyz

    def value(self, p: PointLike) -> np.ndarray:
        xyz = self._checked(p)
        with np.errstate(over="ignore", invalid="ignore"):
            u = np.asarray(self._value(xyz), dtype=complex)
        if not np.all(np.isfinite(u)):
            raise PoleError(f"{self.family}: field overflows the double range")
        return u

    __call__ = value

    def gradient(self, p: PointLike) -> np.ndarray:
        xyz = self._checked(p)
        with np.errstate(over="ignore", invalid="ignore"):
            g = np.asarray(self._gradient(xyz), dtype=complex)
        if not np.all(np.isfinite(g)):
            raise PoleError(f"{self.family}: gradient overflows the double range")
        return g

    @property
    def has_analytic_laplacian(self) -> bool:
        return self._laplacian is not None

    def laplacian(self, p: PointLike) -> np.ndarray:
        """Analytic Laplacian when the family provides one, else finite differences."""
        xyz = self._checked(p)
        if self._laplacian is None:
            return fd_laplacian(self.value, xyz)
        return np.asarray(self._laplacian(xyz), dtype=complex)

    def validate(self) -> None:
        """Raise if the parameters break a family invariant."""

    @property
    def max_winding(self) -> int:
        raise NotImplementedError

    def default_box(self) -> dict:
        """Natural-coordinate box for random sampling."""
        raise NotImplementedError

    def fd_length(self, xyz: np.ndarray) -> np.ndarray:
        """Local length scale for finite-difference steps (``max(1, |p|)`` by default)."""
        return np.maximum(1.0, np.linalg.norm(xyz, axis=-1))


def evaluate(spec: Solution, p: PointLike) -> FieldSample:
    """Value and analytic gradient of ``spec`` at a single point."""
    xyz = as_xyz(p)
    if xyz.shape != (3,):
        raise ValueError("evaluate() takes a single point; use spec.value() for arrays")
    if spec.pole_mask(xyz):
        return FieldSample(0j, np.zeros(3, dtype=complex), pole=True)
    try:
        u = complex(spec.value(xyz))
        g = spec.gradient(xyz)
    except PoleError:
        return FieldSample(0j, np.zeros(3, dtype=complex), pole=True)
    return FieldSample(u, g, pole=False)


def require_positive_radius(r: np.ndarray, family: str, what: str = "r") -> None:
    if np.any(r <= 0.0):
        raise DomainError(f"{family}: {what} must be positive")


def finite_or_raise(x: Optional[float], name: str) -> float:
    x = float(x)
    if not np.isfinite(x):
        raise ValueError(f"{name} must be finite")
    return x
