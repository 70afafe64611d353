"""Coordinates, stereographic projection and finite-difference kernels.

Every field in the package is exposed to these kernels as an *evaluator*:
a callable taking Cartesian points of shape ``(..., 3)`` and returning the
complex field values of shape ``(...)``.  Evaluators raise
:class:`~eikonal_defects.exceptions.DomainError` (or its subclass
:class:`~eikonal_defects.exceptions.PoleError`) for points they cannot
evaluate; the finite-difference kernels let those errors propagate.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .exceptions import DomainError

TWO_PI = 2.0 * np.pi

Evaluator = Callable[[np.ndarray], np.ndarray]

SYSTEMS = ("cartesian", "cylindrical", "spherical", "elliptic")


def wrap_angle(phi):
    """Reduce angles to ``[0, 2*pi)``."""
    out = np.mod(phi, TWO_PI)
    # np.mod can round tiny negatives up to exactly 2*pi
    return np.where(out >= TWO_PI, 0.0, out)


# --- vectorised conversions -------------------------------------------------

def cylindrical_to_cartesian(rho, phi, z) -> np.ndarray:
    rho, phi, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (rho, phi, z)))
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)


def cartesian_to_cylindrical(xyz):
    xyz = np.asarray(xyz, dtype=float)
    x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    return np.hypot(x, y), wrap_angle(np.arctan2(y, x)), z.copy()


def spherical_to_cartesian(r, theta, phi) -> np.ndarray:
    r, theta, phi = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (r, theta, phi)))
    st = np.sin(theta)
    return np.stack([r * st * np.cos(phi), r * st * np.sin(phi), r * np.cos(theta)], axis=-1)


def cartesian_to_spherical(xyz):
    xyz = np.asarray(xyz, dtype=float)
    x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    rho = np.hypot(x, y)
    return np.hypot(rho, z), np.arctan2(rho, z), wrap_angle(np.arctan2(y, x))


def elliptic_to_cartesian(eta, phi, z, a) -> np.ndarray:
    """Elliptic-cylinder coordinates with foci at ``(+-a/2, 0)``."""
    eta, phi, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (eta, phi, z)))
    f = 0.5 * a
    return np.stack(
        [f * np.cos(phi) * np.cosh(eta), f * np.sin(phi) * np.sinh(eta), z], axis=-1
    )


def cartesian_to_elliptic(xyz, a):
    """Inverse of :func:`elliptic_to_cartesian`.

    Uses ``x + i y = (a/2) cosh(eta + i phi)``; the principal branch of the
    complex arccosh already returns ``eta >= 0``.
    """
    xyz = np.asarray(xyz, dtype=float)
    w = (xyz[..., 0] + 1j * xyz[..., 1]) / (0.5 * a)
    zeta = np.arccosh(w)
    eta = zeta.real
    phi = zeta.imag
    # the principal branch mirrors the lower half plane; flip it back
    flip = eta < 0
    eta = np.where(flip, -eta, eta)
    phi = np.where(flip, -phi, phi)
    return eta, wrap_angle(phi), xyz[..., 2].copy()


@dataclass(frozen=True)
class Point3:
    """A point tagged with the coordinate system its coordinates refer to.

    Coordinates are canonicalised on construction: angles are reduced to
    their canonical ranges and radial coordinates must be non-negative.
    ``a`` is the focal parameter and is only used by the elliptic system.
    """

    system: str
    coords: tuple
    a: Optional[float] = None
    _xyz: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.system not in SYSTEMS:
            raise ValueError(f"unknown coordinate system {self.system!r}")
        c = tuple(float(v) for v in self.coords)
        if len(c) != 3 or not all(np.isfinite(c)):
            raise ValueError("Point3 needs three finite coordinates")
        if self.system == "cylindrical":
            if c[0] < 0:
                raise ValueError("rho must be non-negative")
            c = (c[0], float(wrap_angle(c[1])), c[2])
            xyz = cylindrical_to_cartesian(*c)
        elif self.system == "spherical":
            if c[0] < 0:
                raise ValueError("r must be non-negative")
            if not 0.0 <= c[1] <= np.pi:
                raise ValueError("theta must lie in [0, pi]")
            c = (c[0], c[1], float(wrap_angle(c[2])))
            xyz = spherical_to_cartesian(*c)
        elif self.system == "elliptic":
            if self.a is None or not self.a > 0:
                raise ValueError("elliptic points need a focal parameter a > 0")
            if c[0] < 0:
                raise ValueError("eta must be non-negative")
            c = (c[0], float(wrap_angle(c[1])), c[2])
            xyz = elliptic_to_cartesian(*c, self.a)
        else:
            xyz = np.array(c)
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "_xyz", np.asarray(xyz, dtype=float))

    @classmethod
    def cartesian(cls, x, y, z):
        return cls("cartesian", (x, y, z))

    @classmethod
    def cylindrical(cls, rho, phi, z):
        return cls("cylindrical", (rho, phi, z))

    @classmethod
    def spherical(cls, r, theta, phi):
        return cls("spherical", (r, theta, phi))

    @classmethod
    def elliptic(cls, eta, phi, z, a):
        return cls("elliptic", (eta, phi, z), a=a)

    @property
    def xyz(self) -> np.ndarray:
        return self._xyz.copy()

    def to(self, system: str, a: Optional[float] = None) -> "Point3":
        """Re-express the point in another coordinate system."""
        xyz = self._xyz
        if system == "cartesian":
            return Point3.cartesian(*xyz)
        if system == "cylindrical":
            return Point3.cylindrical(*(float(v) for v in cartesian_to_cylindrical(xyz)))
        if system == "spherical":
            return Point3.spherical(*(float(v) for v in cartesian_to_spherical(xyz)))
        if system == "elliptic":
            a = self.a if a is None else a
            if a is None:
                raise ValueError("converting to elliptic coordinates needs a")
            return Point3.elliptic(*(float(v) for v in cartesian_to_elliptic(xyz, a)), a=a)
        raise ValueError(f"unknown coordinate system {system!r}")


PointLike = Union[Point3, np.ndarray, tuple, list]


def as_xyz(p: PointLike) -> np.ndarray:
    """Cartesian coordinates of a :class:`Point3` or an ``(..., 3)`` array."""
    if isinstance(p, Point3):
        return p.xyz
    xyz = np.asarray(p, dtype=float)
    if xyz.shape[-1:] != (3,):
        raise ValueError(f"expected trailing dimension 3, got shape {xyz.shape}")
    return xyz


@dataclass
class FieldSample:
    """Field value and Cartesian gradient at one point.

    When ``pole`` is set the field diverges there and ``value``/``grad``
    carry no information.
    """

    value: complex
    grad: np.ndarray
    pole: bool = False


# --- stereographic projection ----------------------------------------------

def stereographic_project(u, pole=None) -> np.ndarray:
    """Map complex ``u`` onto the unit sphere.

    ``u = 0`` goes to the south pole ``(0, 0, -1)`` and ``u = inf`` (or any
    entry flagged in ``pole``) to the north pole ``(0, 0, 1)``.  Large
    moduli are handled through ``1/u`` so the result stays unit-norm.
    """
    u = np.asarray(u, dtype=complex)
    if pole is None:
        pole = np.zeros(u.shape, dtype=bool)
    pole = np.broadcast_to(np.asarray(pole, dtype=bool), u.shape) | ~np.isfinite(u)
    safe = np.where(pole, 0.0, u)
    big = np.abs(safe) > 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.where(big, 1.0 / np.where(big, safe, 1.0), safe)
    a2 = np.abs(v) ** 2
    denom = 1.0 + a2
    # for |u| > 1 write everything in terms of v = 1/u
    planar = np.where(big, 2.0 * np.conj(v), 2.0 * v) / denom
    n3 = np.where(big, 1.0 - a2, a2 - 1.0) / denom
    out = np.stack([planar.real, planar.imag, n3], axis=-1)
    out[pole] = (0.0, 0.0, 1.0)
    return out


# --- finite differences ------------------------------------------------------

_UNIT = np.eye(3)


def _default_step(xyz, scale):
    return scale * np.maximum(1.0, np.linalg.norm(xyz, axis=-1))


def _stencil_values(field: Evaluator, xyz, h):
    offsets = np.concatenate([_UNIT, -_UNIT])  # (6, 3)
    pts = xyz[..., None, :] + h[..., None, None] * offsets
    vals = np.asarray(field(pts), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise DomainError("field is not finite on the finite-difference stencil")
    return vals[..., :3], vals[..., 3:]


def fd_gradient(field: Evaluator, p: PointLike, h=None) -> np.ndarray:
    """Central-difference Cartesian gradient, error ``O(h^2)``.

    ``p`` may be a :class:`Point3` or an ``(..., 3)`` array; the result has
    shape ``(..., 3)``.  The default step is ``1e-5 * max(1, |p|)``.
    """
    xyz = as_xyz(p)
    h = _default_step(xyz, 1e-5) if h is None else np.broadcast_to(np.asarray(h, float), xyz.shape[:-1])
    if np.any(h <= 0):
        raise ValueError("step h must be positive")
    plus, minus = _stencil_values(field, xyz, h)
    return (plus - minus) / (2.0 * h[..., None])


def fd_laplacian(field: Evaluator, p: PointLike, h=None) -> np.ndarray:
    """Fourth-order Laplacian on the 13-point stencil ``+-h, +-2h`` per axis.

    Error ``O(h^4)``; default ``h = 1e-3 * max(1, |p|)`` balances truncation
    against rounding (``eps / h^2``).
    """
    xyz = as_xyz(p)
    h = _default_step(xyz, 1e-3) if h is None else np.broadcast_to(np.asarray(h, float), xyz.shape[:-1])
    if np.any(h <= 0):
        raise ValueError("step h must be positive")
    p1, m1 = _stencil_values(field, xyz, h)
    p2, m2 = _stencil_values(field, xyz, 2.0 * h)
    centre = np.asarray(field(xyz), dtype=complex)
    if not np.all(np.isfinite(centre)):
        raise DomainError("field is not finite at the stencil centre")
    near = (p1 + m1).sum(axis=-1)
    far = (p2 + m2).sum(axis=-1)
    return (16.0 * near - far - 90.0 * centre) / (12.0 * h**2)
