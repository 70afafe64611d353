"""Pointwise residuals of the PDE identities satisfied by the solution families.

Every residual is relative with a ``+1`` floor in the denominator, so zero
fields give a zero residual instead of ``0/0``.  Analytic gradients are used
whenever the field provides them; second derivatives come from
:func:`~eikonal_defects.field_core.fd_laplacian` unless ``method="analytic"``.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.stats import qmc

from .field_core import (
    as_xyz,
    cylindrical_to_cartesian,
    elliptic_to_cartesian,
    fd_gradient,
    fd_laplacian,
    spherical_to_cartesian,
)

IDENTITIES = ("eikonal", "massive", "laplace", "o3_eom", "effective_mass", "gradient_check")

# pass thresholds: analytic-gradient identities vs. those needing finite differences
ANALYTIC_TOL = 1e-6
FD_TOL = 1e-4
DEFAULT_TOLERANCES = {
    "eikonal": ANALYTIC_TOL,
    "massive": ANALYTIC_TOL,
    "gradient_check": ANALYTIC_TOL,
    "laplace": FD_TOL,
    "o3_eom": FD_TOL,
    "effective_mass": FD_TOL,
}


@dataclass
class ResidualReport:
    identity: str
    points: int
    max_rel: float
    mean_rel: float
    worst_point: tuple
    # per-point relative residuals, in sample order (not serialised)
    values: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def passed(self, tol: float) -> bool:
        return self.max_rel < tol

    def fraction_above(self, level: float) -> float:
        return float(np.mean(self.values > level))

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "points": self.points,
            "max_rel": self.max_rel,
            "mean_rel": self.mean_rel,
            "worst_point": [float(v) for v in self.worst_point],
        }


def _report(identity, xyz, rel) -> ResidualReport:
    rel = np.asarray(rel, dtype=float).reshape(-1)
    pts = xyz.reshape(-1, 3)
    i = int(np.argmax(rel))
    return ResidualReport(
        identity=identity,
        points=int(rel.size),
        max_rel=float(rel[i]),
        mean_rel=float(rel.mean()),
        worst_point=tuple(float(v) for v in pts[i]),
        values=rel,
    )


# --- sampling ---------------------------------------------------------------

def _threads() -> int:
    n = int(os.environ.get("EIKONAL_THREADS", "0") or 0)
    return n if n > 0 else min(8, os.cpu_count() or 1)


def pointwise(func: Callable[[np.ndarray], np.ndarray], xyz: np.ndarray, chunk: int = 512):
    """Apply a vectorised ``func`` over points, in parallel chunks when allowed.

    Chunks are concatenated in order, so results do not depend on the
    thread count.
    """
    workers = _threads()
    if workers <= 1 or len(xyz) <= chunk:
        return func(xyz)
    parts = [xyz[i : i + chunk] for i in range(0, len(xyz), chunk)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(func, parts))
    return np.concatenate(results, axis=0)


def sample_points(spec, count: int = 1000, seed: int = 0, box: Optional[dict] = None) -> np.ndarray:
    """Scrambled-Halton points inside ``box`` given in the spec's natural coordinates.

    ``box`` maps coordinate names to ``(lo, hi)``; it defaults to
    ``spec.default_box()``, which already keeps a collar around singular loci.
    """
    system = spec.box_system
    box = dict(spec.default_box() if box is None else box)
    names = {
        "cylindrical": ("rho", "phi", "z"),
        "spherical": ("r", "theta", "phi"),
        "elliptic": ("eta", "phi", "z"),
        "cartesian": ("x", "y", "z"),
    }[system]
    lo = np.array([box[k][0] for k in names], dtype=float)
    hi = np.array([box[k][1] for k in names], dtype=float)
    unit = qmc.Halton(d=3, scramble=True, seed=seed).random(count)
    c = qmc.scale(unit, lo, hi) if np.all(hi > lo) else lo + unit * (hi - lo)
    if system == "cylindrical":
        return cylindrical_to_cartesian(c[:, 0], c[:, 1], c[:, 2])
    if system == "spherical":
        return spherical_to_cartesian(c[:, 0], c[:, 1], c[:, 2])
    if system == "elliptic":
        a = spec.base.a if hasattr(spec, "base") else spec.a
        return elliptic_to_cartesian(c[:, 0], c[:, 1], c[:, 2], a)
    return c


# --- derivative helpers -----------------------------------------------------

def _gradient(field, xyz):
    if hasattr(field, "gradient"):
        return pointwise(field.gradient, xyz)
    return pointwise(lambda p: fd_gradient(field, p), xyz)


def _laplacian(field, xyz, method):
    if method == "analytic":
        return pointwise(field.laplacian, xyz)
    if method != "fd":
        raise ValueError(f"method must be 'fd' or 'analytic', got {method!r}")
    if hasattr(field, "fd_length"):
        return pointwise(lambda p: fd_laplacian(field, p, h=1e-3 * field.fd_length(p)), xyz)
    return pointwise(lambda p: fd_laplacian(field, p), xyz)


def _value(field, xyz):
    return np.asarray(pointwise(field, xyz), dtype=complex)


def _sq(g):
    return np.sum(g * g, axis=-1)


def _norm2(g):
    return np.sum(np.abs(g) ** 2, axis=-1)


def _mass_of(spec) -> float:
    if hasattr(spec, "m") and not hasattr(spec, "lam"):
        return float(spec.m)
    if hasattr(spec, "base"):
        return _mass_of(spec.base)
    raise ValueError("massive residual needs a mass; pass m= explicitly")


# --- identities -------------------------------------------------------------

def eikonal_residual(spec, points) -> ResidualReport:
    """``|(grad u)^2| / (1 + sum |d_i u|^2)``."""
    xyz = as_xyz(points).reshape(-1, 3)
    g = _gradient(spec, xyz)
    return _report("eikonal", xyz, np.abs(_sq(g)) / (1.0 + _norm2(g)))


def massive_residual(spec, points, m: Optional[float] = None) -> ResidualReport:
    """``|(grad u)^2 - m^2 u^2| / (1 + sum |d_i u|^2 + m^2 |u|^2)``."""
    m = _mass_of(spec) if m is None else float(m)
    xyz = as_xyz(points).reshape(-1, 3)
    g = _gradient(spec, xyz)
    u = _value(spec, xyz)
    m2 = m * m
    rel = np.abs(_sq(g) - m2 * u * u) / (1.0 + _norm2(g) + m2 * np.abs(u) ** 2)
    return _report("massive", xyz, rel)


def laplace_residual(spec, points, method: str = "fd") -> ResidualReport:
    """``|lap u| / (1 + |lap u| + sum |d_i u|^2)``."""
    xyz = as_xyz(points).reshape(-1, 3)
    lap = _laplacian(spec, xyz, method)
    g = _gradient(spec, xyz)
    return _report("laplace", xyz, np.abs(lap) / (1.0 + np.abs(lap) + _norm2(g)))


def o3_eom_terms(spec, points, method: str = "fd"):
    """The two terms of the static O(3) field equation.

    Returns ``(A, B)`` with ``A = lap u / (1+|u|^2)^2`` and
    ``B = 2 (grad u)^2 conj(u) / (1+|u|^2)^3``; the equation is ``A - B = 0``.
    """
    xyz = as_xyz(points).reshape(-1, 3)
    u = _value(spec, xyz)
    g = _gradient(spec, xyz)
    lap = _laplacian(spec, xyz, method)
    w = 1.0 + np.abs(u) ** 2
    return lap / w**2, 2.0 * _sq(g) * np.conj(u) / w**3


def o3_eom_residual(spec, points, method: str = "fd") -> ResidualReport:
    """``|A - B| / (1 + |A| + |B|)`` with ``A``, ``B`` from :func:`o3_eom_terms`.

    Pole points are rejected with :class:`~eikonal_defects.exceptions.PoleError`.
    """
    xyz = as_xyz(points).reshape(-1, 3)
    A, B = o3_eom_terms(spec, xyz, method)
    return _report("o3_eom", xyz, np.abs(A - B) / (1.0 + np.abs(A) + np.abs(B)))


def effective_mass_residual(spec, points, m_eff_sq: Optional[Callable] = None, method: str = "fd") -> ResidualReport:
    """``|lap u - m_eff^2 u| / (1 + |lap u| + sum |d_i u|^2)`` for the planar massive string.

    ``m_eff_sq`` maps the cylindrical radius to ``m_eff^2``; it defaults to
    ``spec.effective_mass_sq``.
    """
    if getattr(spec, "dim", None) != 2:
        raise ValueError("effective-mass identity applies to the planar (dim=2) massive string")
    m_eff_sq = spec.effective_mass_sq if m_eff_sq is None else m_eff_sq
    xyz = as_xyz(points).reshape(-1, 3)
    u = _value(spec, xyz)
    g = _gradient(spec, xyz)
    lap = _laplacian(spec, xyz, method)
    rho = np.hypot(xyz[:, 0], xyz[:, 1])
    rel = np.abs(lap - m_eff_sq(rho) * u) / (1.0 + np.abs(lap) + _norm2(g))
    return _report("effective_mass", xyz, rel)


def gradient_check(spec, points) -> ResidualReport:
    """Analytic gradient vs. central differences: ``max_i |fd - an| / max(1, |an|)``."""
    xyz = as_xyz(points).reshape(-1, 3)
    an = pointwise(spec.gradient, xyz)
    if hasattr(spec, "fd_length"):
        fd = pointwise(lambda p: fd_gradient(spec, p, h=1e-5 * spec.fd_length(p)), xyz)
    else:
        fd = pointwise(lambda p: fd_gradient(spec, p), xyz)
    scale = np.maximum(1.0, np.max(np.abs(an), axis=-1))
    return _report("gradient_check", xyz, np.max(np.abs(fd - an), axis=-1) / scale)


RESIDUALS = {
    "eikonal": eikonal_residual,
    "massive": massive_residual,
    "laplace": laplace_residual,
    "o3_eom": o3_eom_residual,
    "effective_mass": effective_mass_residual,
    "gradient_check": gradient_check,
}


def residual(identity: str, spec, points) -> ResidualReport:
    """Dispatch by identity name."""
    try:
        func = RESIDUALS[identity]
    except KeyError:
        raise ValueError(f"unknown identity {identity!r}; expected one of {IDENTITIES}") from None
    return func(spec, points)
