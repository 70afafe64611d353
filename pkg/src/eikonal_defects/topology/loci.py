"""Where the strings are: analytic predictions, zero finding and continuation in z.

A string is a curve on which ``u`` vanishes (with a nonzero offset this is
where the unit field points opposite to its value at spatial infinity).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.optimize import brentq, linear_sum_assignment

from ..exceptions import BranchCollision, NoRoot
from ..field_core import TWO_PI, cartesian_to_elliptic, stereographic_project, wrap_angle
from ..solutions.cylindrical import CylStringSpec, log_radial_factor
from ..solutions.elliptic import EllipticStringSpec
from .charges import dominance_radius

# Newton acceptance: |u| below this times the field scale
ZERO_TOL = 1e-10
NEWTON_MAXITER = 60


def _bracket_increasing(f, lo=1e-3, hi=1.0, what="root"):
    """Bracket a sign change of an increasing function on (0, inf)."""
    for _ in range(200):
        if f(lo) < 0:
            break
        lo /= 10.0
    else:
        raise NoRoot(f"{what}: no negative value found down to rho = {lo}")
    for _ in range(200):
        if f(hi) > 0:
            break
        hi *= 2.0
    else:
        raise NoRoot(f"{what}: no positive value found up to rho = {hi}")
    return lo, hi


@dataclass
class StringPrediction:
    """Strings on the cylinder ``rho = rho0`` along ``n phi + k z = offset + 2 pi l``.

    For the two-component case ``n`` and ``k`` are the differences
    ``n1 - n2`` and ``k1 - k2`` and ``central_charge`` is the winding of the
    axis string.
    """

    rho0: float
    n: int
    k: float
    offset: float
    central_charge: Optional[int] = None

    @property
    def count(self) -> int:
        return self.n

    def phi(self, z: float) -> np.ndarray:
        l = np.arange(self.n)
        return wrap_angle((self.offset + TWO_PI * l - self.k * z) / self.n)

    def points(self, z: float) -> np.ndarray:
        """Cartesian positions at height ``z``; the axis string (if any) comes first."""
        phi = self.phi(z)
        pts = np.stack(
            [self.rho0 * np.cos(phi), self.rho0 * np.sin(phi), np.full_like(phi, z)], axis=-1
        )
        if self.central_charge is not None:
            pts = np.vstack([[0.0, 0.0, z], pts])
        return pts


def predict_strings_N1(n: int, k: float, c0: float, C: complex = 1.0, sign: int = 1) -> StringPrediction:
    """Strings of ``C R(rho) exp(i sign (n phi + k z)) + c0``.

    ``R(rho0) |C| = |c0|`` fixes the cylinder radius (``R`` is monotone) and
    the phase condition gives ``n`` helical lines.
    """
    if c0 == 0 or C == 0:
        raise NoRoot("single-component strings need nonzero C and c0 (c0 = 0 leaves only the axis)")
    target = np.log(abs(c0) / abs(C))

    def f(rho):
        return sign * (log_radial_factor(rho, n, k, sign) - target)

    lo, hi = _bracket_increasing(f, what="R(rho0) = c0")
    rho0 = brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500)
    offset = wrap_angle(sign * (np.angle(-complex(c0)) - np.angle(complex(C))))
    return StringPrediction(float(rho0), int(n), float(k), float(offset))


def predict_strings_N2(n1: int, k1: float, n2: int, k2: float, C1: complex = 1.0, C2: complex = 1.0) -> StringPrediction:
    """Central axis string plus ``n1 - n2`` satellites of a two-component string with ``c = 0``.

    The satellites sit where ``|C1| R1 = |C2| R2``; the axis string carries
    winding ``min(n1, n2)``.
    """
    if n1 == n2:
        raise ValueError("two-component prediction needs distinct windings")
    if n1 < n2:
        n1, k1, n2, k2, C1, C2 = n2, k2, n1, k1, C2, C1

    def f(rho):
        return (
            log_radial_factor(rho, n1, k1) - log_radial_factor(rho, n2, k2) + np.log(abs(C1) / abs(C2))
        )

    lo, hi = _bracket_increasing(f, what="R1(rho0) = R2(rho0)")
    rho0 = brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500)
    offset = wrap_angle(np.pi - np.angle(complex(C1)) + np.angle(complex(C2)))
    return StringPrediction(float(rho0), n1 - n2, float(k1 - k2), float(offset), central_charge=min(n1, n2))


def predict_strings(spec, z: float = 0.0) -> Optional[np.ndarray]:
    """Analytic string positions at height ``z`` when a closed form is known, else ``None``."""
    if isinstance(spec, CylStringSpec):
        active = [c for c in spec.components if c.C != 0]
        if len(active) == 1 and spec.c != 0:
            comp = active[0]
            return predict_strings_N1(comp.n, comp.k, spec.c.real, comp.C, spec.sign).points(z)
        if len(active) == 2 and spec.c == 0 and spec.sign > 0:
            a, b = active
            return predict_strings_N2(a.n, a.k, b.n, b.k, a.C, b.C).points(z)
        if len(active) == 1 and spec.c == 0 and spec.sign > 0:
            return np.array([[0.0, 0.0, z]])
        return None
    if isinstance(spec, EllipticStringSpec):
        return elliptic_string_points(spec, z)
    return None


def elliptic_string_points(spec: EllipticStringSpec, z: float) -> np.ndarray:
    """Points on ``eta = eta0`` solving ``k z + L E(phi|m) = offset + 2 pi l``."""
    from ..field_core import elliptic_to_cartesian
    from ..special_functions import ellip_E

    eta0 = spec.string_eta()
    L, m = spec.L, spec.m
    out = []
    for l in range(spec.n):
        target = (spec.string_phase_offset() + TWO_PI * l - spec.k * z) / L
        # E(phi|m) is increasing with E(phi + 2 pi) = E(phi) + 4 E(m): reduce target into one period
        period = ellip_E(TWO_PI, m)
        target = np.mod(target, period)
        phi = brentq(lambda p: ellip_E(p, m) - target, 0.0, TWO_PI, xtol=1e-15, rtol=1e-15)
        out.append(elliptic_to_cartesian(eta0, phi, z, spec.a))
    return np.array(out)


# --- numerical zero finding -------------------------------------------------

def _field_scale(spec) -> float:
    c = getattr(spec, "c", getattr(spec, "c0", 0.0))
    return max(1.0, abs(complex(c)))


def newton_zero(spec, x: float, y: float, z: float, tol: float = ZERO_TOL):
    """Damped Newton on ``(Re u, Im u)`` over ``(x, y)`` at fixed ``z``.

    Returns ``(x, y, |u|)`` of the converged point or ``None`` on failure.
    """
    scale = _field_scale(spec)
    p = np.array([x, y, z], dtype=float)
    try:
        u = complex(spec.value(p))
    except Exception:
        return None
    for _ in range(NEWTON_MAXITER):
        if abs(u) <= 1e-3 * tol * scale:
            break
        try:
            g = spec.gradient(p)
        except Exception:
            return None
        J = np.array([[g[0].real, g[1].real], [g[0].imag, g[1].imag]])
        F = np.array([u.real, u.imag])
        step = np.linalg.lstsq(J, -F, rcond=None)[0]
        lam = 1.0
        for _ in range(40):
            q = p.copy()
            q[:2] += lam * step
            try:
                uq = complex(spec.value(q))
            except Exception:
                uq = complex(np.inf)
            if abs(uq) < abs(u):
                break
            lam *= 0.5
        else:
            break
        p, u = q, uq
        if lam * np.linalg.norm(step) < 1e-15 * max(1.0, np.linalg.norm(p[:2])):
            break
    if abs(u) <= tol * scale:
        return float(p[0]), float(p[1]), abs(u)
    return None


def _safe_abs(spec, pts):
    """``|u|`` on a grid with ``inf`` at poles, overflow and excluded points."""
    with np.errstate(all="ignore"):
        try:
            pole = spec.pole_mask(pts)
            u = np.where(pole, np.inf, spec._value(pts))
            return np.abs(u)
        except Exception:
            pass
        flat = pts.reshape(-1, 3)
        out = np.full(len(flat), np.inf)
        for i, p in enumerate(flat):
            try:
                out[i] = abs(complex(spec.value(p)))
            except Exception:
                pass
        return out.reshape(pts.shape[:-1])


def default_search_radius(spec, z: float = 0.0) -> float:
    if isinstance(spec, CylStringSpec) and spec.sign > 0:
        return 1.25 * dominance_radius(spec, z)
    if isinstance(spec, EllipticStringSpec):
        try:
            eta0 = spec.string_eta()
        except NoRoot:
            return spec.a
        return 1.5 * 0.5 * spec.a * np.cosh(eta0) + 0.1 * spec.a
    return 5.0


def locate_strings(spec, z: float = 0.0, rho_max: Optional[float] = None, grid=(128, 128), tol: float = ZERO_TOL):
    """All zeros of ``u`` in the disc ``rho <= rho_max`` at height ``z``, as ``(rho, phi)`` pairs.

    A coarse ``(rho, phi)`` grid supplies local minima of ``|u|`` as seeds for
    Newton refinement; converged points are de-duplicated.  Specs with a
    complex offset are rejected.
    """
    offset = complex(getattr(spec, "c", getattr(spec, "c0", 0.0)))
    if offset.imag != 0:
        raise ValueError("locate_strings needs a real offset c0")
    if rho_max is None:
        rho_max = default_search_radius(spec, z)
    nr, nphi = grid
    rho = (np.arange(nr) + 0.5) * rho_max / nr
    # half-step offset keeps the grid off the x axis (the elliptic focal segment)
    phi = (np.arange(nphi) + 0.5) * TWO_PI / nphi
    R, PH = np.meshgrid(rho, phi, indexing="ij")
    pts = np.stack([R * np.cos(PH), R * np.sin(PH), np.full_like(R, z)], axis=-1)
    mag = _safe_abs(spec, pts)
    mag = np.where(np.isfinite(mag), mag, np.inf)
    padded = np.pad(mag, ((1, 1), (0, 0)), constant_values=np.inf)
    is_min = np.ones(mag.shape, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            nb = np.roll(padded, -dj, axis=1)[1 + di : 1 + di + nr]
            is_min &= mag <= nb
    seeds = [(0.0, 0.0)] + [(pts[i, j, 0], pts[i, j, 1]) for i, j in zip(*np.nonzero(is_min))]

    dedupe = 1e-4 * max(1.0, rho_max)
    found: list = []
    for x0, y0 in seeds:
        res = newton_zero(spec, x0, y0, z, tol)
        if res is None:
            continue
        x, y, _ = res
        if np.hypot(x, y) > rho_max * (1 + 1e-9):
            continue
        if any(np.hypot(x - fx, y - fy) < dedupe for fx, fy in found):
            continue
        found.append((x, y))
    # the axis is an exact zero whenever u(0) = 0; snap near-axis hits onto it
    axis_hit = [i for i, (x, y) in enumerate(found) if np.hypot(x, y) < dedupe]
    if axis_hit:
        u0 = abs(complex(spec.value(np.array([0.0, 0.0, z]))))
        if u0 <= tol * _field_scale(spec):
            found[axis_hit[0]] = (0.0, 0.0)
    out = [(float(np.hypot(x, y)), float(wrap_angle(np.arctan2(y, x)))) for x, y in found]
    return sorted(out)


def match_zeros(found, predicted: np.ndarray) -> float:
    """Largest Cartesian distance between ``(rho, phi)`` zeros and predicted points (optimal pairing).

    Returns ``inf`` when the counts differ.
    """
    if len(found) != len(predicted):
        return float("inf")
    if not found:
        return 0.0
    f = np.array([[r * np.cos(p), r * np.sin(p)] for r, p in found])
    q = np.asarray(predicted)[:, :2]
    cost = np.linalg.norm(f[:, None, :] - q[None, :, :], axis=-1)
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


# --- continuation -----------------------------------------------------------

@dataclass
class StringCurve:
    """One traced string: Cartesian points ordered in ``z``."""

    branch: int
    points: np.ndarray
    z_range: tuple = field(default=(0.0, 0.0))

    @property
    def rho(self) -> np.ndarray:
        return np.hypot(self.points[:, 0], self.points[:, 1])

    @property
    def phi_unwrapped(self) -> np.ndarray:
        return np.unwrap(np.arctan2(self.points[:, 1], self.points[:, 0]))

    @property
    def on_axis(self) -> bool:
        return bool(np.all(self.rho == 0.0))

    def to_dict(self) -> dict:
        return {
            "branch": self.branch,
            "z_range": [float(v) for v in self.z_range],
            "points": self.points.tolist(),
        }


def _branch_label(spec, x, y, z) -> Optional[int]:
    """Index ``l`` of the line ``n phi + k z = offset + 2 pi l`` through ``(x, y, z)``."""
    if isinstance(spec, CylStringSpec):
        active = [c for c in spec.components if c.C != 0]
        if len(active) != 1 or spec.c == 0:
            return None
        comp = active[0]
        offset = wrap_angle(spec.sign * (np.angle(-spec.c) - np.angle(comp.C)))
        phase = comp.n * np.arctan2(y, x) + comp.k * z - offset
        return int(np.round(phase / TWO_PI)) % comp.n
    if isinstance(spec, EllipticStringSpec):
        from ..special_functions import ellip_E

        _, phi, _ = cartesian_to_elliptic(np.array([x, y, z]), spec.a)
        phase = spec.k * z + spec.L * ellip_E(float(phi), spec.m) - spec.string_phase_offset()
        return int(np.round(phase / TWO_PI)) % spec.n
    return None


def trace_string_curves(spec, z_min: float, z_max: float, step: float, rho_max: Optional[float] = None) -> List[StringCurve]:
    """Follow every string from ``z_min`` to ``z_max`` by Newton continuation.

    Slices are spaced by at most ``step``.  Each branch is refined from its
    position on the previous slice; two branches converging within the
    refinement tolerance, or a branch jumping further than half the gap to
    its nearest neighbour, raise :class:`BranchCollision`.
    """
    if not step > 0 or not z_max > z_min:
        raise ValueError("need step > 0 and z_max > z_min")
    nsteps = int(np.ceil((z_max - z_min) / step - 1e-9))
    zs = np.linspace(z_min, z_max, nsteps + 1)
    start = locate_strings(spec, zs[0], rho_max=rho_max)
    xy = np.array([[r * np.cos(p), r * np.sin(p)] for r, p in start]).reshape(-1, 2)
    if len(xy) == 0:
        return []
    tracks = [[(x, y, zs[0])] for x, y in xy]
    merge = 1e-7 * max(1.0, float(np.max(np.hypot(xy[:, 0], xy[:, 1]))))
    for z in zs[1:]:
        new = []
        for x, y in xy:
            res = newton_zero(spec, x, y, z)
            if res is None:
                raise BranchCollision(f"continuation lost a branch at z = {z}; reduce the step")
            new.append(res[:2])
        new = np.array(new)
        if len(new) > 1:
            d = np.linalg.norm(new[:, None] - new[None, :], axis=-1)
            d[np.diag_indices_from(d)] = np.inf
            gap = d.min(axis=1)
            if np.any(gap < merge):
                raise BranchCollision(f"two branches merged at z = {z}; reduce the step")
            prev = np.linalg.norm(xy[:, None] - xy[None, :], axis=-1)
            prev[np.diag_indices_from(prev)] = np.inf
            moved = np.linalg.norm(new - xy, axis=-1)
            if np.any(moved > 0.5 * prev.min(axis=1)):
                raise BranchCollision(f"a branch jumped towards its neighbour at z = {z}; reduce the step")
        for track, (x, y) in zip(tracks, new):
            track.append((x, y, z))
        xy = new

    labels = [_branch_label(spec, t[0][0], t[0][1], t[0][2]) for t in tracks]
    if any(l is None for l in labels) or len(set(labels)) != len(labels):
        order = sorted(range(len(tracks)), key=lambda i: (np.hypot(*xy[i]) > 0, wrap_angle(np.arctan2(tracks[i][0][1], tracks[i][0][0]))))
        labels = [0] * len(tracks)
        for rank, i in enumerate(order):
            labels[i] = rank
    curves = [
        StringCurve(branch=int(l), points=np.array(t, dtype=float), z_range=(float(zs[0]), float(zs[-1])))
        for l, t in zip(labels, tracks)
    ]
    return sorted(curves, key=lambda c: c.branch)


def string_position_vector(spec, rho_far: float = 1e3):
    """``(n_infinity, n_string)``: unit field far out and on a located string.

    The far value is taken at ``rho = rho_far`` in the ``z = 0`` plane (an
    overflowing growing branch counts as the pole ``u = inf``).  If no
    string is found, ``n_string`` is reported as ``-n_infinity``.
    """
    far = np.array([[rho_far * np.cos(t), rho_far * np.sin(t), 0.0] for t in np.linspace(0, TWO_PI, 8, endpoint=False)])
    pole = spec.pole_mask(far)
    with np.errstate(all="ignore"):
        u = np.where(pole, 0.0, spec._value(far))
    nf = stereographic_project(u, pole)
    n_inf = nf[0]
    if not np.allclose(nf, n_inf, atol=1e-8):
        raise ValueError("unit field is not constant at large radius")
    zeros = locate_strings(spec, 0.0)
    if not zeros:
        return n_inf, -n_inf
    r, p = zeros[-1]
    u0 = spec.value(np.array([r * np.cos(p), r * np.sin(p), 0.0]))
    return n_inf, stereographic_project(u0)
