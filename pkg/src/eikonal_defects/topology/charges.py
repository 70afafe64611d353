"""Integer topological charges: planar winding and sphere-map degree."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from ..exceptions import GridTooCoarse, PhaseJump, ZeroOnContour
from ..field_core import TWO_PI, spherical_to_cartesian, stereographic_project
from ..solutions.cylindrical import CylStringSpec, MassiveCylSpec, log_radial_factor

ACCEPT_DEFECT = 0.05
MAX_EDGE = np.pi / 4


@dataclass
class ChargeReport:
    index: int
    raw: float
    defect: float

    @property
    def accepted(self) -> bool:
        return self.defect < ACCEPT_DEFECT

    def to_dict(self) -> dict:
        return asdict(self)


def _charge(raw: float) -> ChargeReport:
    index = int(np.round(raw))
    return ChargeReport(index=index, raw=float(raw), defect=float(abs(raw - index)))


def dominance_radius(spec, z: float = 0.0) -> float:
    """Radius beyond which the highest-winding mode outweighs everything else.

    For a growing-branch cylindrical string this makes ``|u| > 0`` outside
    the radius (so every string is enclosed) and fixes the far-field
    winding at ``max n_j`` by Rouche's theorem.
    """
    if isinstance(spec, MassiveCylSpec):
        return 1.0
    if not isinstance(spec, CylStringSpec) or spec.sign < 0:
        raise ValueError("an explicit contour radius is needed for this spec")
    active = [c for c in spec.components if c.C != 0]
    if not active:
        return 1.0
    top = max(active, key=lambda c: c.n)
    rest = [c for c in active if c is not top]
    rho = 1.0
    for _ in range(200):
        lead = np.log(abs(top.C)) + log_radial_factor(rho, top.n, top.k)
        others = [np.log(abs(c.C)) + log_radial_factor(rho, c.n, c.k) for c in rest]
        if abs(spec.c) > 0:
            others.append(np.log(abs(spec.c)))
        if not others or lead > np.log(2.0) + np.logaddexp.reduce(others):
            return rho
        rho *= 1.5
    raise ValueError("could not find a dominance radius")


def winding_number(
    spec,
    z: float = 0.0,
    radius: float | None = None,
    samples: int | None = None,
    center: Sequence[float] = (0.0, 0.0),
    zero_tol: float = 1e-12,
) -> ChargeReport:
    """Winding of ``arg u`` around the circle of ``radius`` about ``center`` at height ``z``.

    Phase increments are taken on the principal branch; an increment above
    ``pi/2`` means the contour is undersampled and raises :class:`PhaseJump`.
    ``radius`` defaults to :func:`dominance_radius`.
    """
    if radius is None:
        radius = dominance_radius(spec, z)
    if not radius > 0:
        raise ValueError("radius must be positive")
    nmax = max(1, int(spec.max_winding)) if hasattr(spec, "max_winding") else 1
    if samples is None:
        samples = max(256, 64 * nmax)
    if samples < 16 * nmax:
        raise ValueError(f"need at least {16 * nmax} samples for winding up to {nmax}")
    t = np.linspace(0.0, TWO_PI, samples, endpoint=False)
    pts = np.stack(
        [center[0] + radius * np.cos(t), center[1] + radius * np.sin(t), np.full_like(t, z)],
        axis=-1,
    )
    u = np.asarray(spec(pts), dtype=complex)
    mag = np.abs(u)
    if np.min(mag) < zero_tol * max(1.0, float(np.max(mag))):
        i = int(np.argmin(mag))
        raise ZeroOnContour(f"|u| = {mag[i]:.3e} on the contour at {pts[i].tolist()}")
    steps = np.angle(np.roll(u, -1) / u)
    worst = float(np.max(np.abs(steps)))
    if worst > np.pi / 2:
        raise PhaseJump(f"phase step {worst:.3f} > pi/2 with {samples} samples; increase samples")
    return _charge(np.sum(steps) / TWO_PI)


def _lattice(nfield, grid):
    nt, nphi = grid
    theta = np.linspace(0.0, np.pi, nt + 1)
    phi = np.linspace(0.0, TWO_PI, nphi + 1)
    T, PH = np.meshgrid(theta, phi, indexing="ij")
    n = np.asarray(nfield(T, PH), dtype=float)
    n[:, -1] = n[:, 0]  # close the phi seam exactly
    return n


def _lattice_degree(n) -> float:
    a = n[:-1, :-1]
    b = n[1:, :-1]
    c = n[1:, 1:]
    d = n[:-1, 1:]
    total = _solid_angle(a, b, c).sum() + _solid_angle(a, c, d).sum()
    return float(total / (4.0 * np.pi))


def _max_edge_angle(n) -> float:
    """Largest angle between neighbouring lattice images (resolution check)."""
    dots = [
        np.einsum("...i,...i->...", n[1:, :], n[:-1, :]),
        np.einsum("...i,...i->...", n[:, 1:], n[:, :-1]),
    ]
    return float(max(np.arccos(np.clip(d, -1.0, 1.0)).max() for d in dots))


def sphere_degree(nfield: Callable[[np.ndarray, np.ndarray], np.ndarray], grid=(128, 128)) -> float:
    """Outward-oriented degree of a map ``(theta, phi) -> S^2``, before rounding.

    The parameter sphere is triangulated on a ``theta x phi`` lattice and the
    signed solid angles of the image triangles are summed; this discretises
    ``(1/4pi) int n . (d_theta n x d_phi n) dtheta dphi`` and is an exact
    integer once each image triangle is small.
    """
    return _lattice_degree(_lattice(nfield, grid))


def _solid_angle(a, b, c):
    """Signed solid angle of the spherical triangle ``abc`` (Van Oosterom-Strackee)."""
    num = np.einsum("...i,...i->...", a, np.cross(b, c))
    den = 1.0 + np.einsum("...i,...i->...", a, b) + np.einsum("...i,...i->...", b, c) + np.einsum(
        "...i,...i->...", c, a
    )
    return 2.0 * np.arctan2(num, den)


def unit_field_on_sphere(spec, r: float = 1.0):
    """``(theta, phi) -> n(u)`` on the sphere of radius ``r``, honouring poles."""

    def nfield(theta, phi):
        pts = spherical_to_cartesian(np.full_like(theta, r), theta, phi)
        pole = spec.pole_mask(pts)
        u = np.zeros(pole.shape, dtype=complex)
        ok = ~pole
        with np.errstate(over="ignore", invalid="ignore"):
            u[ok] = spec._value(pts[ok])
        return stereographic_project(u, pole)

    return nfield


def monopole_degree(spec, r: float = 1.0, grid=(128, 128)) -> ChargeReport:
    """Degree of the hedgehog's unit field over the sphere of radius ``r``.

    The sign convention treats ``u`` as a coordinate on the Riemann sphere,
    so ``u = zeta^n`` with ``zeta = tan(theta/2) e^(i phi)`` has degree
    ``+n``.  Stereographic projection with ``u = 0`` at the south pole
    reverses the outward orientation of the target sphere, hence the minus
    sign relative to :func:`sphere_degree`.
    """
    if grid[0] < 64 or grid[1] < 64:
        raise ValueError("monopole_degree needs at least a 64x64 grid")
    n = _lattice(unit_field_on_sphere(spec, r), grid)
    edge = _max_edge_angle(n)
    # the solid-angle sum is an integer for any closed lattice; it is the
    # right integer only while neighbouring images stay close
    if edge > MAX_EDGE:
        raise GridTooCoarse(f"neighbouring grid images {edge:.2f} rad apart on a {grid} grid; refine the grid")
    rep = _charge(-_lattice_degree(n))
    if not rep.accepted:
        raise GridTooCoarse(f"degree defect {rep.defect:.3f} >= {ACCEPT_DEFECT} on a {grid} grid")
    return rep
