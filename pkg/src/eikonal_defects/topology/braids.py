"""Closing traced strings into a braid over one period in z."""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import List, Sequence

import numpy as np

from ..exceptions import NonCommensurate, NotClosed
from ..field_core import TWO_PI

CLOSE_TOL = 1e-6

# named torus knots and links by unsigned type (p, q), p <= q
_NAMES = {
    (2, 3): "trefoil",
    (2, 5): "cinquefoil",
    (2, 7): "septafoil",
    (3, 4): "8_19",
    (3, 5): "10_124",
    (2, 2): "Hopf link",
    (2, 4): "Solomon link",
}


@dataclass
class BraidClosure:
    """The link obtained by identifying ``z`` and ``z + period``.

    ``q`` is the signed number of ``2 pi / strands`` steps every strand turns
    through, so the closure is the torus link ``T(strands, q)``; a negative
    ``q`` is the mirror image.
    """

    strands: int
    period: float
    permutation: List[int]
    total_rotation: float
    q: int
    link_label: str
    components: int
    name: str

    @property
    def torus_type(self):
        """Unsigned ``(p, q)`` with ``p <= q``; ``T(p, q)`` and ``T(q, p)`` are the same link."""
        return tuple(sorted((self.strands, abs(self.q))))

    @property
    def mirror(self) -> bool:
        return self.q < 0

    def to_dict(self) -> dict:
        return {
            "strands": self.strands,
            "period": self.period,
            "permutation": list(self.permutation),
            "total_rotation": self.total_rotation,
            "q": self.q,
            "link_label": self.link_label,
            "torus_type": list(self.torus_type),
            "components": self.components,
            "name": self.name,
        }


def torus_link_name(p: int, q: int) -> str:
    """Common name of ``T(p, q)`` ignoring orientation and mirroring."""
    p, q = abs(int(p)), abs(int(q))
    if p == 0 or q == 0:
        return "unlink" if max(p, q) > 1 else "unknot"
    if min(p, q) == 1:
        return "unknot"
    key = tuple(sorted((p, q)))
    comps = gcd(p, q)
    if key in _NAMES:
        return _NAMES[key]
    return "torus knot" if comps == 1 else f"torus link ({comps} components)"


def _interp_xy(points: np.ndarray, z: float):
    """Curve position at height ``z`` by interpolating radius and unwrapped angle."""
    zs = points[:, 2]
    if z < zs[0] - 1e-9 or z > zs[-1] + 1e-9:
        raise NotClosed(f"curve covers z in [{zs[0]}, {zs[-1]}], needs z = {z}")
    rho = np.hypot(points[:, 0], points[:, 1])
    phi = np.unwrap(np.arctan2(points[:, 1], points[:, 0]))
    return float(np.interp(z, zs, rho)), float(np.interp(z, zs, phi)), phi[0]


def braid_closure(curves: Sequence, period: float, tol: float = CLOSE_TOL) -> BraidClosure:
    """Identify the strands' ends after one ``period`` and classify the resulting link.

    Each strand's end must land on some strand's start (to ``tol`` relative
    to the strand radius) and every strand must turn by the same angle, an
    integer multiple of ``2 pi / strands``.  Strands on the axis are not
    supported.
    """
    if not curves:
        raise ValueError("no curves to close")
    if not period > 0:
        raise ValueError("period must be positive")
    s = len(curves)
    z0 = max(float(c.points[0, 2]) for c in curves)
    starts, ends, turns, radii = [], [], [], []
    for c in curves:
        pts = np.asarray(c.points, dtype=float)
        if np.any(np.hypot(pts[:, 0], pts[:, 1]) == 0.0):
            raise ValueError("braid closure does not support strands on the axis")
        r0, p0, _ = _interp_xy(pts, z0)
        r1, p1, _ = _interp_xy(pts, z0 + period)
        starts.append(r0 * np.exp(1j * p0))
        ends.append(r1 * np.exp(1j * p1))
        turns.append(p1 - p0)
        radii.append(r0)
    starts, ends = np.array(starts), np.array(ends)
    scale = max(1.0, max(radii))
    d = np.abs(ends[:, None] - starts[None, :])
    perm = [int(j) for j in np.argmin(d, axis=1)]
    if sorted(perm) != list(range(s)):
        raise NotClosed("strand ends do not map one-to-one onto strand starts")
    worst = max(d[i, perm[i]] for i in range(s))
    if worst > tol * scale:
        raise NotClosed(f"strands do not close after period {period}: mismatch {worst:.3e}")
    turns = np.array(turns)
    if np.ptp(turns) > tol * TWO_PI:
        raise NotClosed(f"strands turn by different angles over one period: {turns.tolist()}")
    total = float(turns.mean())
    q_real = total / (TWO_PI / s)
    q = int(np.round(q_real))
    if abs(q_real - q) > tol:
        raise NonCommensurate(f"total rotation {total} is not a multiple of 2 pi / {s} (q = {q_real})")
    comps = gcd(s, abs(q)) if q != 0 else s
    return BraidClosure(
        strands=s,
        period=float(period),
        permutation=perm,
        total_rotation=total,
        q=q,
        link_label=f"T({s},{q})",
        components=comps,
        name=torus_link_name(s, q) if q != 0 else ("unlink" if s > 1 else "unknot"),
    )
