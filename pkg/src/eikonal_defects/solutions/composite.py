"""Real polynomial functions of another solution, ``u = F(u0)``."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from ..exceptions import ConstraintViolation
from .base import Solution


@dataclass(frozen=True)
class CompositeSpec(Solution):
    """``F(base)`` with ``F(u) = sum_i coeffs[i] u^i`` (real coefficients, lowest first).

    ``(grad F(u0))^2 = F'(u0)^2 (grad u0)^2``, so compositions of massless
    solutions stay massless solutions.
    """

    base: Solution
    coeffs: Tuple[float, ...]
    family = "composite"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(a) for a in self.coeffs))

    @property
    def box_system(self):
        return self.base.box_system

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def validate(self):
        self.base.validate()
        if self.degree < 1 or self.coeffs[-1] == 0.0:
            raise ConstraintViolation(
                f"composite needs a polynomial of degree >= 1 with nonzero leading coefficient, got {self.coeffs}"
            )

    @property
    def max_winding(self) -> int:
        return self.degree * self.base.max_winding

    def _pole_mask(self, xyz):
        return self.base._pole_mask(xyz)

    def _value(self, xyz):
        return P.polyval(self.base._value(xyz), self.coeffs)

    def _gradient(self, xyz):
        u0 = self.base._value(xyz)
        d1 = P.polyval(u0, P.polyder(self.coeffs))
        return d1[..., None] * self.base._gradient(xyz)

    @property
    def _laplacian(self):
        if not self.base.has_analytic_laplacian:
            return None

        def lap(xyz):
            u0 = self.base._value(xyz)
            g0 = self.base._gradient(xyz)
            d1 = P.polyval(u0, P.polyder(self.coeffs))
            d2 = P.polyval(u0, P.polyder(self.coeffs, 2)) if self.degree >= 2 else 0.0
            return d2 * np.sum(g0 * g0, axis=-1) + d1 * self.base._laplacian(xyz)

        return lap

    def default_box(self):
        return self.base.default_box()

    def fd_length(self, xyz):
        return self.base.fd_length(xyz)


def compose(base: Solution, coeffs) -> CompositeSpec:
    """Validated composition ``F(base)``; ``coeffs`` are ``a_0 .. a_d``."""
    spec = CompositeSpec(base, tuple(coeffs))
    spec.validate()
    return spec
