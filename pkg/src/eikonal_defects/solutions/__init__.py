"""Closed-form solution families of the complex eikonal equation."""
from .base import Solution, evaluate
from .composite import CompositeSpec, compose
from .cylindrical import (
    CylComponent,
    CylStringSpec,
    MassiveCylSpec,
    log_radial_factor,
    make_cyl_string,
    make_massive,
    radial_factor,
)
from .elliptic import (
    EllipticStringSpec,
    make_elliptic,
    quantization_lhs,
    solve_elliptic_lambda,
)
from .spherical import HedgehogSpec, SphComponent, make_hedgehog, theta_profile_log

SolutionSpec = Solution

__all__ = [
    "Solution",
    "SolutionSpec",
    "evaluate",
    "CylComponent",
    "CylStringSpec",
    "MassiveCylSpec",
    "EllipticStringSpec",
    "HedgehogSpec",
    "SphComponent",
    "CompositeSpec",
    "make_cyl_string",
    "make_massive",
    "make_elliptic",
    "make_hedgehog",
    "compose",
    "solve_elliptic_lambda",
    "quantization_lhs",
    "radial_factor",
    "log_radial_factor",
    "theta_profile_log",
]
