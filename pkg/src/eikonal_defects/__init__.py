"""Closed-form string and hedgehog solutions of the complex eikonal equation.

Evaluation of the solution families, residual checks of the PDE identities
they satisfy, and topological diagnostics (charges, string loci, braids).
"""
from . import residuals, special_functions, topology
from .exceptions import *  # noqa: F401,F403
from .field_core import Point3, fd_gradient, fd_laplacian, stereographic_project
from .solutions import (
    CompositeSpec,
    CylStringSpec,
    EllipticStringSpec,
    HedgehogSpec,
    MassiveCylSpec,
    SolutionSpec,
    compose,
    evaluate,
    make_cyl_string,
    make_elliptic,
    make_hedgehog,
    make_massive,
    solve_elliptic_lambda,
)

__version__ = "0.1.0"
