"""Topological diagnostics: charges, string loci and braid closures."""
from .braids import BraidClosure, braid_closure, torus_link_name
from .charges import (
    ChargeReport,
    dominance_radius,
    monopole_degree,
    sphere_degree,
    unit_field_on_sphere,
    winding_number,
)
from .loci import (
    StringCurve,
    StringPrediction,
    elliptic_string_points,
    locate_strings,
    match_zeros,
    newton_zero,
    predict_strings,
    predict_strings_N1,
    predict_strings_N2,
    string_position_vector,
    trace_string_curves,
)

__all__ = [
    "BraidClosure",
    "ChargeReport",
    "StringCurve",
    "StringPrediction",
    "braid_closure",
    "dominance_radius",
    "elliptic_string_points",
    "locate_strings",
    "match_zeros",
    "monopole_degree",
    "newton_zero",
    "predict_strings",
    "predict_strings_N1",
    "predict_strings_N2",
    "sphere_degree",
    "string_position_vector",
    "torus_link_name",
    "trace_string_curves",
    "unit_field_on_sphere",
    "winding_number",
]
