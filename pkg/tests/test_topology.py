import numpy as np
import pytest

from eikonal_defects.exceptions import (
    BranchCollision,
    GridTooCoarse,
    NoRoot,
    NonCommensurate,
    NotClosed,
    PhaseJump,
    ZeroOnContour,
)
from eikonal_defects.field_core import cartesian_to_elliptic
from eikonal_defects.solutions import HedgehogSpec, make_cyl_string, make_elliptic, make_hedgehog
from eikonal_defects.special_functions import ellip_E
from eikonal_defects.topology import (
    StringCurve,
    braid_closure,
    locate_strings,
    match_zeros,
    monopole_degree,
    predict_strings,
    predict_strings_N1,
    predict_strings_N2,
    sphere_degree,
    string_position_vector,
    torus_link_name,
    trace_string_curves,
    winding_number,
)

# brentq at 50 digits (mpmath), frozen
RHO0_N1 = 1.32548683869836316195
RHO0_N2 = 1.67650858514133091426


@pytest.fixture
def two_strand():
    return make_cyl_string([(1, 2, 1)], c=1)


def test_winding_far_field(two_strand):
    rep = winding_number(two_strand)
    assert rep.index == 2 and rep.defect < 1e-9 and rep.accepted
    assert winding_number(make_cyl_string([(1, 3, 0.3), (2, 1, 0.1)], c=0.5)).index == 3


def test_winding_small_contours(two_strand):
    pred = predict_strings_N1(2, 1, 1.0)
    x, y, _ = pred.points(0.0)[0]
    assert winding_number(two_strand, radius=0.05, center=(x, y)).index == 1
    # a contour enclosing no string
    assert winding_number(two_strand, radius=0.05, center=(0.3, 0.0)).index == 0


def test_winding_guards(two_strand):
    with pytest.raises(ValueError):
        winding_number(two_strand, samples=16)
    with pytest.raises(ZeroOnContour):
        winding_number(two_strand, radius=RHO0_N1, samples=256)
    spec = make_cyl_string([(1, 1, 1)], c=1)
    x0 = predict_strings_N1(1, 1, 1.0).rho0
    # contour skimming a string with few samples
    with pytest.raises(PhaseJump):
        winding_number(spec, radius=x0 + 1e-4, samples=16)
    with pytest.raises(ValueError):
        winding_number(make_hedgehog([(1, 1)]))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_monopole_degree(n):
    rep = monopole_degree(make_hedgehog([(1, n)]), r=1.3)
    assert rep.index == n and rep.defect < 1e-6


def test_monopole_degree_multi_and_decaying():
    assert monopole_degree(make_hedgehog([(1, 2), (0.5, 1)], c=0.2)).index == 2
    # zeta^-1 is a rotation of the Riemann sphere, so the degree stays +1
    assert monopole_degree(make_hedgehog([(1, 1)], sign=-1)).index == 1


class Conjugated(HedgehogSpec):
    def _value(self, xyz):
        return np.conj(super()._value(xyz))


def test_conjugate_field_reverses_degree():
    assert monopole_degree(Conjugated(((1, 1),))).index == -1


def test_monopole_grid_checks():
    with pytest.raises(ValueError):
        monopole_degree(make_hedgehog([(1, 1)]), grid=(32, 32))
    with pytest.raises(GridTooCoarse):
        monopole_degree(make_hedgehog([(1, 60)]), grid=(64, 64))


def test_sphere_degree_identity_map():
    def ident(theta, phi):
        return np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1)

    assert sphere_degree(ident, (64, 64)) == pytest.approx(1.0, abs=1e-12)


def test_n1_prediction_frozen():
    pred = predict_strings_N1(2, 1, 1.0)
    assert pred.rho0 == pytest.approx(RHO0_N1, abs=1e-13)
    assert np.allclose(pred.phi(0.0), [np.pi / 2, 3 * np.pi / 2])
    with pytest.raises(NoRoot):
        predict_strings_N1(2, 1, 0.0)


def test_n2_prediction_frozen():
    pred = predict_strings_N2(2, 2, 1, 1)
    assert pred.rho0 == pytest.approx(RHO0_N2, abs=1e-13)
    assert pred.central_charge == 1 and pred.count == 1
    assert predict_strings_N2(1, 1, 2, 2).rho0 == pred.rho0


@pytest.mark.parametrize("z", [0.0, 1.0, 2.0])
def test_located_zeros_match_prediction(two_strand, z):
    found = locate_strings(two_strand, z)
    assert len(found) == 2
    assert match_zeros(found, predict_strings(two_strand, z)) < 1e-8


@pytest.mark.parametrize("n1,n2", [(2, 1), (3, 1), (3, 2)])
def test_two_component_loci_and_charges(n1, n2):
    r = 0.5
    spec = make_cyl_string([(1, n1, r * n1), (1, n2, r * n2)])
    found = locate_strings(spec, 0.0)
    pred = predict_strings(spec, 0.0)
    assert len(found) == 1 + (n1 - n2)
    assert match_zeros(found, pred) < 1e-6
    axis = [f for f in found if f[0] == 0.0]
    assert len(axis) == 1
    assert winding_number(spec, radius=0.05).index == min(n1, n2)
    for rho, phi in found:
        if rho > 0:
            c = (rho * np.cos(phi), rho * np.sin(phi))
            assert winding_number(spec, radius=0.05, center=c).index == 1
    assert winding_number(spec).index == max(n1, n2)


def test_locate_rejects_complex_offset():
    with pytest.raises(ValueError):
        locate_strings(make_cyl_string([(1, 2, 1)], c=1j))


def test_trace_constant_radius(two_strand):
    curves = trace_string_curves(two_strand, 0.0, 4 * np.pi, 0.1)
    assert [c.branch for c in curves] == [0, 1]
    for c in curves:
        assert np.ptp(c.rho) < 1e-8
        assert np.max(np.diff(c.points[:, 2])) <= 0.1 + 1e-12
        assert np.max(np.abs(two_strand(c.points))) < 1e-10
        # n phi + k z = pi + 2 pi l, with phi known mod 2 pi
        d = np.mod(2 * c.phi_unwrapped + c.points[:, 2] - np.pi - 2 * np.pi * c.branch, 4 * np.pi)
        assert np.max(np.minimum(d, 4 * np.pi - d)) < 1e-8


def test_trace_detects_undersampling(two_strand):
    with pytest.raises(BranchCollision):
        trace_string_curves(two_strand, 0.0, 6.0, 3.0)


def test_elliptic_strings():
    spec = make_elliptic(n=2)
    eta0 = spec.string_eta()
    curves = trace_string_curves(spec, 0.0, 2.0, 0.1)
    assert len(curves) == 2
    for c in curves:
        eta, phi, z = cartesian_to_elliptic(c.points, spec.a)
        assert np.max(np.abs(eta - eta0)) < 1e-8
        line = spec.k * z + spec.L * ellip_E(phi, spec.m) - spec.string_phase_offset()
        assert np.max(np.abs(np.sin(line / 2))) < 1e-6


def test_closure_trefoil(two_strand):
    curves = trace_string_curves(two_strand, 0.0, 6 * np.pi, 0.05)
    bc = braid_closure(curves, 6 * np.pi)
    assert (bc.strands, bc.q, bc.link_label) == (2, -3, "T(2,-3)")
    assert bc.torus_type == (2, 3) and bc.name == "trefoil" and bc.components == 1
    assert bc.permutation == [1, 0]


def test_closure_hopf_and_three_strands(two_strand):
    bc = braid_closure(trace_string_curves(two_strand, 0.0, 4 * np.pi, 0.05), 4 * np.pi)
    assert bc.link_label == "T(2,-2)" and bc.name == "Hopf link" and bc.components == 2
    spec = make_cyl_string([(1, 3, 2 / 3)], c=1)
    bc = braid_closure(trace_string_curves(spec, 0.0, 6 * np.pi, 0.05), 6 * np.pi)
    assert (bc.strands, bc.q) == (3, -2) and bc.name == "trefoil"


def test_closure_errors(two_strand):
    curves = trace_string_curves(two_strand, 0.0, 5.0, 0.05)
    with pytest.raises(NotClosed):
        braid_closure(curves, 5.0)
    with pytest.raises(NotClosed):
        braid_closure(curves, 10.0)
    # ends land within tolerance but the rotation is not a multiple of pi
    z = np.linspace(0, 1, 11)
    eps = 1e-4
    strands = [
        StringCurve(l, np.stack([1e-3 * np.cos(l * np.pi + (np.pi + eps) * z), 1e-3 * np.sin(l * np.pi + (np.pi + eps) * z), z], axis=-1))
        for l in range(2)
    ]
    with pytest.raises(NonCommensurate):
        braid_closure(strands, 1.0)


def test_link_names():
    assert torus_link_name(3, 2) == "trefoil"
    assert torus_link_name(2, -2) == "Hopf link"
    assert torus_link_name(2, 1) == "unknot"
    assert torus_link_name(3, 7) == "torus knot"
    assert torus_link_name(3, 6) == "torus link (3 components)"


def test_string_position_vector(two_strand):
    n_inf, n_string = string_position_vector(two_strand)
    assert np.allclose(n_inf, [0, 0, 1])
    assert np.allclose(n_string, [0, 0, -1], atol=1e-9)
