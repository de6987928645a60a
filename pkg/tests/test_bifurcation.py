import math

import numpy as np
import pytest

from zerohopf import (FamilyMismatch, NoCrossing, averaged_cycle_thm1,
                      classify_zero, closed_form_g, displacement_h4,
                      find_zeros, ls_bifurcation_functions, ns_analyze,
                      predict_theorem1)
from zerohopf.bifurcation import closed_form_f1_h3
from zerohopf.cli import EXAMPLES


@pytest.fixture(scope="module")
def p1():
    return EXAMPLES[1].params()


def test_prediction_report_quantities(p1):
    rep = predict_theorem1(p1)
    assert rep.ell_1 == pytest.approx(-6403.0 * math.pi / 1040.0, rel=1e-12)
    assert rep.mu_hat_1 == pytest.approx(535.0 / 134.0, rel=1e-12)
    assert rep.z2 == -rep.z1
    assert rep.torus_possible
    # the predicted points really are zeros of g1
    for x in [(rep.r0, 0.0), (rep.r1, rep.z1), (rep.r1, rep.z2)]:
        assert np.max(np.abs(closed_form_g("THM1", 1, x, p1))) <= 1e-10


def test_find_zeros_locates_all_three(p1):
    rep = predict_theorem1(p1)
    g = lambda x: closed_form_g("THM1", 1, x, p1)
    res = find_zeros(g, (0.2, 2.5, -1.5, 1.5), grid=(10, 10))
    assert len(res) == 3
    expected = [(rep.r0, 0.0), (rep.r1, rep.z2), (rep.r1, rep.z1)]
    got = sorted((float(z.x[0]), float(z.x[1])) for z in res)
    for (gr, gz), (wr, wz) in zip(got, sorted(expected)):
        assert abs(gr - wr) <= 1e-8 and abs(gz - wz) <= 1e-8
    for zero in res:
        assert zero.is_simple


def test_find_zeros_rejects_nonpositive_radius(p1):
    g = lambda x: closed_form_g("THM1", 1, x, p1)
    with pytest.raises(ValueError):
        find_zeros(g, (-0.5, 2.0, -1.0, 1.0))


def test_classify_zero_verdicts():
    assert classify_zero([-1.0, -2.0]) == "stable node/focus"
    assert classify_zero([1.0, -2.0]) == "saddle"
    assert classify_zero([0.5 + 2j, 0.5 - 2j]) == "unstable"
    assert classify_zero([0.0, 1.0]) == "nonhyperbolic"


def test_prediction_rejects_wrong_family():
    with pytest.raises(FamilyMismatch):
        predict_theorem1(EXAMPLES[2].params())


def test_ns_analyze_branches_agree(p1):
    ns_p = ns_analyze(p1, branch="+")
    ns_m = ns_analyze(p1, branch="-")
    assert ns_p.mu_hat_1 == pytest.approx(ns_m.mu_hat_1, rel=1e-10)
    assert ns_p.ell1 == pytest.approx(ns_m.ell1, rel=1e-8)
    assert ns_p.supercritical == ns_m.supercritical
    with pytest.raises(ValueError):
        ns_analyze(p1, branch="x")


def test_no_averaged_limit_cycle_for_symmetric_example(p1):
    # the truncated averaged flow has no closed orbit around the foci here,
    # so the shooting helper must report that instead of inventing one
    with pytest.raises(NoCrossing):
        averaged_cycle_thm1(p1, branch="+")


def test_ls_reduction_closed_source():
    p = EXAMPLES[4].params()
    red = ls_bifurcation_functions(p, source="closed", eps=1.0 / 150.0)
    for r in (0.3, 1.0, 1.7):
        assert red.f1(r) == pytest.approx(closed_form_f1_h3(r, p), rel=1e-10)
    assert red.z_branch > 0
    assert red.a_eps_closed == pytest.approx(red.a_eps_newton, abs=1e-10)
    assert abs(red.dF2_dr_at_zero) > 0


def test_ls_reduction_rejects_bad_source():
    p = EXAMPLES[4].params()
    with pytest.raises(ValueError):
        ls_bifurcation_functions(p, source="engine")     # missing system
    with pytest.raises(ValueError):
        ls_bifurcation_functions(p, source="symbolic")
    with pytest.raises(FamilyMismatch):
        ls_bifurcation_functions(EXAMPLES[1].params(), source="closed")


def test_h4_displacement_prediction():
    p = EXAMPLES[5].params()
    disp = displacement_h4(p)
    assert disp.base_radius > 0
    assert disp.det_DH1 == pytest.approx(2.0 * math.pi * disp.det_DH1_printed,
                                         rel=1e-9)
    pt = disp.predicted_point(1.0 / 150.0)
    assert pt[1] == 0.0
    assert pt[0] == pytest.approx(disp.base_radius + disp.r_tilde / 150.0,
                                  rel=1e-12)
    with pytest.raises(FamilyMismatch):
        displacement_h4(EXAMPLES[1].params())
