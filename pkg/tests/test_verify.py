import math

import numpy as np
import pytest

from zerohopf import (Diverged, IntegratorConfig, detect_torus,
                      floquet_prediction, integrate, poincare_return,
                      refine_periodic_orbit, section_for, section_seed)
from zerohopf.cli import EXAMPLES, predicted_zeros


@pytest.fixture(scope="module")
def ex2_orbit():
    fx = EXAMPLES[2]
    p, eps = fx.params(), fx.eps_value()
    section = section_for(p, fx.family)
    zero = predicted_zeros(p, fx.family, eps)[0]
    orbit = refine_periodic_orbit(p, eps, section_seed(eps, zero), section)
    return p, eps, section, orbit


def test_section_roundtrip():
    p = EXAMPLES[1].params()
    section = section_for(p, "THM1")
    q = np.array([0.21, -0.07])
    assert np.allclose(section.coords(section.to_3d(q)), q, atol=1e-13)
    x3 = section.to_3d(q)
    assert abs(section.Linv[1] @ x3) < 1e-13     # lies on {Y = 0}


def test_section_seed_scaling():
    q = section_seed(0.04, (1.5, -0.5))
    assert np.allclose(q, [0.2 * 1.5, -0.2 * 0.5])


def test_poincare_return_composes(ex2_orbit):
    p, eps, section, orbit = ex2_orbit
    q0 = orbit.section_point * np.array([1.02, 1.0])
    two = poincare_return(p, eps, section, q0, 2)
    one = poincare_return(p, eps, section, q0, 1)
    again = poincare_return(p, eps, section, one[0][0], 1)
    assert np.max(np.abs(two[1][0] - again[0][0])) <= 1e-8
    assert two[0][1] < two[1][1]                 # return times accumulate
    with pytest.raises(ValueError):
        poincare_return(p, eps, section, q0, 0)


def test_refined_orbit_is_fixed_point(ex2_orbit):
    p, eps, section, orbit = ex2_orbit
    assert orbit.residual <= 1e-9
    assert orbit.stability == "stable"
    (q1, t1), = poincare_return(p, eps, section, orbit.section_point, 1)
    assert np.max(np.abs(q1 - orbit.section_point)) <= 1e-8
    assert orbit.period == pytest.approx(t1, rel=1e-6)


def test_floquet_prediction_formula():
    eigs = np.array([0.5 + 2.0j, 0.5 - 2.0j])
    out = floquet_prediction(eigs, 0.01, 2.0)
    assert np.allclose(out, np.exp(0.01 * eigs / 2.0))


def test_detect_torus_never_claims_torus_at_fixed_point(ex2_orbit):
    p, eps, section, orbit = ex2_orbit
    ev = detect_torus(p, eps, orbit.section_point, 10, 20, section,
                      center=orbit.section_point)
    assert ev.verdict != "torus"


def test_integrate_flags_divergence():
    p = EXAMPLES[1].params()
    with pytest.raises(Diverged):
        integrate(p, 1.0 / 70.0, np.array([40.0, 10.0, 5.0]), 50.0)
    with pytest.raises(ValueError):
        integrate(p, 1.0 / 70.0, np.array([0.1, 0.0, 0.1]), -1.0)


def test_integrator_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(rtol=-1e-9)
    cfg = IntegratorConfig(rtol=1e-8, atol=1e-10)
    assert cfg.escape_radius == 50.0
