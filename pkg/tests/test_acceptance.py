"""End-to-end acceptance checks: every headline quantity and verdict of the
toolkit, at its stated tolerance and runtime budget."""

import math
import time

import numpy as np
import pytest

from zerohopf import (averaged, closed_form_f1_h3, closed_form_g,
                      floquet_prediction, ls_bifurcation_functions,
                      mirror_section_point, mirror_section_seed, ns_analyze,
                      predict_theorem1, refine_periodic_orbit, section_for,
                      section_seed, standardize)
from zerohopf.bifurcation import _fd_jacobian4, newton_2d
from zerohopf.cli import (EXAMPLES, SweepSpec, find_torus_flip,
                          predicted_zeros, run_example, sweep)
from zerohopf.verify import IntegratorConfig

ELL1_EXPECTED = -6403.0 * math.pi / 1040.0
MU_HAT_EXPECTED = 535.0 / 134.0


# ---------------------------------------------------------------------------
# 1. first Lyapunov coefficient
# ---------------------------------------------------------------------------

def test_lyapunov_coefficient_reproduction(ex1):
    p, _eps, _fx = ex1
    t0 = time.perf_counter()
    rep = predict_theorem1(p)
    ns = ns_analyze(p, branch="+")
    elapsed = time.perf_counter() - t0
    assert abs(rep.ell_1 - ELL1_EXPECTED) <= 1e-6 * abs(ELL1_EXPECTED)
    assert abs(ns.ell1 - ELL1_EXPECTED) <= 1e-6 * abs(ELL1_EXPECTED)
    assert elapsed < 5.0


# ---------------------------------------------------------------------------
# 2. averaging engine vs closed form
# ---------------------------------------------------------------------------

def test_engine_matches_closed_form_on_grid(ex1):
    p, _eps, _fx = ex1
    t0 = time.perf_counter()
    g = averaged(standardize(p, "THM1"), 1)
    worst = 0.0
    for r in np.linspace(0.5, 2.5, 5):
        for z in np.linspace(-0.8, 0.8, 5):
            want = closed_form_g("THM1", 1, (r, z), p)
            got = g((r, z))
            worst = max(worst, float(np.max(np.abs(got - want)
                                            / (1.0 + np.abs(want)))))
    elapsed = time.perf_counter() - t0
    assert worst <= 1e-8
    assert elapsed < 10.0


# ---------------------------------------------------------------------------
# 3. three orbits: residuals, stability types, odd symmetry
# ---------------------------------------------------------------------------

def test_three_orbit_verification(ex1, ex1_orbits):
    p, eps, _fx = ex1
    orbits = ex1_orbits["orbits"]
    section = ex1_orbits["section"]
    assert len(orbits) == 3
    for orbit in orbits:
        assert orbit.residual <= 1e-9
    central, plus, minus = orbits
    mods = np.abs(central.multipliers)
    assert mods.min() < 1.0 < mods.max()          # saddle
    assert central.stability == "saddle"
    for orbit in (plus, minus):
        assert np.max(np.abs(orbit.multipliers)) > 1.0
        assert orbit.stability == "unstable"
    mapped = mirror_section_point(p, eps, plus, section)
    assert np.max(np.abs(mapped - minus.section_point)) <= 1e-8
    assert ex1_orbits["elapsed"] < 60.0


# ---------------------------------------------------------------------------
# 4. invariant tori on both symmetric branches
# ---------------------------------------------------------------------------

def test_torus_detection_both_branches(ex1_tori):
    evidence = ex1_tori["evidence"]
    for idx in (1, 2):
        ev = evidence[idx]
        assert ev.verdict == "torus"
        assert ev.max_deviation <= 2e-3
        assert ev.transient == 500 and ev.samples == 500
    assert ex1_tori["elapsed"] < 300.0


def test_torus_clouds_are_mirror_images(ex1, ex1_tori):
    p, eps, _fx = ex1
    evidence = ex1_tori["evidence"]
    ev_p, ev_m = evidence[1], evidence[2]
    cen_p = ev_p.iterates.mean(axis=0)
    cen_m = ev_m.iterates.mean(axis=0)
    # centroids agree under the section mirror (X, Z) -> (X, -Z)
    assert np.max(np.abs(cen_p - cen_m * np.array([1.0, -1.0]))) <= 5e-3
    # samples mapped through the exact sign-flip symmetry land on the
    # other branch's curve
    section = section_for(p, "THM1")
    cfg = IntegratorConfig(rtol=1e-10, atol=1e-12)
    worst = 0.0
    for q in ev_m.iterates[::25]:
        mapped = mirror_section_seed(p, eps, q, section, cfg)
        dist = float(np.min(np.hypot(*(ev_p.iterates - mapped).T)))
        worst = max(worst, dist)
    assert worst <= 2.5e-2 * ev_p.mean_radius


# ---------------------------------------------------------------------------
# 5. the four non-symmetric examples: one stable orbit each
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("example_id", [2, 3, 4, 5])
def test_h_family_examples_produce_stable_orbit(example_id):
    t0 = time.perf_counter()
    report = run_example(example_id)
    elapsed = time.perf_counter() - t0
    assert report["status"] == "ok"
    assert len(report["orbits"]) == 1
    orbit = report["orbits"][0]
    assert orbit["residual"] <= 1e-9
    mods = [abs(complex(m["re"], m["im"])) if isinstance(m, dict) else abs(m)
            for m in orbit["multipliers"]]
    assert all(mod < 1.0 for mod in mods)
    assert elapsed < 60.0


# ---------------------------------------------------------------------------
# 6. Floquet multipliers vs averaged-Jacobian prediction across eps
# ---------------------------------------------------------------------------

def test_multiplier_prediction_scales_quadratically(ex1):
    p, _eps, _fx = ex1
    g = averaged(standardize(p, "THM1"), 1)
    zeros = predicted_zeros(p, "THM1", 0.01)
    eig_sets = []
    for z in zeros:
        x = newton_2d(g, z, tol=1e-12)
        assert x is not None
        eig_sets.append(np.linalg.eigvals(_fd_jacobian4(g, x, step=1e-3)))

    eps_levels = [1.0 / 200.0, 1.0 / 140.0, 1.0 / 70.0]
    errs = []
    for eps in eps_levels:
        section = section_for(p, "THM1")
        worst = 0.0
        for z, eigs in zip(zeros, eig_sets):
            orbit = refine_periodic_orbit(p, eps, section_seed(eps, z), section)
            pred = floquet_prediction(eigs, eps, p.omega)
            for m in orbit.multipliers:
                worst = max(worst, float(np.min(np.abs(pred - m))))
        errs.append(worst)

    cs = [err / eps**2 for err, eps in zip(errs, eps_levels)]
    print(f"prediction errors {errs}; fitted C = err/eps^2: {cs}")
    # error grows with eps, at least quadratically, with a stable constant
    assert errs[0] < errs[1] < errs[2]
    for c in cs:
        assert c < 60.0
    for i in (0, 1):
        assert errs[i] / errs[i + 1] <= 0.7


# ---------------------------------------------------------------------------
# 7. Lyapunov-Schmidt pipeline on example 4
# ---------------------------------------------------------------------------

def test_ls_engine_f1_matches_closed_form():
    fx = EXAMPLES[4]
    p = fx.params()
    red_engine = ls_bifurcation_functions(p, source="engine",
                                          sys=standardize(p, "H3"))
    for r in np.linspace(0.1, 2.0, 6):
        want = closed_form_f1_h3(r, p)
        assert abs(red_engine.f1(r) - want) <= 1e-6 * abs(want)


def test_ls_branch_point_closed_vs_newton():
    fx = EXAMPLES[4]
    red = ls_bifurcation_functions(fx.params(), source="closed", eps=1.0 / 150.0)
    assert abs(red.a_eps_closed - red.a_eps_newton) <= 1e-10


# ---------------------------------------------------------------------------
# 8. transversality of the eigenvalue crossing
# ---------------------------------------------------------------------------

def test_transversality_and_crossing_location(ex1):
    p, _eps, _fx = ex1
    ns = ns_analyze(p, branch="+")
    want = -p.coefficient("nu", 0) / (5.0 * p.omega)
    assert abs(ns.alpha_prime - want) <= 1e-6 * abs(want)
    assert abs(ns.mu_hat_1 - MU_HAT_EXPECTED) <= 1e-8


# ---------------------------------------------------------------------------
# 9. torus-birth abscissa: single flip, converging toward the crossing
# ---------------------------------------------------------------------------

def test_torus_verdict_flips_exactly_once(ex1):
    p, eps, _fx = ex1
    rows = sweep(SweepSpec(symbol="mu1", lo=MU_HAT_EXPECTED - 0.06,
                           hi=MU_HAT_EXPECTED + 0.03, count=6,
                           analysis="torus"),
                 p, "THM1", eps=eps)
    assert all(row["error"] == "" for row in rows)
    verdicts = [row["is_torus"] for row in rows]
    flips = sum(1 for a, b in zip(verdicts, verdicts[1:]) if a != b)
    assert flips == 1
    assert verdicts[0] is True and verdicts[-1] is False


def test_flip_abscissa_converges_to_crossing(ex1):
    p, _eps, _fx = ex1
    lo, hi = MU_HAT_EXPECTED - 0.2, MU_HAT_EXPECTED + 0.05
    errors = []
    for eps in (1.0 / 70.0, 1.0 / 140.0, 1.0 / 200.0):
        flip = find_torus_flip(p, eps, lo, hi)
        errors.append(abs(flip - MU_HAT_EXPECTED))
    print(f"flip errors by decreasing eps: {errors}")
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 5e-3
