import math
from fractions import Fraction

import numpy as np
import pytest

from zerohopf import (EpsPolynomial, UnknownFamily, check_family, eval_params,
                      get_family, params_from_dict, params_from_json,
                      vector_field)
from zerohopf.coefficients import delta_quantities_thm1
from zerohopf.cli import EXAMPLES


def test_eps_polynomial_evaluation_and_exact_coefficients():
    poly = EpsPolynomial(["1/3", 2, "-1/2"])
    assert poly.coefficient_exact(0) == Fraction(1, 3)
    assert poly.coefficient(2) == -0.5
    assert poly.degree == 2
    eps = 0.1
    assert poly(eps) == pytest.approx(1 / 3 + 2 * eps - 0.5 * eps**2, rel=1e-15)


def test_params_from_dict_preserves_rationals():
    p = EXAMPLES[1].params()
    assert p.coefficient("k", 0) == 67.0 / 50.0
    assert p.coefficient("mu", 1) == pytest.approx(20029.0 / 5025.0, rel=1e-15)
    assert p.omega == 1.0


def test_params_from_json_roundtrip():
    import json
    p, family = params_from_json(json.dumps(EXAMPLES[2].config))
    assert family == "H1"
    assert p.coefficient("nu", 0) == 37.0 / 32.0


def test_vector_field_matches_equations():
    p = EXAMPLES[1].params()
    eps = 0.02
    h, k, a, b, m, n, _w = eval_params(p, eps)
    x = np.array([0.3, -0.2, 0.5])
    want = np.array([-n * (x[0]**3 - m * x[0] - x[1]),
                     -h * x[2] + k * x[0] - a * x[1],
                     b * x[1]])
    assert np.allclose(vector_field(p, eps, x), want, rtol=1e-14)


def test_with_coefficient_is_non_destructive():
    p = EXAMPLES[1].params()
    q = p.with_coefficient("mu", 1, 4.0)
    assert q.coefficient("mu", 1) == 4.0
    assert p.coefficient("mu", 1) != 4.0


@pytest.mark.parametrize("example_id", [1, 2, 3, 4, 5])
def test_fixture_families_pass_membership(example_id):
    fx = EXAMPLES[example_id]
    rep = check_family(fx.params(), fx.family)
    assert rep.relations_pass
    assert rep.is_member


def test_family_check_rejects_wrong_family():
    rep = check_family(EXAMPLES[1].params(), "H1")
    assert not rep.relations_pass


def test_family_aliases_and_unknown_tag():
    assert get_family("III").tag == "THM1"
    assert get_family("I").tag == "H1"
    assert get_family("V").tag == "H4"
    with pytest.raises(UnknownFamily):
        get_family("H9")


def test_delta_signs_for_symmetric_example():
    d = delta_quantities_thm1(EXAMPLES[1].params())
    assert d["delta_a"] > 0 and d["delta_b"] > 0 and d["delta_c"] > 0
    assert d["delta_d"] < 0
