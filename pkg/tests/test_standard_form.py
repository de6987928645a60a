import math

import numpy as np
import pytest

from zerohopf import (FamilyMismatch, closed_form_F1_iii, eval_params,
                      jordan_change, standardize)
from zerohopf.cli import EXAMPLES

TWO_PI = 2.0 * math.pi


def _linear_matrix(p):
    h, k, a, b, m, n, _w = eval_params(p, 0.0)
    return np.array([[n * m, n, 0.0], [k, -a, -h], [0.0, b, 0.0]])


@pytest.mark.parametrize("example_id", [1, 2, 3, 4, 5])
def test_jordan_change_diagonalizes_linear_part(example_id):
    fx = EXAMPLES[example_id]
    p = fx.params()
    L = jordan_change(p, fx.family)
    A = _linear_matrix(p)
    w = p.omega
    J = np.array([[0.0, -w, 0.0], [w, 0.0, 0.0], [0.0, 0.0, 0.0]])
    assert np.allclose(np.linalg.solve(L, A @ L), J, atol=1e-12)


def test_extracted_F1_matches_closed_form():
    p = EXAMPLES[1].params()
    sys_form = standardize(p, "THM1")
    worst = 0.0
    for th in np.linspace(0.0, TWO_PI, 7):
        for r in (0.5, 1.2, 2.0):
            for z in (-0.7, 0.0, 0.4):
                want = closed_form_F1_iii(th, r, z, p)
                got = sys_form.F1(th, r, z)
                worst = max(worst, float(np.max(np.abs(got - want))))
    assert worst <= 1e-8


def test_standard_form_is_periodic_in_theta():
    p = EXAMPLES[2].params()
    sys_form = standardize(p, "H1")
    F0 = sys_form.F(0.0, 1.1, 0.3, 2)
    F1 = sys_form.F(TWO_PI, 1.1, 0.3, 2)
    assert np.allclose(F0, F1, atol=1e-10)


def test_standardize_rejects_wrong_family():
    with pytest.raises(FamilyMismatch):
        standardize(EXAMPLES[1].params(), "H3")
