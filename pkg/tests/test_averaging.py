import numpy as np
import pytest

from zerohopf import (NotTabulated, OrderUnavailable, averaged,
                      averaged_series, closed_form_g, standardize)
from zerohopf.cli import EXAMPLES

POINTS = [(0.6, -0.4), (1.3, 0.2), (2.1, 0.7)]


@pytest.mark.parametrize("example_id,family", [(1, "THM1"), (2, "H1"), (3, "H2")])
def test_engine_order1_matches_closed_form(example_id, family):
    p = EXAMPLES[example_id].params()
    g = averaged(standardize(p, family), 1)
    for x in POINTS:
        want = closed_form_g(family, 1, x, p)
        assert np.allclose(g(x), want, rtol=1e-9, atol=1e-9)


def test_engine_high_orders_match_closed_form_h3():
    p = EXAMPLES[4].params()
    sys_form = standardize(p, "H3")
    for x in [(0.8, 0.5), (1.5, -0.3)]:
        series = averaged_series(sys_form, x, 4)
        for order in (2, 3, 4):
            want = closed_form_g("H3", order, x, p)
            got = series[order - 1]
            assert np.allclose(got, want, rtol=1e-6, atol=1e-6), (order, x)


def test_engine_order2_matches_closed_form_h4():
    p = EXAMPLES[5].params()
    sys_form = standardize(p, "H4")
    for x in POINTS:
        want = closed_form_g("H4", 2, x, p)
        got = averaged_series(sys_form, x, 2)[1]
        assert np.allclose(got, want, rtol=1e-7, atol=1e-8), x


def test_series_is_consistent_with_single_order_calls():
    p = EXAMPLES[1].params()
    sys_form = standardize(p, "THM1")
    g2 = averaged(sys_form, 2)
    series = g2.series((1.2, 0.3))
    assert len(series) == 2
    assert np.allclose(series[1], g2((1.2, 0.3)), rtol=1e-12)


def test_closed_form_rejects_untabulated_pairs():
    p = EXAMPLES[2].params()
    with pytest.raises(NotTabulated):
        closed_form_g("H1", 3, (1.0, 0.0), p)


def test_order_beyond_truncation_is_rejected():
    p = EXAMPLES[1].params()
    sys_form = standardize(p, "THM1")
    with pytest.raises(OrderUnavailable):
        averaged(sys_form, sys_form.order + 1)


def test_jacobian_matches_closed_form_derivative():
    p = EXAMPLES[1].params()
    g = averaged(standardize(p, "THM1"), 1)
    x = np.array([1.1, 0.25])
    J = g.jacobian(x, step=1e-5)
    h = 1e-5
    Jref = np.empty((2, 2))
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        Jref[:, j] = (closed_form_g("THM1", 1, x + e, p)
                      - closed_form_g("THM1", 1, x - e, p)) / (2 * h)
    assert np.allclose(J, Jref, rtol=1e-4, atol=1e-4)
