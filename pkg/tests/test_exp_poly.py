import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torushom.exp_poly import (ExpPoly, GradedSeries, binomial_poly, eval_exact, eval_float,
                               formal_exp, formal_log, from_json, render, to_json)

from strategies import exp_polys, small_frac


def test_canonical_form_drops_zero_and_base_zero():
    x = ExpPoly([(1, 0, 0), (0, 2, 3), (2, 1, Fraction(1, 2)), (-2, 1, Fraction(1, 2))])
    assert x.is_zero()
    assert x == ExpPoly.zero()


def test_like_terms_merge():
    x = ExpPoly([(1, 2, 2), (3, 2, 2)])
    assert x.terms == [(Fraction(4), 2, Fraction(2))]


def test_negative_exponent_rejected():
    with pytest.raises(ValueError):
        ExpPoly([(1, -1, 1)])


def test_render_and_json():
    x = ExpPoly([(Fraction(3, 4), 0, Fraction(4, 3)), (Fraction(1, 3), 0, 1)])
    assert render(x) == "1/3 * n^0 * (1/1)^n + 3/4 * n^0 * (4/3)^n"
    assert to_json(x)[1] == {"coeff": "3/4", "npow": 0, "base": "4/3"}
    assert from_json(to_json(x)) == x


def test_binomial_poly_matches_comb():
    for a in range(5):
        for n in range(8):
            assert eval_exact(binomial_poly(a), n) == math.comb(n, a)


def test_eval_at_zero_uses_zero_power_one():
    x = ExpPoly([(5, 0, 3), (7, 2, 2)])
    assert x(0) == 5


@given(exp_polys(), exp_polys(), exp_polys())
def test_ring_axioms(x, y, z):
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == ExpPoly.zero()
    assert x * ExpPoly.const(1) == x


@given(exp_polys(), exp_polys(), st.integers(0, 12))
def test_evaluation_is_a_ring_map(x, y, n):
    assert (x + y)(n) == x(n) + y(n)
    assert (x * y)(n) == x(n) * y(n)


@given(exp_polys())
def test_json_round_trip(x):
    assert from_json(to_json(x)) == x
    assert hash(from_json(to_json(x))) == hash(x)


@given(exp_polys(), st.integers(0, 40))
def test_float_eval_within_bound(x, n):
    exact = x(n)
    fv = eval_float(x, n)
    if exact == 0:
        assert fv.value == 0.0
    else:
        assert abs(Fraction(fv.value) - exact) <= fv.rel_err * abs(exact) + Fraction(fv.abs_err)


def test_float_eval_log_survives_overflow():
    x = ExpPoly.monomial(1, 0, 10 ** 6)
    fv = eval_float(x, 100)
    assert math.isinf(fv.value)
    assert fv.log_abs == pytest.approx(600 * math.log(10))


def test_high_precision_path():
    x = ExpPoly.monomial(Fraction(1, 3))
    fv = eval_float(x, 0, rel_tol=1e-30)
    assert fv.value == pytest.approx(1 / 3, rel=1e-15)


def test_formal_log_of_geometric():
    # log(1/(1-e)) = sum e^k / k
    s = GradedSeries([1] * 6)
    assert list(formal_log(s).coeffs) == [0] + [Fraction(1, k) for k in range(1, 6)]


def test_formal_log_needs_unit_constant():
    with pytest.raises(ValueError):
        formal_log(GradedSeries([2, 1]))


@given(st.lists(small_frac, min_size=1, max_size=6))
def test_log_exp_inverse(tail):
    s = GradedSeries([0] + tail)
    assert formal_log(formal_exp(s)) == s
