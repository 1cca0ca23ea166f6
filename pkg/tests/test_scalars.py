import math
from fractions import Fraction

import pytest
from conftest import fractions, lambda_scalars, scalars
from hypothesis import given, strategies as st

from hermig.scalars import (
    LambdaScalar,
    Scalar,
    a_nkr,
    binomial,
    binomial_series,
    c_nkq,
    constants,
    double_factorial,
    omega,
    one_minus_lam_x_power,
    series_mul,
)
from hermig.serialize import scalar_from_json, scalar_to_json


def test_omega_small_values():
    assert omega(0) == 1
    assert omega(2) == Scalar.pi(1)
    assert omega(3) == Scalar.pi(1, Fraction(4, 3))


@pytest.mark.parametrize("k", range(0, 21))
def test_omega_matches_gamma_function(k):
    expected = math.pi ** (k / 2) / math.gamma(k / 2 + 1)
    assert omega(k).evaluate() == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("k", range(0, 21))
def test_omega_pi_exponent(k):
    assert set(omega(k).terms) == {k // 2}


def test_double_factorial():
    assert double_factorial(-1) == 1
    assert double_factorial(0) == 1
    for n in range(1, 16):
        assert double_factorial(n) == math.prod(range(n, 0, -2))
    with pytest.raises(ValueError):
        double_factorial(-2)


def test_binomial_out_of_range_is_zero():
    assert binomial(3, 5) == 0
    assert binomial(3, -1) == 0
    assert binomial(-1, 0) == 0
    assert all(binomial(n, k) == math.comb(n, k) for n in range(12) for k in range(n + 1))


def test_a_nkr_two_dimensional_value():
    assert a_nkr(1, 1, 0) == Scalar.pi(-1, 2)


@pytest.mark.parametrize("n", range(1, 6))
def test_a_nkr_against_float_formula(n):
    def df(m):
        return math.prod(range(m, 0, -2)) if m > 0 else 1

    def w(k):
        return math.pi ** (k / 2) / math.gamma(k / 2 + 1)

    for k in range(2 * n + 1):
        for r in range(min(k, 2 * n - k) // 2 + 1):
            expected = (
                w(k) * w(2 * n - k) / math.pi**n
                * math.factorial(n - r) / (8**r * math.factorial(2 * n - 4 * r))
                * df(2 * n - 2 * r + 1) / df(2 * n - 4 * r + 1)
                / math.comb(n, 2 * r)
            )
            assert a_nkr(n, k, r).evaluate() == pytest.approx(expected, rel=1e-12)


def test_constants_dispatch_and_domain():
    assert constants("omega", 2) == Scalar.pi(1)
    assert constants("double_factorial", -1) == 1
    assert constants("binomial", 5, 2) == 10
    assert constants("alpha", 1) == Scalar.pi(1, 2)
    assert constants("c_nkq", 1, 2, 1) == c_nkq(1, 2, 1)
    for bad in (("omega", -1), ("a_nkr", 1, 3, 0), ("a_nkr", 2, 1, 1), ("c_nkq", 1, 1, 1), ("nope", 1)):
        with pytest.raises(ValueError):
            constants(*bad)


@given(scalars, scalars, scalars)
def test_scalar_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Scalar()


@given(lambda_scalars, lambda_scalars, lambda_scalars)
def test_lambda_scalar_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * LambdaScalar.monomial(1) == a


@given(lambda_scalars, lambda_scalars, st.sampled_from([Fraction(1), Fraction(-2), Fraction(1, 3)]))
def test_specialization_is_a_homomorphism(a, b, lam):
    assert (a * b).subs(lam) == a.subs(lam) * b.subs(lam)
    assert (a + b).subs(lam) == a.subs(lam) + b.subs(lam)


@given(lambda_scalars, st.sampled_from([Fraction(1), Fraction(-2), Fraction(1, 3)]))
def test_specialization_matches_float_evaluation(a, lam):
    assert a.subs(lam).evaluate() == pytest.approx(a.evaluate(lam), rel=1e-9, abs=1e-9)


@given(lambda_scalars)
def test_json_round_trip(a):
    assert scalar_from_json(scalar_to_json(a)) == a


def test_json_ordering():
    a = LambdaScalar({(1, 0): 2, (0, -1): Fraction(1, 3), (0, 2): 1})
    keys = [(t["lambda"], t["pi"]) for t in scalar_to_json(a)]
    assert keys == sorted(keys)


@given(st.integers(-7, 7), st.integers(0, 6), st.sampled_from([None, Fraction(1, 2), Fraction(-3)]))
def test_half_power_series_cancel(m, order, lam):
    a = one_minus_lam_x_power(m, order, lam)
    b = one_minus_lam_x_power(-m, order, lam)
    prod = series_mul(a, b, order)
    assert prod[0] == 1
    assert all(not x for x in prod[1:])


@given(fractions, st.integers(0, 8))
def test_binomial_series_against_float(e, order):
    x = 0.1
    approx = sum(float(c) * x**j for j, c in enumerate(binomial_series(e, order)))
    assert approx == pytest.approx((1 - x) ** float(e), abs=0.2 ** (order + 1) * 10)
