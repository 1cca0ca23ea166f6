import math
from fractions import Fraction

import pytest

from hermig.polys import STPoly
from hermig.scalars import LambdaScalar, omega
from hermig.tubes import (
    ball_tube,
    complex_tube,
    complex_tube_from_global,
    cpm_tube,
    cpm_tube_from_chern,
    curv_trig_globalize,
    differentiate,
    global_tube,
    local_tube,
    local_tube_flat,
    totally_real_substitute,
    totally_real_tube,
)
from hermig.trig import TrigPoly


def w(k):
    return LambdaScalar.coerce(omega(k))


@pytest.mark.parametrize("n", range(1, 5))
def test_ball_tube_matches_global_tube(n):
    assert ball_tube(n) == global_tube(n)


@pytest.mark.parametrize("n", range(1, 5))
def test_global_tube_coefficients(n):
    g = global_tube(n)
    assert g[(0, 0)] == TrigPoly.monomial(2 * n, 0, w(2 * n))
    for (k, q), p in g.items():
        assert p.flat_limit() == {2 * n - k: w(2 * n - k)}


@pytest.mark.parametrize("n", range(1, 4))
def test_local_tube_derivative(n):
    lhs = differentiate(curv_trig_globalize(local_tube(n), n))
    assert lhs == differentiate(global_tube(n))


@pytest.mark.parametrize("n", range(1, 5))
def test_local_tube_at_zero_radius(n):
    for key, p in local_tube(n).items():
        if key == ("D", 2 * n, n):
            assert p.at_zero() == 1
        else:
            assert all(atom is not None for (_, _, atom), _ in p.items())
            assert p.evaluate(Fraction(1, 2), 0.0) == 0


@pytest.mark.parametrize("n", range(1, 5))
def test_local_tube_flat_limit_is_steiner(n):
    flat = local_tube_flat(n)
    expected = {("D", j, q): {2 * n - j: w(2 * n - j)} for j in range(2 * n) for q in range(j // 2 + 1) if q >= j - n}
    expected[("D", 2 * n, n)] = {0: LambdaScalar.coerce(1)}
    assert flat == expected


@pytest.mark.parametrize("n", range(1, 5))
def test_complex_tube_from_global(n):
    assert complex_tube_from_global(n) == complex_tube(n)
    for m in range(n + 1):
        assert cpm_tube_from_chern(m, n) == cpm_tube(m, n)


@pytest.mark.parametrize("n", range(1, 5))
def test_cpm_tube_special_cases(n):
    lead = LambdaScalar.monomial(Fraction(1, math.factorial(n)), pi=n)
    assert cpm_tube(0, n) == TrigPoly.monomial(2 * n, 0, lead)
    lam = 0.7
    r = math.pi / (2 * math.sqrt(lam))
    total = math.pi**n / (math.factorial(n) * lam**n)
    assert cpm_tube(n, n).evaluate(Fraction(7, 10), r) == pytest.approx(total, rel=1e-12)
    with pytest.raises(ValueError):
        cpm_tube(n + 1, n)


@pytest.mark.parametrize("n", range(1, 6))
def test_totally_real(n):
    for k in range(n + 1):
        assert totally_real_tube(n, k) == {}
    with pytest.raises(ValueError):
        totally_real_tube(n, n + 1)


def test_u_vanishes_under_substitution():
    from hermig.scalars import LAM

    u = STPoly({(1, 0): 4, (0, 2): -1, (1, 2): LAM})
    assert all(not c for c in totally_real_substitute(u, 10))


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("lam", [Fraction(-1, 2), Fraction(0), Fraction(1, 3)])
def test_numeric_local_tube(n, lam):
    # both sides agree at r = 0 and have the same derivative, so they agree as functions
    g = curv_trig_globalize(local_tube(n), n)
    gt = global_tube(n)
    for r in (0.3, 0.9):
        for idx in set(g) | set(gt):
            a = g.get(idx, TrigPoly()).evaluate(lam, r)
            b = gt.get(idx, TrigPoly()).evaluate(lam, r)
            assert a == pytest.approx(b, rel=1e-9, abs=1e-10)
