import math
from fractions import Fraction

import pytest
import sympy
from conftest import lambda_modes
from hypothesis import given, strategies as st

from hermig.curvature import (
    CurvElement,
    a_map,
    act_s,
    act_t,
    act_t_lambda,
    act_u,
    act_val_lambda,
    angular_predicate,
    angular_test,
    curv_indices,
    d1,
    d2,
    ell,
    first_variation_mu,
    free_decompose,
    g_poly,
    glob_kernel_basis,
    globalize,
    h_prime_0,
    n_kernel_polys,
    nn,
    nn_inverse,
    recompose,
    restrict_curv,
    sigma_map,
    valid,
)
from hermig.polys import STPoly, TUPoly
from hermig.scalars import LambdaScalar, Scalar, double_factorial, omega
from hermig.valuations import ValElement, mu_indices, restrict_val, s_multiply, t_multiply, valid_mu

LAM = LambdaScalar.monomial(1, lam=1)
INV_PI = LambdaScalar.monomial(1, pi=-1)


def D(n, k, q, c=1):
    return CurvElement(n, {("D", k, q): c})


def N(n, k, q, c=1):
    return CurvElement(n, {("N", k, q): c})


def BG(n, f, k, q, c=1):
    return CurvElement(n, {(f, k, q): c}, "BG")


def basis(n, families="DN"):
    return [CurvElement(n, {key: 1}) for key in curv_indices(n, families)]


@st.composite
def curv_elements(draw, n):
    keys = curv_indices(n)
    coeffs = draw(st.dictionaries(st.sampled_from(keys), st.fractions(-3, 3, max_denominator=4), max_size=4))
    return CurvElement(n, coeffs)


# -- bases --------------------------------------------------------------------------


@pytest.mark.parametrize("n", range(1, 7))
def test_basis_change(n):
    for q in range(n + 1):
        assert D(n, 2 * q, q).to_bg() == BG(n, "G", 2 * q, q)
    for k in range(n, 2 * n):
        assert D(n, k, k - n).to_bg() == BG(n, "B", k, k - n)
    for c in basis(n):
        assert c.to_bg().to_dn() == c
    for key in curv_indices(n, "BG"):
        c = CurvElement(n, {key: 1}, "BG")
        assert c.to_dn().to_bg() == c


def test_null_measures_on_the_boundary_are_excluded():
    with pytest.raises(ValueError):
        N(1, 1, 0)
    with pytest.raises(ValueError):
        N(3, 4, 1)


# -- globalization ------------------------------------------------------------------


def test_globalization_examples():
    n = 3
    assert globalize(D(n, 0, 0)) == ValElement.mu(n, 0, 0) - ValElement.mu(n, 2, 1, coef=LAM * INV_PI)
    for _, k, q in curv_indices(n, "N"):
        assert globalize(N(n, k, q), 0).is_zero()
        assert globalize(N(n, k, q)) == ValElement.mu(n, k + 2, q + 1, coef=-LAM * INV_PI * (q + 1))
    for key in curv_indices(n, "B"):
        assert globalize(CurvElement(n, {key: 1}, "BG")) == ValElement.mu(n, key[1], key[2])


@pytest.mark.parametrize("n", range(1, 5))
@pytest.mark.parametrize("lam", [None, Fraction(0), Fraction(2, 3)])
def test_kernel_of_globalization(n, lam):
    ker = glob_kernel_basis(n, lam)
    assert len(ker) == len(curv_indices(n, "N"))
    assert all(globalize(c, lam).is_zero() for c in ker)
    if lam == 0:
        assert ker == basis(n, "N")


@pytest.mark.parametrize("n", range(2, 5))
def test_kernels_intersect_trivially(n):
    keys = curv_indices(n)
    idx = mu_indices(n)
    rows = []
    for key in keys:
        c = CurvElement(n, {key: 1})
        g0, g1 = globalize(c, 0), globalize(c, Fraction(1))
        rows.append([g0.coefficient(*i).evaluate() for i in idx] + [g1.coefficient(*i).evaluate() for i in idx])
    m = sympy.Matrix(rows)
    assert m.rank() == len(keys)


# -- flat module structure ----------------------------------------------------------


def test_t_on_null_measures():
    assert act_t(N(3, 1, 0)) == N(3, 2, 0, Fraction(3, 4))
    assert act_t(N(2, 1, 0)).is_zero()
    for n in (4, 5, 6):
        assert act_t(N(n, 1, 0)) == N(n, 2, 0, Fraction(3, 4))
        assert act_t(N(n, 2, 0)) == N(n, 3, 0, INV_PI * Fraction(16, 5)) + N(n, 3, 1, INV_PI * Fraction(16, 15))
    # in dimension 3, N_{3,0} is not a valid index
    assert act_t(N(3, 2, 0)) == N(3, 3, 1, INV_PI * Fraction(16, 15))
    inf = CurvElement(None, {("N", 2, 0): 1}, cap=5)
    expected = CurvElement(None, {("N", 3, 0): INV_PI * Fraction(16, 5), ("N", 3, 1): INV_PI * Fraction(16, 15)}, cap=5)
    assert act_t(inf) == expected


@pytest.mark.parametrize("n", range(2, 6))
def test_s_on_gamma(n):
    for q in range(n):
        got = act_s(BG(n, "G", 2 * q, q).to_dn()).to_bg()
        assert got.basis == "BG"
        expected = BG(n, "G", 2 * q + 2, q + 1, INV_PI * (q + 1))
        if valid("B", 2 * q + 2, q, n, 2 * n):
            expected = expected + BG(n, "B", 2 * q + 2, q, INV_PI * Fraction(1, 2 * (q + 1)))
        if valid("N", 2 * q + 2, q, n, 2 * n):
            expected = expected + N(n, 2 * q + 2, q, INV_PI * Fraction(1, 2 * (q + 2))).to_bg()
        assert got == expected


@pytest.mark.parametrize("n", range(1, 7))
def test_flat_actions_commute_and_s_preserves_beta(n):
    for c in basis(n):
        assert act_s(act_t(c)) == act_t(act_s(c))
        assert act_u(c) == act_s(c).scale(4) - act_t(act_t(c))
    for key in curv_indices(n, "B"):
        img = act_s(CurvElement(n, {key: 1}, "BG").to_dn()).to_bg()
        assert all(f == "B" for f, _, _ in img.coeffs)


@pytest.mark.parametrize("n", range(1, 5))
def test_globalization_intertwines_actions(n):
    for c in basis(n):
        for lam in (None, Fraction(-1, 2)):
            assert globalize(act_s(c), lam) == s_multiply(globalize(c, lam))
        assert globalize(act_t(c), 0) == t_multiply(globalize(c, 0))


def test_ell_and_nn_closed_forms():
    n = 5
    assert ell(ValElement.chi(n, 0)) == D(n, 0, 0)
    for k in range(0, 5):
        tk = ValElement.monomial(n, 0, k, 0)
        c = LambdaScalar.coerce(omega(k) * math.factorial(k) / Scalar.pi(k))
        expected = sum((D(n, k, i, c) for i in range(k // 2 + 1)), CurvElement.zero(n))
        assert ell(tk) == expected
    for k in range(0, 3):
        uk = ValElement.from_tu(TUPoly.monomial(0, k), n, 0)
        c = LambdaScalar.monomial(Fraction(math.factorial(2 * k), math.factorial(k)), pi=-k)
        expected = D(n, 2 * k, k, c)
        if k >= 1:
            expected = expected - N(n, 2 * k, k - 1, c / (k + 1))
        assert ell(uk) == expected
        assert nn(uk) == N(n, 2 * k + 1, k, LambdaScalar.monomial(Fraction(4**k * math.factorial(k)), pi=-k))
    for k in range(0, 4):
        tk = ValElement.monomial(n, 0, k, 0)
        c = LambdaScalar.coerce(omega(k + 3) * math.factorial(k) / Scalar.pi(k + 1)) * Fraction(3, 4)
        expected = sum((N(n, k + 1, i, c * (k - 2 * i + 1)) for i in range(k // 2 + 1)), CurvElement.zero(n))
        assert nn(tk) == expected


def test_nn_inverse_examples():
    n = 4
    assert nn_inverse(N(n, 1, 0)) == ValElement.chi(n, 0).to_mu()
    for k in range(0, 2):
        expected = ValElement.from_tu(TUPoly.monomial(0, k, LambdaScalar.monomial(Fraction(1, 4**k * math.factorial(k)), pi=k)), n, 0)
        assert nn_inverse(N(n, 2 * k + 1, k)) == expected.to_mu()
    with pytest.raises(ValueError):
        nn_inverse(D(n, 0, 0))


@pytest.mark.parametrize("n", range(1, 6))
def test_free_module_round_trips(n):
    for c in basis(n):
        p1, p2 = free_decompose(c)
        assert recompose(p1, p2) == c
    for c in basis(n, "N"):
        assert nn(nn_inverse(c)) == c
    assert free_decompose(D(n, 0, 0)) == (ValElement.chi(n, 0).to_mu(), ValElement.zero(n, 0))


@given(st.integers(1, 4).flatmap(lambda n: curv_elements(n)))
def test_nn_round_trip_on_random_null_elements(c):
    null = c.nul_part()
    assert nn(nn_inverse(null)) == null


@pytest.mark.parametrize("cap", range(1, 11))
def test_stable_range_is_free(cap):
    # n raises the degree by one
    zero = ValElement.zero(None, 0, cap)
    for x in mu_indices(None, cap - 1):
        p = ValElement.mu(None, *x, 0, cap)
        assert nn_inverse(nn(p)) == p
        assert free_decompose(ell(p)) == (p, zero)
        assert free_decompose(nn(p)) == (zero, p)


def test_kernel_generators():
    t, u = TUPoly.monomial(1, 0), TUPoly.monomial(0, 1)
    assert g_poly(2) == t * t * Fraction(1, 12) - u * Fraction(1, 60)
    assert g_poly(0) == TUPoly.monomial(0, 0, Fraction(1, 6))
    assert n_kernel_polys(3) == (g_poly(2), g_poly(3))


def test_kernel_generators_from_generating_function():
    t, u, z = sympy.symbols("t u z")
    x = sympy.sqrt(u)
    f = sympy.exp(t * z) * (sympy.sin(x * z) - x * z * sympy.cos(x * z)) / (2 * (x * z) ** 3)
    series = sympy.series(f, z, 0, 9).removeO()
    for n in range(9):
        part = sympy.expand(series.coeff(z, n))
        ours = sum(
            sympy.Rational(c.to_scalar().terms[0].numerator, c.to_scalar().terms[0].denominator) * t**a * u**b
            for (a, b), c in g_poly(n).items()
        )
        assert sympy.simplify(part - ours) == 0


@pytest.mark.parametrize("n", range(1, 9))
def test_kernel_of_nn(n):
    for g in n_kernel_polys(n):
        assert nn(ValElement.from_tu(g, n, 0)).is_zero()
    if n >= 2:
        assert not nn(ValElement.from_tu(g_poly(n - 2), n, 0)).is_zero()


# -- curved module structure --------------------------------------------------------


def test_t_lambda_flat_limit():
    assert act_t_lambda(D(3, 0, 0), 0) == D(3, 1, 0, INV_PI * 2)


@pytest.mark.parametrize("n", range(1, 5))
def test_s_action_independent_of_curvature(n):
    for lam in (None, Fraction(1), Fraction(-1, 3)):
        s = ValElement.monomial(n, 1, 0, lam)
        t = ValElement.monomial(n, 0, 1, lam)
        for c in basis(n):
            assert act_val_lambda(s, c) == act_s(c)
            assert act_val_lambda(t, c) == act_t_lambda(c, lam)


@pytest.mark.parametrize("n", range(1, 5))
def test_module_structures_commute(n):
    for c in basis(n):
        tl = act_t_lambda(c)
        assert act_t_lambda(act_s(c)) == act_s(tl)
        assert act_t_lambda(act_t(c)) == act_t(tl)


@pytest.mark.parametrize("n", range(1, 4))
def test_globalization_intertwines_curved_t(n):
    for c in basis(n):
        for lam in (None, Fraction(1, 3)):
            assert globalize(act_t_lambda(c, lam), lam) == t_multiply(globalize(c, lam))


@pytest.mark.parametrize("n", range(1, 5))
def test_curved_action_is_multiplicative(n):
    lam = Fraction(-1, 2)
    a = ValElement.monomial(n, 1, 1, lam)
    b = ValElement.mu(n, 1, 0, lam)
    from hermig.valuations import multiply

    for c in basis(n)[:6]:
        assert act_val_lambda(multiply(a, b), c) == act_val_lambda(a, act_val_lambda(b, c))


@pytest.mark.parametrize("n", range(1, 6))
def test_angularity_preserved(n):
    for c in basis(n, "D"):
        assert angular_test(act_t_lambda(c))


def test_angular_test_on_basis():
    for c in basis(4, "D"):
        assert angular_test(c)
    for c in basis(4, "N"):
        assert not angular_test(c)


@pytest.mark.parametrize("cap", range(2, 10))
def test_angular_predicate_in_stable_range(cap):
    for key in curv_indices(None, "DN", cap):
        c = CurvElement(None, {key: 1}, cap=cap)
        assert angular_predicate(c) == angular_test(c)


def test_a_map():
    n = 4
    for k in range(n + 1):
        img = a_map(TUPoly.monomial(0, k), n)
        assert img == D(n, 2 * k, k, LambdaScalar.monomial(Fraction(2**k * double_factorial(2 * k + 1)), pi=-k))
    for n in (2, 3, 4):
        monos = [(a, b) for a in range(2 * n + 1) for b in range(n + 1) if a + 2 * b <= 2 * n]
        keys = curv_indices(n)
        rows = []
        for a, b in monos:
            img = a_map(TUPoly.monomial(a, b), None, 2 * n)
            rows.append([img.coeffs.get(k, LambdaScalar()).evaluate() for k in curv_indices(None, "DN", 2 * n)])
        assert sympy.Matrix(rows).rank() == len(monos)
        assert all(angular_test(a_map(TUPoly.monomial(a, b), n)) for a, b in monos)
        del keys


def test_restriction_of_curvature_measures():
    assert restrict_curv(D(4, 3, 1), 3) == D(3, 3, 1)
    assert restrict_curv(BG(4, "B", 4, 0).to_dn(), 3).is_zero()
    assert restrict_curv(D(4, 4, 0), 3).is_zero()
    for c in basis(4):
        for lam in (None, Fraction(2)):
            assert globalize(restrict_curv(c, 3), lam) == restrict_val(globalize(c, lam), 3)


# -- first variation and derivation operators ---------------------------------------


@pytest.mark.parametrize("n", range(1, 5))
def test_first_variation(n):
    for k in range(1, 2 * n + 1):
        fv = first_variation_mu(k, n)
        flat = fv.map_coefficients(lambda c: c.subs(0))
        w = LambdaScalar.coerce(omega(2 * n - k - 1) / omega(2 * n - k)) * LambdaScalar.monomial(2, pi=1)
        assert flat == sum((D(n, k - 1, q, w) for q in range((k - 1) // 2 + 1) if k - 1 - q <= n), CurvElement.zero(n))
        mu_k = sum(
            (ValElement.mu(n, k - 1, q, 0) for q in range((k - 1) // 2 + 1) if valid_mu(k - 1, q, n, 2 * n)),
            ValElement.zero(n, 0),
        )
        assert globalize(flat, 0) == mu_k.scale(w)
    with pytest.raises(ValueError):
        first_variation_mu(0, 2)
    with pytest.raises(ValueError):
        first_variation_mu(5, 2)


@pytest.mark.parametrize("n", [1, 2, 3, 4, None])
def test_derivation_operators(n):
    cap = 9 if n is None else 2 * n
    for x in mu_indices(n, cap if n is None else None):
        p = ValElement.mu(n, *x, 0, cap if n is None else None)
        assert h_prime_0(ell(p)) == d1(p)
        assert h_prime_0(nn(p)) == d2(p)
        if x[0] <= cap - 3:
            assert sigma_map(d2(p)) == nn(p)
