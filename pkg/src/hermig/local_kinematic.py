"""Local, semi-local and complex kinematic formulas on curvature measures."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .curvature import (
    CurvElement,
    _flat_poly,
    act_poly,
    ell,
    free_decompose,
    globalize,
    nn,
)
from .polys import TUPoly
from .scalars import ONE, ZERO, LambdaScalar, Scalar, a_nkr, binomial, double_factorial, lam_value, omega
from .tensor import Tensor, outer, tensor_sum
from .valuations import _norm_lam, kinematic_pairs, pi_kr_poly


def rho_kr_poly(n: int, k: int, r: int) -> TUPoly:
    """Companion of ``pi_kr`` whose null image carries the correction terms of ``K``."""
    lead = LambdaScalar.coerce(Scalar.pi(k - 1) / omega(k)) * (2 * (-1) ** r * double_factorial(2 * n - 4 * r + 1))
    c1 = Fraction(
        double_factorial(2 * r - 1) * math.factorial(k + 1),
        double_factorial(2 * n - 2 * r + 1) * math.factorial(2 * r),
    )
    terms: dict[tuple[int, int], LambdaScalar] = {}

    def add(key, c):
        terms[key] = terms.get(key, ZERO) + lead * c

    for i in range((k - 1) // 2 + 1):
        add((k - 2 * i - 1, i), c1 * Fraction((-1) ** (i + 1), math.factorial(2 * i + 3) * math.factorial(k - 2 * i - 1)))
    for i in range(r):
        add(
            (k - 2 * i - 1, i),
            Fraction(
                (-1) ** i * double_factorial(2 * r - 2 * i - 3),
                double_factorial(2 * n - 2 * r - 2 * i - 1) * math.factorial(2 * r - 2 * i - 2) * math.factorial(2 * i + 2),
            ),
        )
    return TUPoly(terms)


def _meta(n: int) -> dict:
    return {"n": n, "legs": ("curv", "curv")}


@lru_cache(maxsize=None)
def _legs(n: int, k: int, r: int) -> tuple[CurvElement, CurvElement, CurvElement]:
    p, rho = pi_kr_poly(n, k, r), rho_kr_poly(n, k, r)
    return ell(p, n), nn(p, n), nn(rho, n)


@lru_cache(maxsize=None)
def local_kinematic_delta(n: int) -> Tensor:
    """``K(Delta_00)``."""
    parts = []
    for k, r in kinematic_pairs(n):
        a = LambdaScalar.coerce(a_nkr(n, k, r))
        l1, _, r1 = _legs(n, k, r)
        l2, _, r2 = _legs(n, 2 * n - k, r)
        parts.append(outer(l1.coeffs, l2.coeffs).scale(a))
        parts.append(outer(r1.coeffs, r2.coeffs).scale(-a))
    return Tensor(tensor_sum(parts).terms, _meta(n))


@lru_cache(maxsize=None)
def local_kinematic_null(n: int) -> Tensor:
    """``K(N_10)``."""
    parts = []
    for k, r in kinematic_pairs(n):
        a = LambdaScalar.coerce(a_nkr(n, k, r))
        l1, n1, r1 = _legs(n, k, r)
        l2, n2, r2 = _legs(n, 2 * n - k, r)
        parts.append(outer(n1.coeffs, l2.coeffs).scale(a))
        parts.append(outer(l1.coeffs, n2.coeffs).scale(a))
        parts.append(outer(n1.coeffs, r2.coeffs).scale(-a))
        parts.append(outer(r1.coeffs, n2.coeffs).scale(-a))
    return Tensor(tensor_sum(parts).terms, _meta(n))


def act_left(p, t: Tensor, n: int) -> Tensor:
    """Flat module action of a valuation on the first leg of a curvature tensor."""
    poly = _flat_poly(p, 2 * n)

    def left(x):
        return act_poly(poly, CurvElement(n, {x: 1})).coeffs

    return t.map_legs(left=left)


def local_kinematic(c: CurvElement) -> Tensor:
    """``K(c)`` in ``DN (x) DN`` coordinates."""
    n = c.n
    if n is None:
        raise ValueError("local kinematic formulas need a finite dimension")
    p1, p2 = free_decompose(c)
    out = Tensor(meta=_meta(n))
    if not p1.is_zero():
        out = out + act_left(p1, local_kinematic_delta(n), n)
    if not p2.is_zero():
        out = out + act_left(p2, local_kinematic_null(n), n)
    return Tensor(out.terms, _meta(n))


def curv_tensor_apply(t: Tensor, n: int, left=None, right=None, meta=None) -> Tensor:
    """Apply maps ``CurvElement -> CurvElement | ValElement`` to the legs of ``t``."""

    def wrap(f):
        if f is None:
            return None
        return lambda x: f(CurvElement(n, {x: 1}))._coeffs

    return t.map_legs(left=wrap(left), right=wrap(right), meta=meta)


def semi_local(c: CurvElement, lam=None) -> Tensor:
    """``(id (x) glob_lam) K(c)``; second leg in mu coordinates of curvature ``lam``."""
    lam = _norm_lam(lam)
    return curv_tensor_apply(
        local_kinematic(c), c.n, right=lambda x: globalize(x, lam), meta={"n": c.n, "lam": lam, "legs": ("curv", "mu")}
    )


def global_from_local(t: Tensor, n: int, lam=None) -> Tensor:
    """``(glob_lam (x) glob_lam)`` applied to a curvature tensor."""
    lam = _norm_lam(lam)
    g = lambda x: globalize(x, lam)  # noqa: E731
    return curv_tensor_apply(t, n, left=g, right=g, meta={"n": n, "lam": lam, "legs": ("mu", "mu")})


# -- complex analytic subvarieties ---------------------------------------------------


def complex_project(c: CurvElement) -> dict[int, LambdaScalar]:
    """Coefficients of ``Gamma_{2q,q}`` (keyed by ``q``) in the B/Gamma expansion of ``c``."""
    out = {}
    for (f, k, q), x in c.to_bg().coeffs.items():
        if f == "G" and k == 2 * q:
            out[q] = x
    return out


def complex_kinematic(q: int, n: int) -> Tensor:
    """``K_C(Gamma_{2q,q})``; legs keyed by the index ``i`` of ``Gamma_{2i,i}``."""
    if not 0 <= q <= n:
        raise ValueError("q out of range")
    out = {}
    for i in range(q, n + 1):
        j = n + q - i
        out[(i, j)] = Fraction(math.factorial(i) * math.factorial(j), math.factorial(n) * math.factorial(q))
    return Tensor(out, {"n": n, "legs": ("gamma", "gamma")})


def complex_kinematic_from_local(q: int, n: int) -> Tensor:
    """Project ``K(Gamma_{2q,q})`` onto ``span{Gamma_{2i,i} (x) Gamma_{2j,j}}``."""
    c = CurvElement(n, {("G", 2 * q, q): 1}, "BG")
    t = local_kinematic(c.to_dn())

    def proj(x):
        return complex_project(CurvElement(n, {x: 1}))

    return Tensor(t.map_legs(left=proj, right=proj).terms, {"n": n, "legs": ("gamma", "gamma")})


def _ratio(lam, e: int) -> LambdaScalar:
    return (lam_value(lam) * LambdaScalar.monomial(1, pi=-1)) ** e if e else ONE


def chern_to_gamma(k: int, n: int, lam=None) -> dict[int, LambdaScalar]:
    """``C_k = sum_q q! binom(q+1, k+1) (lam/pi)^(q-k) Gamma_{2q,q}``."""
    lam = _norm_lam(lam)
    return {q: _ratio(lam, q - k) * (math.factorial(q) * binomial(q + 1, k + 1)) for q in range(k, n + 1)}


def gamma_to_chern(q: int, n: int, lam=None) -> dict[int, LambdaScalar]:
    """``Gamma_{2q,q} = (1/q!) sum_k binom(k+1, q+1) (-lam/pi)^(k-q) C_k``."""
    lam = _norm_lam(lam)
    return {
        k: _ratio(lam, k - q) * Fraction((-1) ** (k - q) * binomial(k + 1, q + 1), math.factorial(q))
        for k in range(q, n + 1)
    }


def shifrin(q: int, n: int, lam=None) -> Tensor:
    """Closed form of ``K_C(Ch_q)`` in ``Ch (x) Ch`` coordinates."""
    lam = _norm_lam(lam)
    out = {}
    for k in range(n + 1):
        for l in range(n + 1):
            e = k + l - n - q
            if e < 0:
                continue
            x = _ratio(lam, e) * ((-1) ** e * Fraction(binomial(k + l - q, n), math.factorial(n)))
            out[(k, l)] = x
    return Tensor(out, {"n": n, "lam": lam, "legs": ("chern", "chern")})


def shifrin_via_gamma(q: int, n: int, lam=None) -> Tensor:
    """``K_C(Ch_q)`` obtained from ``K_C`` on the Gamma basis and Chern conversions."""
    lam = _norm_lam(lam)
    parts = [
        complex_kinematic(i, n).scale(c) for i, c in chern_to_gamma(q, n, lam).items()
    ]
    t = tensor_sum(parts)
    conv = lambda i: gamma_to_chern(i, n, lam)  # noqa: E731
    return Tensor(t.map_legs(left=conv, right=conv).terms, {"n": n, "lam": lam, "legs": ("chern", "chern")})


def shifrin_identity(n: int, k: int, l: int, q: int) -> tuple[int, int]:
    """Both sides of the binomial identity behind the Chern form of ``K_C``."""
    lhs = 0
    # i or j = -1 contributes through binom(k+1, 0) = 1
    for i in range(-1, k + 1):
        for j in range(-1, l + 1):
            if i + j >= n + q:
                lhs += (-1) ** (i + j) * binomial(i + j - n + 1, q + 1) * binomial(k + 1, i + 1) * binomial(l + 1, j + 1)
    return lhs, (-1) ** (n + q) * binomial(k + l - q, n)
