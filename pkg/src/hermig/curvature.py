"""Invariant curvature measures and their module structure over valuations.

Elements live in the span of ``Delta_{k,q}`` and ``N_{k,q}`` (canonical) or of
``B_{k,q}`` and ``Gamma_{k,q}``.  Keys are ``(family, k, q)`` with family one
of ``"D"``, ``"N"``, ``"B"``, ``"G"``.  By the transfer principle the same
elements serve every curvature; only globalization and the ``t``-action of a
curved space depend on ``lam``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .polys import STPoly, TUPoly, one_minus_lam_s_power, st_to_tu, tu_to_st
from .scalars import (
    INV_PI,
    ONE,
    ZERO,
    LambdaScalar,
    Scalar,
    lam_value,
    omega,
)
from .valuations import (
    Index,
    ValElement,
    _add,
    _cap,
    _norm_lam,
    mu_basis_to_st,
    s_series,
    valid_mu,
)

Key = tuple[str, int, int]
BASES = ("DN", "BG")


def valid(family: str, k: int, q: int, n: int | None, cap: int) -> bool:
    if q < 0 or k > cap or 2 * q > k:
        return False
    if family == "D":
        return n is None or q >= k - n
    if family == "N":
        return 2 * q < k and (n is None or q > k - n)
    if family == "B":
        return 2 * q < k and (n is None or q >= k - n)
    if family == "G":
        return n is None or q > k - n or (k, q) == (2 * n, n)
    raise ValueError(f"unknown family {family!r}")


def curv_indices(n: int | None, families: str = "DN", cap: int | None = None) -> list[Key]:
    cap = _cap(n, cap)
    return [
        (f, k, q)
        for f in families
        for k in range(cap + 1)
        for q in range(k // 2 + 1)
        if valid(f, k, q, n, cap)
    ]


def _clean(d: Mapping) -> dict:
    return {k: v for k, v in d.items() if v}


class CurvElement:
    __slots__ = ("n", "cap", "basis", "_coeffs")

    def __init__(self, n: int | None, coeffs: Mapping, basis: str = "DN", cap: int | None = None):
        if basis not in BASES:
            raise ValueError(f"unknown basis {basis!r}")
        self.n = n
        self.cap = _cap(n, cap)
        self.basis = basis
        out: dict[Key, LambdaScalar] = {}
        for key, c in coeffs.items():
            c = LambdaScalar.coerce(c)
            if not c:
                continue
            f, k, q = key
            if f not in basis:
                raise ValueError(f"family {f} is not part of basis {basis}")
            if not valid(f, k, q, n, self.cap):
                raise ValueError(f"index {key} is not valid in dimension {n}")
            _add(out, (f, k, q), c)
        self._coeffs = out

    @classmethod
    def basis_element(cls, n, family: str, k: int, q: int, cap=None, coef=1) -> "CurvElement":
        basis = "DN" if family in "DN" else "BG"
        return cls(n, {(family, k, q): coef}, basis, cap)

    @classmethod
    def delta(cls, n, k, q, cap=None):
        return cls.basis_element(n, "D", k, q, cap)

    @classmethod
    def nul(cls, n, k, q, cap=None):
        return cls.basis_element(n, "N", k, q, cap)

    @classmethod
    def vol(cls, n: int) -> "CurvElement":
        return cls.delta(n, 2 * n, n)

    @classmethod
    def zero(cls, n, cap=None) -> "CurvElement":
        return cls(n, {}, "DN", cap)

    def _like(self, coeffs: Mapping, basis: str | None = None) -> "CurvElement":
        obj = CurvElement.__new__(CurvElement)
        obj.n, obj.cap, obj.basis = self.n, self.cap, basis or self.basis
        obj._coeffs = _clean(coeffs)
        return obj

    @property
    def coeffs(self) -> dict[Key, LambdaScalar]:
        return dict(self._coeffs)

    def items(self):
        return sorted(self._coeffs.items())

    def space(self) -> tuple:
        return (self.n, self.cap)

    def to_dn(self) -> "CurvElement":
        return self if self.basis == "DN" else self._like(_bg_to_dn(self._coeffs, self.n, self.cap), "DN")

    def to_bg(self) -> "CurvElement":
        return self if self.basis == "BG" else self._like(_dn_to_bg(self._coeffs, self.n, self.cap), "BG")

    def convert(self, target: str) -> "CurvElement":
        return self.to_dn() if target == "DN" else self.to_bg()

    def __add__(self, other):
        if not isinstance(other, CurvElement):
            return NotImplemented
        if self.space() != other.space():
            raise ValueError("incompatible spaces")
        out = dict(self.to_dn()._coeffs)
        for k, c in other.to_dn()._coeffs.items():
            _add(out, k, c)
        return self._like(out, "DN")

    def __neg__(self):
        return self._like({k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "CurvElement":
        c = LambdaScalar.coerce(c)
        return self._like({k: v * c for k, v in self._coeffs.items()})

    def __mul__(self, c):
        try:
            return self.scale(c)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, CurvElement):
            return NotImplemented
        return self.space() == other.space() and self.to_dn()._coeffs == other.to_dn()._coeffs

    def __hash__(self) -> int:
        return hash((self.space(), frozenset(self.to_dn()._coeffs.items())))

    def is_zero(self) -> bool:
        return not self._coeffs

    def delta_part(self) -> "CurvElement":
        return self._like({k: c for k, c in self.to_dn()._coeffs.items() if k[0] == "D"}, "DN")

    def nul_part(self) -> "CurvElement":
        return self._like({k: c for k, c in self.to_dn()._coeffs.items() if k[0] == "N"}, "DN")

    def map_coefficients(self, f) -> "CurvElement":
        return self._like({k: f(c) for k, c in self._coeffs.items()})

    def __repr__(self) -> str:
        from .scalars import format_lambda_scalar

        body = " + ".join(f"({format_lambda_scalar(c)})*{f}{k},{q}" for (f, k, q), c in self.items())
        return f"CurvElement(n={self.n}, {body or '0'})"


# -- basis changes ---------------------------------------------------------------


def _dn_to_bg(coeffs: Mapping[Key, LambdaScalar], n: int | None, cap: int) -> dict[Key, LambdaScalar]:
    out: dict[Key, LambdaScalar] = {}
    for (f, k, q), c in coeffs.items():
        if n is None:
            # Delta = Gamma, N = Gamma - B in the stable range
            _add(out, ("G", k, q), c)
            if f == "N":
                _add(out, ("B", k, q), -c)
            continue
        if f == "D" and k == 2 * n:
            _add(out, ("G", k, q), c)
            continue
        g = Fraction(2 * (n - k + q), 2 * n - k)
        if f == "D":
            b = Fraction(k - 2 * q, 2 * n - k)
            if g:
                _add(out, ("G", k, q), c * g)
            if b:
                _add(out, ("B", k, q), c * b)
        else:
            _add(out, ("G", k, q), c * g)
            _add(out, ("B", k, q), -c * g)
    return out


def _bg_to_dn(coeffs: Mapping[Key, LambdaScalar], n: int | None, cap: int) -> dict[Key, LambdaScalar]:
    out: dict[Key, LambdaScalar] = {}
    for (f, k, q), c in coeffs.items():
        if f == "B":
            _add(out, ("D", k, q), c)
            if valid("N", k, q, n, cap):
                _add(out, ("N", k, q), -c)
            continue
        _add(out, ("D", k, q), c)
        if 2 * q < k and (n is None or k < 2 * n):
            r = Fraction(k - 2 * q, 2 * (n - k + q)) if n is not None else Fraction(1)
            if n is None:
                _add(out, ("N", k, q), c)
            else:
                _add(out, ("N", k, q), c * r)
    return out


def curv_convert(c: CurvElement, target: str) -> CurvElement:
    return c.convert(target)


# -- globalization ------------------------------------------------------------------


def globalize(c: CurvElement, lam=None) -> ValElement:
    """Total mass valuation in curvature ``lam`` (mu coordinates)."""
    lam = _norm_lam(lam)
    lv = lam_value(lam)
    out: dict[Index, LambdaScalar] = {}
    for (f, k, q), x in c.to_dn()._coeffs.items():
        if f == "D":
            _add(out, (k, q), x)
        if lam != 0 and valid_mu(k + 2, q + 1, c.n, c.cap):
            _add(out, (k + 2, q + 1), -x * lv * INV_PI * (q + 1))
    return ValElement(c.n, "mu", out, lam, None if c.n is not None else c.cap)


def glob_kernel_basis(n: int, lam=None) -> list[CurvElement]:
    lam = _norm_lam(lam)
    lv = lam_value(lam)
    out = []
    for _, k, q in curv_indices(n, "N"):
        coeffs = {("N", k, q): ONE}
        b = CurvElement(n, {("B", k + 2, q + 1): lv * INV_PI * (q + 1)}, "BG").to_dn()
        for key, v in b._coeffs.items():
            _add(coeffs, key, v)
        out.append(CurvElement(n, coeffs))
    return out


def restrict_curv(c: CurvElement, m: int) -> CurvElement:
    if c.n is not None and m > c.n:
        raise ValueError("can only restrict to a smaller dimension")
    coeffs = {key: v for key, v in c.to_dn()._coeffs.items() if valid(key[0], key[1], key[2], m, 2 * m)}
    return CurvElement(m, coeffs)


# -- flat module actions ------------------------------------------------------------


def _s_rules(f: str, k: int, q: int) -> list[tuple[Key, Fraction]]:
    a = k - 2 * q
    if f == "D":
        return [
            (("D", k + 2, q), Fraction((a + 2) * (a + 1), 2 * (k + 2))),
            (("D", k + 2, q + 1), Fraction(2 * (q + 1) * (k - q + 1), k + 2)),
            (("N", k + 2, q), Fraction(-(a + 2) * (a + 1), (k + 2) * (k + 4))),
            (("N", k + 2, q + 1), Fraction(-2 * (q + 1) * a, (k + 2) * (k + 4))),
        ]
    return [
        (("N", k + 2, q), Fraction((a + 2) * (a + 1), 2 * (k + 4))),
        (("N", k + 2, q + 1), Fraction(2 * (q + 1) * (k - q + 2), k + 4)),
    ]


def _t_rules(f: str, k: int, q: int) -> list[tuple[Key, LambdaScalar]]:
    w = LambdaScalar.coerce(omega(k + 1) / (omega(k) * Scalar.pi(1)))
    a = k - 2 * q
    if f == "D":
        return [(("D", k + 1, q), w * (a + 1)), (("D", k + 1, q + 1), w * (2 * (q + 1)))]
    w = w * Fraction(k + 2, k + 3)
    return [(("N", k + 1, q), w * (a + 1)), (("N", k + 1, q + 1), w * Fraction(2 * (q + 1) * (a - 1), a))]


def _apply_rules(c: CurvElement, rules, scale: LambdaScalar = ONE) -> CurvElement:
    out: dict[Key, LambdaScalar] = {}
    for (f, k, q), x in c.to_dn()._coeffs.items():
        for key, r in rules(f, k, q):
            if r and valid(*key, c.n, c.cap):
                _add(out, key, x * scale * r)
    return c._like(out, "DN")


def act_s(c: CurvElement) -> CurvElement:
    return _apply_rules(c, _s_rules, INV_PI)


def act_t(c: CurvElement) -> CurvElement:
    """Flat action of ``t``."""
    return _apply_rules(c, _t_rules)


def act_u(c: CurvElement) -> CurvElement:
    return act_s(c).scale(4) - act_t(act_t(c))


@lru_cache(maxsize=None)
def _monomial_image(gen: Key, a: int, b: int, n: int | None, cap: int) -> CurvElement:
    if a == 0 and b == 0:
        return CurvElement(n, {gen: ONE}, "DN", None if n is not None else cap)
    if a > 0:
        return act_s(_monomial_image(gen, a - 1, b, n, cap))
    return act_t(_monomial_image(gen, 0, b - 1, n, cap))


def act_poly(p: STPoly, c: CurvElement) -> CurvElement:
    """Flat action of a polynomial in ``s, t`` on any element."""
    out: dict[Key, LambdaScalar] = {}
    for gen, x in c.to_dn()._coeffs.items():
        for (a, b), y in p.items():
            if 2 * a + b + gen[1] > c.cap:
                continue
            for key, z in _monomial_image(gen, a, b, c.n, c.cap)._coeffs.items():
                _add(out, key, x * y * z)
    return c._like(out, "DN")


def _flat_poly(p: ValElement | STPoly | TUPoly, cap: int) -> STPoly:
    if isinstance(p, STPoly):
        return p
    if isinstance(p, TUPoly):
        return tu_to_st(p, cap, 0)
    if p.lam != 0:
        raise ValueError("expected a flat valuation")
    return p.st_poly()


def _curv_cap(p, n: int | None, cap: int | None) -> int:
    if n is not None:
        return 2 * n
    if cap is not None:
        return cap
    if isinstance(p, ValElement):
        return p.cap
    raise ValueError("the infinite-dimensional module needs a degree cap")


def ell(p, n: int | None = None, cap: int | None = None) -> CurvElement:
    """``l(p) = p . Delta_{0,0}``."""
    if isinstance(p, ValElement):
        n = p.n
    ccap = _curv_cap(p, n, cap)
    base = CurvElement(n, {("D", 0, 0): ONE}, "DN", None if n is not None else ccap)
    return act_poly(_flat_poly(p, ccap), base)


def nn(p, n: int | None = None, cap: int | None = None) -> CurvElement:
    """``n(p) = p . N_{1,0}`` (zero when ``N_{1,0}`` vanishes, i.e. ``n = 1``)."""
    if isinstance(p, ValElement):
        n = p.n
    ccap = _curv_cap(p, n, cap)
    base = CurvElement(n, {}, "DN", None if n is not None else ccap)
    if valid("N", 1, 0, n, ccap):
        base = CurvElement(n, {("N", 1, 0): ONE}, "DN", None if n is not None else ccap)
    return act_poly(_flat_poly(p, ccap), base)


def nn_inverse_poly(k: int, q: int) -> TUPoly:
    """Flat polynomial ``p`` with ``n(p) = N_{k,q}``."""
    lead = LambdaScalar.coerce(Scalar.pi(k - 1) / omega(k)) * Fraction(4 * (k + 2), (k - 2 * q) * math.factorial(q))
    terms = {}
    for r in range((k - 2 * q - 1) // 2 + 1):
        rat = Fraction(
            (-1) ** r * math.factorial(q + r + 1),
            math.factorial(k - 2 * q - 2 * r - 1) * math.factorial(2 * q + 2 * r + 3) * math.factorial(r),
        )
        terms[(k - 2 * q - 1 - 2 * r, q + r)] = lead * rat
    return TUPoly(terms)


def _val_space(c: CurvElement) -> dict:
    return dict(n=c.n, lam=0, cap=None if c.n is not None else c.cap)


def nn_inverse(c: CurvElement) -> ValElement:
    c = c.to_dn()
    if any(f == "D" for f, _, _ in c._coeffs):
        raise ValueError("element has a nonzero Delta component")
    kw = _val_space(c)
    vcap = _cap(kw["n"], kw["cap"])
    out = STPoly()
    for (_, k, q), x in c._coeffs.items():
        out = out + tu_to_st(nn_inverse_poly(k, q), vcap, 0).scale(x)
    return ValElement.from_st(out, **kw).to_mu()


def free_decompose(c: CurvElement) -> tuple[ValElement, ValElement]:
    """``c = l(p1) + n(p1)`` with ``p1 = glob_0(c)``."""
    g = globalize(c, 0)
    rest = c - ell(g, c.n, c.cap)
    return g, nn_inverse(rest)


def recompose(p1: ValElement, p2: ValElement, cap: int | None = None) -> CurvElement:
    return ell(p1, p1.n, cap) + nn(p2, p2.n, cap)


def g_poly(n: int) -> TUPoly:
    """Generators of the kernel of ``n`` in dimension ``n`` are ``g_{n-1}, g_n``."""
    return TUPoly(
        {
            (n - 2 * r, r): Fraction((-1) ** r * (r + 1), math.factorial(n - 2 * r) * math.factorial(2 * r + 3))
            for r in range(n // 2 + 1)
        }
    )


def n_kernel_polys(n: int) -> tuple[TUPoly, TUPoly]:
    if n < 1:
        raise ValueError("n must be at least 1")
    return g_poly(n - 1), g_poly(n)


# -- curved module structure -----------------------------------------------------------


def _t_lambda_coefficients(cap: int, lam) -> tuple[STPoly, STPoly, STPoly, STPoly]:
    lv = lam_value(lam)
    w = one_minus_lam_s_power(-3, cap, lam)
    t = STPoly.monomial(0, 1)
    a1 = STPoly({(0, 1): 1, (0, 3): -lv * Fraction(1, 4)}).mul(w, cap)
    a2 = STPoly({(0, 2): lv * INV_PI * Fraction(1, 2)}).mul(w, cap)
    sq = STPoly({(0, 2): 1, (1, 0): -4}).pow(2, cap)
    a3 = sq.scale(-lv * LambdaScalar.monomial(Fraction(1, 8), pi=1)).mul(w, cap)
    a4 = STPoly({(0, 1): 1, (1, 1): -2 * lv, (0, 3): lv * Fraction(1, 4)}).mul(w, cap)
    return a1, a2, a3, a4


def act_t_lambda(c: CurvElement, lam=None) -> CurvElement:
    """Multiplication by ``t`` of the valuation algebra of curvature ``lam``."""
    lam = _norm_lam(lam)
    if lam == 0:
        return act_t(c)
    p1, p2 = free_decompose(c)
    cap = c.cap
    a1, a2, a3, a4 = _t_lambda_coefficients(cap, lam)
    q1 = _flat_poly(p1, cap).mul(a1, cap) + _flat_poly(p2, cap).mul(a3, cap)
    q2 = _flat_poly(p1, cap).mul(a2, cap) + _flat_poly(p2, cap).mul(a4, cap)
    return ell(q1, c.n, cap) + nn(q2, c.n, cap)


def act_val_lambda(v: ValElement, c: CurvElement) -> CurvElement:
    """Module action of ``V^n_lam`` on curvature measures."""
    if v.n != c.n:
        raise ValueError("dimension mismatch")
    p = v.st_poly()
    out = CurvElement.zero(c.n, None if c.n is not None else c.cap)
    tpowers = [c.to_dn()]
    for (a, b), x in p.items():
        while len(tpowers) <= b:
            tpowers.append(act_t_lambda(tpowers[-1], v.lam))
        y = tpowers[b]
        for _ in range(a):
            y = act_s(y)
        out = out + y.scale(x)
    return out


def angular_test(c: CurvElement) -> bool:
    return c.nul_part().is_zero()


def angular_predicate(c: CurvElement) -> bool:
    """Polynomial criterion for angularity of ``l(p1) + n(p2)``.

    Exact in the stable range (``n=None``).  For finite ``n`` the kernel of
    ``n`` makes the decomposition non-unique and the criterion can misfire in
    degrees ``>= n``; use ``angular_test`` there.
    """
    p1, p2 = free_decompose(c)
    cap = p1.cap
    f1, f2 = _flat_poly(p1, cap), _flat_poly(p2, cap)
    t_over_pi = STPoly({(0, 1): INV_PI})
    half_u = STPoly({(1, 0): 2, (0, 2): Fraction(-1, 2)})
    lhs = t_over_pi.mul(f1.d_ds(), cap) - half_u.mul(f2.d_ds(), cap)
    diff = lhs - f2.scale(3)
    kw = dict(n=p1.n, lam=0, cap=None if p1.n is not None else p1.cap)
    return ValElement.from_st(diff.truncate(cap), **kw).is_zero()


def a_map(g: TUPoly, n: int | None, cap: int | None = None) -> CurvElement:
    """``A(g) = l(g + 2u dg/du) + n((4t/pi) dg/du)``."""
    ccap = _cap(n, cap)
    dg = g.d_du()
    first = g + dg.mul(TUPoly.monomial(0, 1, 2))
    second = dg.mul(TUPoly.monomial(1, 0, INV_PI * 4))
    return ell(tu_to_st(first, ccap, 0), n, cap) + nn(tu_to_st(second, ccap, 0), n, cap)


# -- first variation and the operators of the local kinematic formulas --------------


def h_lambda(c: CurvElement, lam=None) -> ValElement:
    """``J_lam^{-1} o glob_lam``: a flat valuation with ``lam``-dependent coefficients."""
    lam = _norm_lam(lam)
    g = globalize(c, lam)
    flat = g.with_lam(0)
    order = g.cap // 2
    lv = lam_value(lam)
    return s_series(flat, [lv**m for m in range(order + 1)])


def h_prime_0(c: CurvElement) -> ValElement:
    """Derivative of ``h_lambda`` at ``lam = 0``."""
    out: dict[Index, LambdaScalar] = {}
    vcap = c.cap
    n = c.n
    from .valuations import s_mul_coeffs

    for (f, k, q), x in c.to_dn()._coeffs.items():
        if f == "D":
            for kq, y in s_mul_coeffs({(k, q): ONE}, n, vcap).items():
                _add(out, kq, x * y)
        if valid_mu(k + 2, q + 1, n, vcap):
            _add(out, (k + 2, q + 1), -x * INV_PI * (q + 1))
    return ValElement(n, "mu", out, 0, None if n is not None else vcap)


def _u_flat() -> STPoly:
    return STPoly({(1, 0): 4, (0, 2): -1})


def d1(p: ValElement) -> ValElement:
    cap = p.cap
    f = _flat_poly(p, cap)
    a = STPoly({(0, 2): Fraction(1, 2), (1, 0): -1})
    b = _u_flat().mul(STPoly({(0, 1): Fraction(1, 4)}))
    out = a.mul(f, cap) - b.mul(f.d_dt(), cap)
    return ValElement.from_st(out, p.n, 0, None if p.n is not None else cap).to_mu()


def d2(p: ValElement) -> ValElement:
    cap = p.cap
    f = _flat_poly(p, cap)
    u = _u_flat()
    a = u.mul(STPoly({(0, 1): LambdaScalar.monomial(Fraction(-3, 8), pi=1)}))
    b = u.mul(u).scale(LambdaScalar.monomial(Fraction(1, 8), pi=1))
    out = a.mul(f, cap) + b.mul(f.d_dt(), cap)
    return ValElement.from_st(out, p.n, 0, None if p.n is not None else cap).to_mu()


def sigma_map(v: ValElement) -> CurvElement:
    """Left inverse of ``h_prime_0`` on the null measures."""
    out: dict[Key, LambdaScalar] = {}
    for (k, q), x in v.to_mu()._coeffs.items():
        if 0 < q and 2 * q < k:
            _add(out, ("N", k - 2, q - 1), -x * LambdaScalar.monomial(Fraction(1, q), pi=1))
    return CurvElement(v.n, out, "DN", None if v.n is not None else v.cap)


def _first_variation(k: int, n: int) -> CurvElement:
    w = LambdaScalar.coerce(omega(2 * n - k - 1) / omega(2 * n - k))
    coeffs: dict[Key, LambdaScalar] = {}
    two_pi = LambdaScalar.monomial(2, pi=1)
    for q in range((k - 1) // 2 + 1):
        if k >= 1 and valid("D", k - 1, q, n, 2 * n):
            coeffs[("D", k - 1, q)] = w * two_pi
    b: dict[Key, LambdaScalar] = {}
    for q in range((k + 1) // 2 + 1):
        if valid("B", k + 1, q, n, 2 * n):
            b[("B", k + 1, q)] = -w * lam_value(None) * (k - 2 * q + 1)
    return CurvElement(n, coeffs) + CurvElement(n, b, "BG")


def first_variation_mu(k: int, n: int) -> CurvElement:
    """First variation of ``mu^lam_k`` (formal ``lam``).

    The degree ``k - 1`` angular part is the unweighted sum of the
    ``Delta_{k-1,q}``, the normalization under which globalizing at ``lam = 0``
    gives ``2 pi omega_{2n-k-1}/omega_{2n-k} mu_{k-1}``, the flat Steiner
    derivative.
    """
    if not 1 <= k <= 2 * n:
        raise ValueError("degree out of range")
    return _first_variation(k, n)
