"""The algebra of unitarily invariant valuations on a complex space form.

Elements of ``V^n_lam`` are stored over the hermitian intrinsic volumes
``mu_{k,q}`` (the canonical basis), the ``tau_{k,q}`` basis, or as a
polynomial representative in ``s`` and ``t``.  The curvature ``lam`` is
either formal (``None``) or a rational number.  ``n = None`` means the
infinite-dimensional algebra truncated at an explicit weighted degree
``cap``: all arithmetic then happens in the quotient by valuations of
degree above ``cap``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .polys import STPoly, TUPoly, one_minus_lam_s_power, st_to_tu, tu_to_st
from .scalars import (
    INV_PI,
    ONE,
    ZERO,
    LambdaScalar,
    Scalar,
    a_nkr,
    binomial,
    c_nkq,
    double_factorial,
    gen_binomial,
    lam_power,
    lam_value,
    omega,
    rising,
)
from .tensor import Tensor
from .trig import TrigPoly

Index = tuple[int, int]
Lam = Fraction | None

BASES = ("mu", "tau", "st")


def _norm_lam(lam) -> Lam:
    return None if lam is None else Fraction(lam)


def _cap(n: int | None, cap: int | None) -> int:
    if n is None:
        if cap is None:
            raise ValueError("the infinite-dimensional algebra needs a degree cap")
        return cap
    if n < 0:
        raise ValueError("dimension must be nonnegative")
    if cap is not None and cap != 2 * n:
        raise ValueError("finite dimension fixes the cap at 2n")
    return 2 * n


def valid_mu(k: int, q: int, n: int | None, cap: int) -> bool:
    if q < 0 or 2 * q > k or k > cap:
        return False
    return n is None or q >= k - n


def mu_indices(n: int | None, cap: int | None = None) -> list[Index]:
    cap = _cap(n, cap)
    return [(k, q) for k in range(cap + 1) for q in range(k // 2 + 1) if valid_mu(k, q, n, cap)]


def _add(out: dict, key, c) -> None:
    v = out.get(key, ZERO) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def _clean(d: Mapping) -> dict:
    return {k: v for k, v in d.items() if v}


# -- basis changes -------------------------------------------------------------


def tau_to_mu_coeffs(coeffs: Mapping[Index, LambdaScalar]) -> dict[Index, LambdaScalar]:
    out: dict[Index, LambdaScalar] = {}
    for (k, q), c in coeffs.items():
        for i in range(q, k // 2 + 1):
            _add(out, (k, i), c * binomial(i, q))
    return out


def mu_to_tau_coeffs(coeffs: Mapping[Index, LambdaScalar]) -> dict[Index, LambdaScalar]:
    out: dict[Index, LambdaScalar] = {}
    for (k, q), c in coeffs.items():
        for i in range(q, k // 2 + 1):
            _add(out, (k, i), c * ((-1) ** (i - q) * binomial(i, q)))
    return out


def drop_invalid(coeffs: Mapping[Index, LambdaScalar], n: int | None, cap: int) -> dict[Index, LambdaScalar]:
    return {kq: c for kq, c in coeffs.items() if c and valid_mu(*kq, n, cap)}


@lru_cache(maxsize=None)
def _t_power_tau(j: int, cap: int, lam: Lam) -> tuple:
    """``t**j`` in the tau basis of the untruncated algebra, degrees <= cap.

    Coefficients are the full partial derivatives at the origin of
    ``xi^i (1-xi)^(-i-1/2-odd) (1-eta)^(-1/2)``.
    """
    i, odd = divmod(j, 2)
    if odd:
        pref, a0, pi_shift = Fraction(2 ** (2 * i + 1)), Fraction(2 * i + 3, 2), -1
    else:
        pref, a0, pi_shift = Fraction(binomial(2 * i, i)), Fraction(2 * i + 1, 2), 0
    half = Fraction(1, 2)
    out: dict[Index, LambdaScalar] = {}
    k = i
    while 2 * k + odd <= cap:
        dk = Fraction(math.factorial(k), math.factorial(k - i)) * rising(a0, k - i)
        p = 0
        while 2 * k + 2 * p + odd <= cap:
            rat = pref * dk * rising(half, p)
            coef = lam_power(lam, k + p - i) * LambdaScalar.monomial(rat, pi=pi_shift - (k + p))
            if coef:
                _add(out, (2 * k + 2 * p + odd, p), coef)
            p += 1
        k += 1
    return tuple(sorted(out.items()))


def s_mul_coeffs(coeffs: Mapping[Index, LambdaScalar], n: int | None, cap: int) -> dict[Index, LambdaScalar]:
    """Multiplication by ``s`` in the mu basis; it does not depend on ``lam``."""
    out: dict[Index, LambdaScalar] = {}
    for (k, q), c in coeffs.items():
        if valid_mu(k + 2, q, n, cap):
            r = Fraction((k - 2 * q + 2) * (k - 2 * q + 1), 2 * (k + 2))
            if r:
                _add(out, (k + 2, q), c * LambdaScalar.monomial(r, pi=-1))
        if valid_mu(k + 2, q + 1, n, cap):
            r = Fraction(2 * (q + 1) * (k - q + 1), k + 2)
            _add(out, (k + 2, q + 1), c * LambdaScalar.monomial(r, pi=-1))
    return out


def flat_t_mul_coeffs(coeffs: Mapping[Index, LambdaScalar], n: int | None, cap: int) -> dict[Index, LambdaScalar]:
    """Multiplication by ``t`` in the mu basis at ``lam = 0``."""
    out: dict[Index, LambdaScalar] = {}
    for (k, q), c in coeffs.items():
        w = LambdaScalar.coerce(omega(k + 1) / (omega(k) * Scalar.pi(1)))
        if valid_mu(k + 1, q, n, cap):
            _add(out, (k + 1, q), c * w * (k - 2 * q + 1))
        if valid_mu(k + 1, q + 1, n, cap):
            _add(out, (k + 1, q + 1), c * w * (2 * (q + 1)))
    return out


@lru_cache(maxsize=None)
def monomial_to_mu(a: int, b: int, n: int | None, cap: int, lam: Lam) -> tuple:
    """``s**a t**b`` in the mu basis."""
    if 2 * a + b > cap:
        return ()
    if a == 0:
        tau = dict(_t_power_tau(b, cap, lam))
        return tuple(sorted(drop_invalid(tau_to_mu_coeffs(tau), n, cap).items()))
    prev = dict(monomial_to_mu(a - 1, b, n, cap, lam))
    return tuple(sorted(s_mul_coeffs(prev, n, cap).items()))


def st_to_mu(p: STPoly, n: int | None, cap: int, lam: Lam) -> dict[Index, LambdaScalar]:
    out: dict[Index, LambdaScalar] = {}
    for (a, b), c in p.items():
        for kq, v in monomial_to_mu(a, b, n, cap, lam):
            _add(out, kq, c * v)
    return out


@lru_cache(maxsize=None)
def mu_basis_to_st(k: int, q: int, cap: int, lam: Lam) -> STPoly:
    """Polynomial representative of ``mu_{k,q}`` in ``s`` and ``t``.

    Uses ``v = t^2 (1 - lam s)``, ``u = 4s - v`` and expands the half-integer
    powers of ``1 - lam s`` up to the degree cap.
    """
    out = STPoly()
    pik = LambdaScalar.coerce(Scalar.pi(k) / omega(k))
    for i in range(q, k // 2 + 1):
        lead = pik * Fraction(
            (-1) ** (i + q) * binomial(i, q),
            math.factorial(k - 2 * i) * math.factorial(2 * i),
        )
        for j in range(i + 1):
            coef = lead * (binomial(i, j) * 4 ** (i - j) * (-1) ** j)
            deg = 2 * (i - j) + k - 2 * i + 2 * j
            if deg > cap:
                continue
            series = one_minus_lam_s_power(k - 2 * i + 2 + 2 * j, cap - deg, lam)
            out = out + series.mul(STPoly.monomial(i - j, k - 2 * i + 2 * j, coef))
    return out.truncate(cap)


def mu_to_st(coeffs: Mapping[Index, LambdaScalar], cap: int, lam: Lam) -> STPoly:
    out: dict[tuple[int, int], LambdaScalar] = {}
    for (k, q), c in coeffs.items():
        for key, v in mu_basis_to_st(k, q, cap, lam).items():
            _add(out, key, c * v)
    return STPoly(out)


# -- elements --------------------------------------------------------------------


class ValElement:
    """An invariant valuation given by sparse coefficients over a basis."""

    __slots__ = ("n", "cap", "basis", "lam", "_coeffs")

    def __init__(self, n: int | None, basis: str, coeffs: Mapping, lam=None, cap: int | None = None):
        if basis not in BASES:
            raise ValueError(f"unknown basis {basis!r}")
        self.n = n
        self.cap = _cap(n, cap)
        self.basis = basis
        self.lam = _norm_lam(lam)
        clean: dict = {}
        for key, c in coeffs.items():
            c = LambdaScalar.coerce(c)
            if not c:
                continue
            key = tuple(key)
            if basis == "st":
                if key[0] < 0 or key[1] < 0:
                    raise ValueError(f"bad monomial {key}")
            elif not valid_mu(key[0], key[1], n, self.cap):
                raise ValueError(f"index {key} is not valid in dimension {n}")
            _add(clean, key, c)
        self._coeffs = clean

    # constructors
    @classmethod
    def mu(cls, n, k: int, q: int, lam=None, cap=None, coef=1) -> "ValElement":
        return cls(n, "mu", {(k, q): coef}, lam, cap)

    @classmethod
    def tau(cls, n, k: int, q: int, lam=None, cap=None, coef=1) -> "ValElement":
        return cls(n, "tau", {(k, q): coef}, lam, cap)

    @classmethod
    def monomial(cls, n, a: int, b: int, lam=None, cap=None, coef=1) -> "ValElement":
        return cls(n, "st", {(a, b): coef}, lam, cap)

    @classmethod
    def from_st(cls, p: STPoly, n, lam=None, cap=None) -> "ValElement":
        return cls(n, "st", p.terms, lam, cap)

    @classmethod
    def from_tu(cls, p: TUPoly, n, lam=None, cap=None) -> "ValElement":
        """Interpret a polynomial in ``t`` and ``u = 4s - t^2(1 - lam s)``."""
        c = _cap(n, cap)
        return cls.from_st(tu_to_st(p, c, lam), n, lam, cap)

    @classmethod
    def chi(cls, n, lam=None, cap=None) -> "ValElement":
        return cls.monomial(n, 0, 0, lam, cap)

    @classmethod
    def vol(cls, n: int, lam=None) -> "ValElement":
        return cls.mu(n, 2 * n, n, lam)

    @classmethod
    def zero(cls, n, lam=None, cap=None) -> "ValElement":
        return cls(n, "mu", {}, lam, cap)

    # structure
    @property
    def coeffs(self) -> dict:
        return dict(self._coeffs)

    def items(self):
        return sorted(self._coeffs.items())

    def space(self) -> tuple:
        return (self.n, self.cap, self.lam)

    def _like(self, basis: str, coeffs: Mapping) -> "ValElement":
        obj = ValElement.__new__(ValElement)
        obj.n, obj.cap, obj.basis, obj.lam = self.n, self.cap, basis, self.lam
        obj._coeffs = _clean(coeffs)
        return obj

    def with_lam(self, lam) -> "ValElement":
        """Same coefficients read in another curvature (a relabelling)."""
        out = self._like(self.basis, self._coeffs)
        out.lam = _norm_lam(lam)
        return out

    # conversions
    def to_mu(self) -> "ValElement":
        if self.basis == "mu":
            return self
        if self.basis == "tau":
            return self._like("mu", tau_to_mu_coeffs(self._coeffs))
        return self._like("mu", st_to_mu(STPoly(self._coeffs), self.n, self.cap, self.lam))

    def to_tau(self) -> "ValElement":
        if self.basis == "tau":
            return self
        return self._like("tau", mu_to_tau_coeffs(self.to_mu()._coeffs))

    def to_st(self) -> "ValElement":
        """Canonical polynomial representative (built from the mu coordinates)."""
        p = mu_to_st(self.to_mu()._coeffs, self.cap, self.lam)
        return self._like("st", p.terms)

    def st_poly(self) -> STPoly:
        if self.basis == "st":
            return STPoly(self._coeffs)
        return STPoly(self.to_st()._coeffs)

    def convert(self, target: str) -> "ValElement":
        return {"mu": self.to_mu, "tau": self.to_tau, "st": self.to_st}[target]()

    # linear structure
    def _check(self, other: "ValElement") -> None:
        if self.space() != other.space():
            raise ValueError(f"incompatible spaces {self.space()} and {other.space()}")

    def __add__(self, other):
        if not isinstance(other, ValElement):
            return NotImplemented
        self._check(other)
        a, b = self.to_mu(), other.to_mu()
        out = dict(a._coeffs)
        for k, c in b._coeffs.items():
            _add(out, k, c)
        return self._like("mu", out)

    def __neg__(self) -> "ValElement":
        return self._like(self.basis, {k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "ValElement":
        c = LambdaScalar.coerce(c)
        return self._like(self.basis, {k: v * c for k, v in self._coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, ValElement):
            return multiply(self, other)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other):
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __pow__(self, k: int) -> "ValElement":
        out = ValElement.chi(self.n, self.lam, None if self.n is not None else self.cap)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, ValElement):
            return NotImplemented
        return self.space() == other.space() and self.to_mu()._coeffs == other.to_mu()._coeffs

    def __hash__(self) -> int:
        return hash((self.space(), frozenset(self.to_mu()._coeffs.items())))

    def is_zero(self) -> bool:
        return not self.to_mu()._coeffs

    def coefficient(self, k: int, q: int) -> LambdaScalar:
        return self.to_mu()._coeffs.get((k, q), ZERO)

    def map_coefficients(self, f) -> "ValElement":
        return self._like(self.basis, {k: f(c) for k, c in self._coeffs.items()})

    def subs_lambda(self, lam) -> "ValElement":
        """Specialize a formal curvature to a rational value."""
        if self.lam is not None:
            raise ValueError("curvature is already specialized")
        out = self.map_coefficients(lambda c: c.subs(lam))
        out.lam = Fraction(lam)
        return out

    def __repr__(self) -> str:
        from .scalars import format_lambda_scalar

        name = {"mu": "mu", "tau": "tau", "st": "s^a t^b"}[self.basis]
        body = " + ".join(f"({format_lambda_scalar(c)})*{name}{k}" for k, c in self.items())
        return f"ValElement(n={self.n}, lam={self.lam}, {body or '0'})"


# -- products ------------------------------------------------------------------


@lru_cache(maxsize=None)
def _mu_product(i: Index, j: Index, n: int | None, cap: int, lam: Lam) -> tuple:
    if i > j:
        i, j = j, i
    pi_ = mu_basis_to_st(*i, cap, lam)
    pj = mu_basis_to_st(*j, cap, lam)
    return tuple(sorted(st_to_mu(pi_.mul(pj, cap), n, cap, lam).items()))


def multiply(a: ValElement, b: ValElement) -> ValElement:
    """Alesker product, computed on polynomial representatives."""
    a._check(b)
    if a.basis == "st" and b.basis == "st":
        p = STPoly(a._coeffs).mul(STPoly(b._coeffs), a.cap)
        return a._like("mu", st_to_mu(p, a.n, a.cap, a.lam))
    am, bm = a.to_mu()._coeffs, b.to_mu()._coeffs
    out: dict[Index, LambdaScalar] = {}
    for i, ca in am.items():
        for j, cb in bm.items():
            if i[0] + j[0] > a.cap:
                continue
            cab = ca * cb
            for kq, v in _mu_product(i, j, a.n, a.cap, a.lam):
                _add(out, kq, cab * v)
    return a._like("mu", out)


def s_multiply(v: ValElement) -> ValElement:
    return v._like("mu", s_mul_coeffs(v.to_mu()._coeffs, v.n, v.cap))


def t_multiply(v: ValElement) -> ValElement:
    """Multiplication by ``t``.

    Only at ``lam = 0`` is this given by the closed first-order rule on the mu
    basis; in curved space ``t`` raises the degree by more than one.
    """
    if v.lam == 0:
        return v._like("mu", flat_t_mul_coeffs(v.to_mu()._coeffs, v.n, v.cap))
    return multiply(ValElement.monomial(v.n, 0, 1, v.lam, None if v.n is not None else v.cap), v)


def s_series(v: ValElement, coeffs: Iterable[LambdaScalar]) -> ValElement:
    """``sum_m coeffs[m] s**m * v``."""
    out: dict[Index, LambdaScalar] = {}
    cur = v.to_mu()._coeffs
    for c in coeffs:
        if not cur:
            break
        c = LambdaScalar.coerce(c)
        if c:
            for k, x in cur.items():
                _add(out, k, c * x)
        cur = s_mul_coeffs(cur, v.n, v.cap)
    return v._like("mu", out)


# -- isomorphisms across curvature --------------------------------------------------


def iso_map(v: ValElement, which: str, lam_target=None) -> ValElement:
    """The maps ``I_lam``, its inverse, ``J_lam`` and ``F_lam``.

    ``F`` relabels ``mu_{kq}`` to ``mu^lam_{kq}``; ``J(mu_{kq}) = (1 - lam s) mu^lam_{kq}``;
    ``I = (1 - lam s)^(-2) J`` is an algebra isomorphism with ``I(t) = t sqrt(1 - lam s)``.
    ``I_lambda_inv`` takes an element of curvature ``lam`` back to the flat algebra.
    """
    lam = _norm_lam(lam_target)
    if which == "I_lambda_inv":
        if v.lam != lam:
            raise ValueError("I_lambda_inv expects an element of the target curvature")
        p = v.st_poly()
        out = STPoly()
        for (a, b), c in p.items():
            deg = 2 * a + b
            series = one_minus_lam_s_power(-b, v.cap - deg, lam)
            out = out + series.mul(STPoly.monomial(a, b, c), v.cap)
        flat = ValElement.from_st(out, v.n, 0, None if v.n is not None else v.cap)
        return flat.to_mu()
    if v.lam != 0:
        raise ValueError(f"{which} expects a flat valuation")
    f = v.to_mu().with_lam(lam)
    if which == "F_lambda":
        return f
    lv = lam_value(lam)
    if which == "J_lambda":
        return s_series(f, [ONE, -lv])
    if which == "I_lambda":
        # (1 - lam s)^(-2) J = (1 - lam s)^(-1) F
        order = v.cap // 2
        return s_series(f, [lv**m for m in range(order + 1)])
    raise ValueError(f"unknown isomorphism {which!r}")


def alt_iso(v: ValElement, which: str, lam_target=None) -> ValElement:
    """Further algebra isomorphisms from the flat algebra to curvature ``lam``.

    ``t_over_sqrt``: ``t -> t / sqrt(1 + lam t^2/4)``, ``s -> s``.
    ``tu_identity``: ``t -> t``, ``u -> u``.
    """
    if v.lam != 0:
        raise ValueError("alt_iso expects a flat valuation")
    lam = _norm_lam(lam_target)
    cap = v.cap
    p = v.st_poly()
    kw = dict(n=v.n, lam=lam, cap=None if v.n is not None else cap)
    if which == "tu_identity":
        return ValElement.from_st(tu_to_st(st_to_tu(p), cap, lam), **kw).to_mu()
    if which == "t_over_sqrt":
        quarter = lam_value(lam) * Fraction(1, 4)
        out = STPoly()
        for (a, b), c in p.items():
            deg = 2 * a + b
            # (1 + lam t^2/4)^(-b/2) as a series in t^2
            series = STPoly(
                {(0, 2 * m): quarter**m * gen_binomial(Fraction(-b, 2), m) for m in range((cap - deg) // 2 + 1)}
            )
            out = out + series.mul(STPoly.monomial(a, b, c), cap)
        return ValElement.from_st(out, **kw).to_mu()
    raise ValueError(f"unknown isomorphism {which!r}")


# -- kinematic formulas ----------------------------------------------------------------


def pi_kr_poly(n: int, k: int, r: int) -> TUPoly:
    """The flat valuations spanning the principal kinematic formula, in ``t, u``."""
    lead = LambdaScalar.coerce(Scalar.pi(k) / omega(k)) * ((-1) ** r * double_factorial(2 * n - 4 * r + 1))
    terms = {}
    for i in range(r + 1):
        rat = Fraction(
            (-1) ** i * double_factorial(2 * r - 2 * i - 1),
            math.factorial(2 * r - 2 * i) * math.factorial(2 * i) * double_factorial(2 * n - 2 * r - 2 * i + 1),
        )
        terms[(k - 2 * i, i)] = lead * rat
    return TUPoly(terms)


def kinematic_pairs(n: int) -> list[tuple[int, int]]:
    return [(k, r) for k in range(2 * n + 1) for r in range(min(k, 2 * n - k) // 2 + 1)]


@lru_cache(maxsize=None)
def _pi_kr_mu(n: int, k: int, r: int) -> tuple:
    v = ValElement.from_tu(pi_kr_poly(n, k, r), n, 0)
    return tuple(sorted(v.to_mu()._coeffs.items()))


@lru_cache(maxsize=None)
def _kinematic_chi(n: int, lam: Lam) -> Tensor:
    out: dict = {}
    for k, r in kinematic_pairs(n):
        a = LambdaScalar.coerce(a_nkr(n, k, r))
        left = _pi_kr_mu(n, k, r)
        right = _pi_kr_mu(n, 2 * n - k, r)
        for x, cx in left:
            for y, cy in right:
                _add(out, (x, y), a * cx * cy)
    return Tensor(out, {"n": n, "lam": lam, "legs": ("mu", "mu")})


def kinematic_chi(n: int, lam=None) -> Tensor:
    """``k_lam(chi)`` in mu (x) mu coordinates."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return _kinematic_chi(n, _norm_lam(lam))


def kinematic(v: ValElement) -> Tensor:
    """``k_lam(v) = (v (x) chi) k_lam(chi)``."""
    if v.n is None:
        raise ValueError("kinematic formulas need a finite dimension")
    kc = kinematic_chi(v.n, v.lam)
    vm = v.to_mu()

    def left(x: Index):
        return multiply(vm, ValElement.mu(v.n, *x, v.lam))._coeffs

    return kc.map_legs(left=left)


def tensor_legs(t: Tensor, n: int, lam) -> tuple[list[ValElement], list[ValElement]]:
    xs = sorted(t.left_keys())
    return [ValElement.mu(n, *x, lam) for x in xs], xs


# -- Poincare duality ----------------------------------------------------------------


@lru_cache(maxsize=None)
def _vol_star_basis(k: int, q: int, n: int, lam: Lam) -> LambdaScalar:
    p = mu_basis_to_st(k, q, 2 * n, lam)
    out = ZERO
    w = LambdaScalar.coerce(Scalar(1) / omega(2 * n))
    for (a, b), c in p.items():
        if b % 2:
            continue
        i = b // 2
        out = out + c * w * lam_power(lam, n - i - a) * (binomial(2 * i, i) * binomial(n - a + 1, i + 1))
    return out


def vol_star(v: ValElement) -> LambdaScalar:
    """The functional dual to the volume, applied through polynomial representatives."""
    if v.n is None:
        raise ValueError("vol* needs a finite dimension")
    out = ZERO
    for (k, q), c in v.to_mu()._coeffs.items():
        out = out + c * _vol_star_basis(k, q, v.n, v.lam)
    return out


def vol_star_st(p: STPoly, n: int, lam: Lam) -> LambdaScalar:
    """The same functional evaluated directly on an arbitrary polynomial."""
    out = ZERO
    w = LambdaScalar.coerce(Scalar(1) / omega(2 * n))
    for (a, b), c in p.items():
        if b % 2 or 2 * a + b > 2 * n:
            continue
        i = b // 2
        out = out + c * w * lam_power(lam, n - i - a) * (binomial(2 * i, i) * binomial(n - a + 1, i + 1))
    return out


def pd_pairing(a: ValElement, b: ValElement) -> LambdaScalar:
    return vol_star(multiply(a, b))


def pd_matrix(n: int, lam=None) -> dict[tuple[Index, Index], LambdaScalar]:
    idx = mu_indices(n)
    out = {}
    for x in idx:
        for y in idx:
            v = pd_pairing(ValElement.mu(n, *x, lam), ValElement.mu(n, *y, lam))
            if v:
                out[(x, y)] = v
    return out


# -- templates -----------------------------------------------------------------------


def restrict_val(v: ValElement, m: int) -> ValElement:
    if v.n is not None and m > v.n:
        raise ValueError("can only restrict to a smaller dimension")
    coeffs = drop_invalid(v.to_mu()._coeffs, m, 2 * m)
    return ValElement(m, "mu", coeffs, v.lam)


def eval_on_cpm(v: ValElement, m: int) -> LambdaScalar:
    """Value on the totally geodesic complex projective space of dimension ``m``."""
    if m < 0 or (v.n is not None and m > v.n):
        raise ValueError(f"cannot evaluate on CP^{m} in dimension {v.n}")
    if v.lam == 0:
        raise ValueError("complex projective space needs nonzero curvature")
    r = restrict_val(v, m)
    out = ZERO
    for (k, q), c in r._coeffs.items():
        if k == 2 * q:
            out = out + c * lam_power(v.lam, -q) * LambdaScalar.monomial(Fraction(1, math.factorial(q)), pi=q)
    return out


def eval_on_ball(v: ValElement) -> TrigPoly:
    """Value on the geodesic ball of radius ``r``; needs formal curvature."""
    if v.lam is not None:
        raise ValueError("ball values are produced for formal curvature")
    n = v.n
    out = TrigPoly()
    for (k, q), c in v.to_mu()._coeffs.items():
        coef = c * LambdaScalar.coerce(c_nkq(n, k, q) * Scalar.pi(n) * 2 ** (k - 2 * q))
        out = out + TrigPoly.monomial(k, 2 * n - k, coef)
    return out


def chern_valuation(k: int, n: int, lam=None) -> ValElement:
    if not 0 <= k <= n:
        raise ValueError("Chern index out of range")
    lam = _norm_lam(lam)
    coeffs = {}
    for q in range(k, n + 1):
        c = lam_power(lam, q - k) * LambdaScalar.monomial(math.factorial(q) * binomial(q, k), pi=k - q)
        coeffs[(2 * q, q)] = c
    return ValElement(n, "mu", coeffs, lam)


def chern_from_mu(v: ValElement) -> dict[int, LambdaScalar]:
    """Coordinates in the Chern valuations of an element of span{mu_{2q,q}}."""
    out: dict[int, LambdaScalar] = {}
    for (k, q), c in v.to_mu()._coeffs.items():
        if k != 2 * q:
            raise ValueError("not in the span of the mu_{2q,q}")
        for j in range(q, v.n + 1):
            coef = lam_power(v.lam, j - q) * LambdaScalar.monomial(
                Fraction((-1) ** (j - q) * binomial(j, q), math.factorial(q)), pi=q - j
            )
            _add(out, j, c * coef)
    return out


def value_table_cpn(n: int, lam: Lam) -> dict[tuple[int, int], LambdaScalar]:
    """Values ``(s^a t^b)(CP^n_lam)`` for ``2a + b <= 2n`` through the mu pipeline.

    The template functional is pulled back along ``s`` so every power of ``t``
    is expanded only once.
    """
    cap = 2 * n
    base = {
        (2 * q, q): lam_power(lam, -q) * LambdaScalar.monomial(Fraction(1, math.factorial(q)), pi=q)
        for q in range(n + 1)
    }
    functionals = [base]
    for a in range(1, n + 1):
        prev = functionals[-1]
        cur: dict[Index, LambdaScalar] = {}
        for kq in mu_indices(n):
            img = s_mul_coeffs({kq: ONE}, n, cap)
            val = ZERO
            for key, c in img.items():
                if key in prev:
                    val = val + c * prev[key]
            if val:
                cur[kq] = val
        functionals.append(cur)
    out = {}
    for b in range(cap + 1):
        tb = dict(monomial_to_mu(0, b, n, cap, lam))
        for a in range((cap - b) // 2 + 1):
            f = functionals[a]
            val = ZERO
            for kq, c in tb.items():
                if kq in f:
                    val = val + c * f[kq]
            out[(a, b)] = val
    return out
