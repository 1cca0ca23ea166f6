"""Exact coefficient rings.

``Scalar`` is a Laurent polynomial in pi with rational coefficients and
``LambdaScalar`` adds a second Laurent variable ``lam`` for the curvature.
Both are immutable and hashable.  Rationals are ``fractions.Fraction``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

Number = Union[int, Fraction]


def _frac(x: Number) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class Scalar:
    """Finite sum of ``rational * pi**m`` with ``m`` an integer."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Number] | Number | None = None):
        if terms is None:
            clean: dict[int, Fraction] = {}
        elif isinstance(terms, (int, Fraction)):
            clean = {0: Fraction(terms)} if terms else {}
        else:
            clean = {int(e): _frac(c) for e, c in terms.items() if c}
        self._terms = clean
        self._hash: int | None = None

    @classmethod
    def pi(cls, exponent: int = 1, coef: Number = 1) -> "Scalar":
        return cls({exponent: coef})

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def _coerce(self, other) -> "Scalar | None":
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for e, c in o._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Scalar(out)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out: dict[int, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in o._terms.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return Scalar(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if len(o._terms) != 1:
            raise ZeroDivisionError("can only divide by a nonzero monomial")
        (e, c), = o._terms.items()
        return Scalar({e1 - e: c1 / c for e1, c1 in self._terms.items()})

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int) -> "Scalar":
        if k < 0:
            return Scalar(1) / (self ** (-k))
        out = Scalar(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            if isinstance(other, LambdaScalar):
                return other == self
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def evaluate(self) -> float:
        return sum(float(c) * math.pi ** e for e, c in self._terms.items())

    def __repr__(self) -> str:
        return f"Scalar({format_scalar(self)})"


def format_scalar(x: Scalar) -> str:
    if not x._terms:
        return "0"
    parts = []
    for e in sorted(x._terms):
        c = x._terms[e]
        if e == 0:
            parts.append(str(c))
        elif e == 1:
            parts.append(f"{c}*pi")
        else:
            parts.append(f"{c}*pi^{e}")
    return " + ".join(parts)


class LambdaScalar:
    """Laurent polynomial in ``lam`` with ``Scalar`` coefficients.

    Stored flat as ``{(lam_exp, pi_exp): Fraction}``.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], Number] | None = None):
        self._terms: dict[tuple[int, int], Fraction] = (
            {k: _frac(c) for k, c in terms.items() if c} if terms else {}
        )
        self._hash: int | None = None

    @classmethod
    def _raw(cls, terms: dict[tuple[int, int], Fraction]) -> "LambdaScalar":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def coerce(cls, x) -> "LambdaScalar":
        if isinstance(x, LambdaScalar):
            return x
        if isinstance(x, Scalar):
            return cls._raw({(0, e): c for e, c in x._terms.items()})
        if isinstance(x, (int, Fraction)):
            return cls._raw({(0, 0): Fraction(x)} if x else {})
        raise TypeError(f"cannot coerce {type(x).__name__} to LambdaScalar")

    @classmethod
    def monomial(cls, coef: Number = 1, lam: int = 0, pi: int = 0) -> "LambdaScalar":
        return cls._raw({(lam, pi): Fraction(coef)} if coef else {})

    @classmethod
    def from_scalars(cls, terms: Mapping[int, Scalar | Number]) -> "LambdaScalar":
        out: dict[tuple[int, int], Fraction] = {}
        for le, s in terms.items():
            s = s if isinstance(s, Scalar) else Scalar(s)
            for pe, c in s._terms.items():
                out[(le, pe)] = c
        return cls._raw(out)

    @property
    def terms(self) -> dict[int, Scalar]:
        """Map from lam-exponent to its ``Scalar`` coefficient."""
        grouped: dict[int, dict[int, Fraction]] = {}
        for (le, pe), c in self._terms.items():
            grouped.setdefault(le, {})[pe] = c
        return {le: Scalar(d) for le, d in grouped.items()}

    @property
    def raw_terms(self) -> dict[tuple[int, int], Fraction]:
        return dict(self._terms)

    @property
    def polynomial_flag(self) -> bool:
        return all(le >= 0 for le, _ in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __add__(self, other):
        try:
            o = LambdaScalar.coerce(other)
        except TypeError:
            return NotImplemented
        if not o._terms:
            return self
        if not self._terms:
            return o
        out = dict(self._terms)
        for k, c in o._terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                del out[k]
        return LambdaScalar._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "LambdaScalar":
        return LambdaScalar._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        try:
            o = LambdaScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        try:
            o = LambdaScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return ZERO
            return LambdaScalar._raw({k: c * other for k, c in self._terms.items()})
        try:
            o = LambdaScalar.coerce(other)
        except TypeError:
            return NotImplemented
        out: dict[tuple[int, int], Fraction] = {}
        for (l1, p1), c1 in self._terms.items():
            for (l2, p2), c2 in o._terms.items():
                key = (l1 + l2, p1 + p2)
                out[key] = out.get(key, 0) + c1 * c2
        return LambdaScalar._raw({k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return LambdaScalar._raw({k: c / other for k, c in self._terms.items()})
        try:
            o = LambdaScalar.coerce(other)
        except TypeError:
            return NotImplemented
        if len(o._terms) != 1:
            raise ZeroDivisionError("can only divide by a nonzero monomial")
        ((l2, p2), c2), = o._terms.items()
        return LambdaScalar._raw(
            {(l1 - l2, p1 - p2): c1 / c2 for (l1, p1), c1 in self._terms.items()}
        )

    def __rtruediv__(self, other):
        return LambdaScalar.coerce(other) / self

    def __pow__(self, k: int) -> "LambdaScalar":
        if k < 0:
            return ONE / (self ** (-k))
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        try:
            o = LambdaScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def subs(self, lam: Number) -> "LambdaScalar":
        """Specialize ``lam`` to a rational value (a ring homomorphism)."""
        lam = Fraction(lam)
        out: dict[tuple[int, int], Fraction] = {}
        for (le, pe), c in self._terms.items():
            if le and not lam:
                if le < 0:
                    raise ZeroDivisionError("negative lam power at lam = 0")
                continue
            out[(0, pe)] = out.get((0, pe), 0) + c * lam**le
        return LambdaScalar._raw({k: c for k, c in out.items() if c})

    def lam_degrees(self) -> tuple[int, int]:
        les = [le for le, _ in self._terms]
        return (min(les), max(les)) if les else (0, 0)

    def to_scalar(self) -> Scalar:
        if any(le for le, _ in self._terms):
            raise ValueError("element depends on lam")
        return Scalar({pe: c for (_, pe), c in self._terms.items()})

    def evaluate(self, lam: float | Fraction = 0) -> float:
        return sum(
            float(c) * float(lam) ** le * math.pi**pe
            for (le, pe), c in self._terms.items()
        )

    def sorted_items(self) -> list[tuple[tuple[int, int], Fraction]]:
        return sorted(self._terms.items())

    def __repr__(self) -> str:
        return f"LambdaScalar({format_lambda_scalar(self)})"


def format_lambda_scalar(x: LambdaScalar) -> str:
    if not x._terms:
        return "0"
    parts = []
    for (le, pe), c in sorted(x._terms.items()):
        factors = [str(c)]
        if le:
            factors.append("lam" if le == 1 else f"lam^{le}")
        if pe:
            factors.append("pi" if pe == 1 else f"pi^{pe}")
        parts.append("*".join(factors))
    return " + ".join(parts)


ZERO = LambdaScalar()
ONE = LambdaScalar.monomial(1)
LAM = LambdaScalar.monomial(1, lam=1)
PI = LambdaScalar.monomial(1, pi=1)
INV_PI = LambdaScalar.monomial(1, pi=-1)


def lam_value(lam: Fraction | None) -> LambdaScalar:
    """The curvature as a coefficient: formal ``lam`` or a rational constant."""
    return LAM if lam is None else LambdaScalar.coerce(Fraction(lam))


def lam_power(lam: Fraction | None, k: int) -> LambdaScalar:
    if lam is None:
        return LambdaScalar.monomial(1, lam=k)
    return LambdaScalar.coerce(Fraction(lam) ** k)


# -- combinatorial constants -------------------------------------------------


def binomial(n: int, k: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def gen_binomial(e: Fraction, k: int) -> Fraction:
    """``e choose k`` for rational ``e``."""
    out = Fraction(1)
    for i in range(k):
        out = out * (e - i) / (i + 1)
    return out


def double_factorial(n: int) -> int:
    if n < -1:
        raise ValueError(f"double factorial undefined for {n}")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def rising(a: Fraction, m: int) -> Fraction:
    out = Fraction(1)
    for i in range(m):
        out *= a + i
    return out


@lru_cache(maxsize=None)
def omega(k: int) -> Scalar:
    """Volume of the unit ball in R^k.  ``omega(-1) = 1/pi`` by the Gamma formula."""
    if k < -1:
        raise ValueError(f"omega_{k} is not defined")
    if k == -1:
        return Scalar.pi(-1)
    if k % 2 == 0:
        return Scalar.pi(k // 2, Fraction(1, math.factorial(k // 2)))
    return Scalar.pi((k - 1) // 2, Fraction(2 ** ((k + 1) // 2), double_factorial(k)))


def alpha(n: int) -> Scalar:
    return (n + 1) * omega(n + 1)


def c_nkq(n: int, k: int, q: int) -> Scalar:
    if not (0 <= q and 2 * q <= k <= 2 * n and n - k + q >= 0):
        raise ValueError(f"c_nkq undefined for {(n, k, q)}")
    den = math.factorial(q) * math.factorial(n - k + q) * math.factorial(k - 2 * q)
    return Scalar(Fraction(1, den)) / omega(2 * n - k)


def a_nkr(n: int, k: int, r: int) -> Scalar:
    if not (n >= 1 and 0 <= k <= 2 * n and 0 <= 2 * r <= min(k, 2 * n - k)):
        raise ValueError(f"a_nkr undefined for {(n, k, r)}")
    rat = Fraction(math.factorial(n - r), 8**r * math.factorial(2 * n - 4 * r))
    rat *= Fraction(double_factorial(2 * n - 2 * r + 1), double_factorial(2 * n - 4 * r + 1))
    rat /= binomial(n, 2 * r)
    return omega(k) * omega(2 * n - k) * Scalar.pi(-n, rat)


def constants(kind: str, *indices: int) -> Scalar:
    """Dispatch over the named constants used throughout the package."""
    if kind == "omega":
        (k,) = indices
        if k < 0:
            raise ValueError("omega needs k >= 0")
        return omega(k)
    if kind == "alpha":
        (n,) = indices
        if n < 0:
            raise ValueError("alpha needs n >= 0")
        return alpha(n)
    if kind == "double_factorial":
        (n,) = indices
        return Scalar(double_factorial(n))
    if kind == "binomial":
        n, k = indices
        if n < 0:
            raise ValueError("binomial needs n >= 0")
        return Scalar(binomial(n, k))
    if kind == "c_nkq":
        return c_nkq(*indices)
    if kind == "a_nkr":
        return a_nkr(*indices)
    raise ValueError(f"unknown constant {kind!r}")


def binomial_series(exponent: Fraction | int, order: int) -> list[Fraction]:
    """Coefficients of ``(1 - x)**exponent`` up to ``x**order`` inclusive."""
    e = Fraction(exponent)
    return [gen_binomial(e, j) * (-1) ** j for j in range(order + 1)]


def series_mul(a: Iterable[LambdaScalar], b: Iterable[LambdaScalar], order: int) -> list[LambdaScalar]:
    a, b = list(a), list(b)
    out = [ZERO] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        if not x:
            continue
        for j, y in enumerate(b[: order + 1 - i]):
            if y:
                out[i + j] = out[i + j] + x * y
    return out


def one_minus_lam_x_power(half_exp: int, order: int, lam: Fraction | None = None) -> list[LambdaScalar]:
    """Truncated ``(1 - lam*x)**(half_exp/2)`` as a list of coefficients of ``x**j``.

    ``x`` is a nilpotent symbol with ``x**(order+1) = 0``.
    """
    coeffs = binomial_series(Fraction(half_exp, 2), order)
    return [c * lam_power(lam, j) for j, c in enumerate(coeffs)]
