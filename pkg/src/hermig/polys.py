"""Sparse bivariate polynomials over ``LambdaScalar``.

The two variables are weighted, ``s`` and ``u`` having weight 2 and ``t``
weight 1.  ``STPoly`` keys are ``(s_exp, t_exp)``; ``TUPoly`` keys are
``(t_exp, u_exp)``.  Products can be truncated at a weighted degree, which
is how the nilpotency ``s**(n+1) = 0`` and friends are imposed.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator, Mapping

from .scalars import ONE, ZERO, LambdaScalar, lam_power, lam_value, one_minus_lam_x_power


class _Poly:
    __slots__ = ("_terms",)
    weights: tuple[int, int] = (2, 1)

    def __init__(self, terms: Mapping[tuple[int, int], object] | None = None):
        out: dict[tuple[int, int], LambdaScalar] = {}
        for k, c in (terms or {}).items():
            c = LambdaScalar.coerce(c)
            if c:
                v = out.get(k, ZERO) + c
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        self._terms = out

    @classmethod
    def _wrap(cls, terms: dict[tuple[int, int], LambdaScalar]):
        obj = cls.__new__(cls)
        obj._terms = {k: c for k, c in terms.items() if c}
        return obj

    @classmethod
    def monomial(cls, i: int, j: int, coef=1):
        return cls({(i, j): coef})

    @property
    def terms(self) -> dict[tuple[int, int], LambdaScalar]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[tuple[int, int], LambdaScalar]]:
        return iter(sorted(self._terms.items()))

    def degree(self, key: tuple[int, int]) -> int:
        return self.weights[0] * key[0] + self.weights[1] * key[1]

    def max_degree(self) -> int:
        return max((self.degree(k) for k in self._terms), default=-1)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        if type(other) is not type(self):
            try:
                other = type(self).monomial(0, 0, LambdaScalar.coerce(other))
            except TypeError:
                return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, ZERO) + c
        return self._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "_Poly":
        c = LambdaScalar.coerce(c)
        return self._wrap({k: v * c for k, v in self._terms.items()})

    def mul(self, other, max_degree: int | None = None):
        if type(other) is not type(self):
            return self.scale(other)
        out: dict[tuple[int, int], LambdaScalar] = {}
        w0, w1 = self.weights
        for (i1, j1), c1 in self._terms.items():
            d1 = w0 * i1 + w1 * j1
            for (i2, j2), c2 in other._terms.items():
                if max_degree is not None and d1 + w0 * i2 + w1 * j2 > max_degree:
                    continue
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, ZERO) + c1 * c2
        return self._wrap(out)

    def __mul__(self, other):
        if type(other) is type(self):
            return self.mul(other)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other):
        return self.__mul__(other)

    def pow(self, k: int, max_degree: int | None = None):
        out = type(self).monomial(0, 0, ONE)
        for _ in range(k):
            out = out.mul(self, max_degree)
        return out

    def truncate(self, max_degree: int):
        return self._wrap({k: c for k, c in self._terms.items() if self.degree(k) <= max_degree})

    def homogeneous_part(self, degree: int):
        return self._wrap({k: c for k, c in self._terms.items() if self.degree(k) == degree})

    def diff(self, var: int):
        out: dict[tuple[int, int], LambdaScalar] = {}
        for (i, j), c in self._terms.items():
            e = (i, j)[var]
            if e:
                key = (i - 1, j) if var == 0 else (i, j - 1)
                out[key] = c * e
        return self._wrap(out)

    def map_coefficients(self, f):
        return self._wrap({k: f(c) for k, c in self._terms.items()})

    def __repr__(self) -> str:
        names = self.names
        parts = []
        for (i, j), c in self.items():
            from .scalars import format_lambda_scalar

            mono = "*".join(
                f"{n}^{e}" if e > 1 else n for n, e in zip(names, (i, j)) if e
            )
            parts.append(f"({format_lambda_scalar(c)})" + (f"*{mono}" if mono else ""))
        return f"{type(self).__name__}({' + '.join(parts) or '0'})"


class STPoly(_Poly):
    """Polynomial in ``s`` (weight 2) and ``t`` (weight 1)."""

    names = ("s", "t")

    def d_ds(self) -> "STPoly":
        return self.diff(0)

    def d_dt(self) -> "STPoly":
        return self.diff(1)


class TUPoly(_Poly):
    """Polynomial in ``t`` (weight 1) and ``u`` (weight 2)."""

    names = ("t", "u")
    weights = (1, 2)

    def d_dt(self) -> "TUPoly":
        return self.diff(0)

    def d_du(self) -> "TUPoly":
        return self.diff(1)


S = STPoly.monomial(1, 0)
T = STPoly.monomial(0, 1)


def one_minus_lam_s_power(half_exp: int, max_degree: int, lam: Fraction | None = None) -> STPoly:
    """``(1 - lam*s)**(half_exp/2)`` truncated at weighted degree ``max_degree``."""
    order = max(max_degree, 0) // 2
    coeffs = one_minus_lam_x_power(half_exp, order, lam)
    return STPoly({(j, 0): c for j, c in enumerate(coeffs)})


def u_lambda(lam: Fraction | None = None) -> STPoly:
    """``u = 4s - t**2 (1 - lam s)`` in the ``s, t`` coordinates of curvature ``lam``."""
    return STPoly({(1, 0): 4, (0, 2): -1, (1, 2): lam_value(lam)})


def tu_to_st(p: TUPoly, max_degree: int, lam: Fraction | None = 0) -> STPoly:
    u = u_lambda(lam)
    out = STPoly()
    upow: dict[int, STPoly] = {0: STPoly.monomial(0, 0)}
    for (i, j), c in p.items():
        if j not in upow:
            upow[j] = u.pow(j, max_degree)
        term = upow[j].mul(STPoly.monomial(0, i, c), max_degree)
        out = out + term
    return out.truncate(max_degree)


def st_to_tu(p: STPoly) -> TUPoly:
    """Flat change of variables ``s = (u + t**2)/4``."""
    base = TUPoly({(2, 0): Fraction(1, 4), (0, 1): Fraction(1, 4)})
    out = TUPoly()
    for (a, b), c in p.items():
        out = out + base.pow(a).mul(TUPoly.monomial(b, 0, c))
    return out
