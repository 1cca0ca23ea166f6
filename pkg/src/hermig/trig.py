"""Polynomials in the generalized sine and cosine of a radius ``r``.

``sn`` and ``cs`` are the solutions of ``f'' + lam f = 0`` with
``sn(0) = 0, sn'(0) = 1`` and ``cs = sn'``, so ``cs**2 + lam*sn**2 = 1``.
A term may also carry one opaque integral atom ``IntegralAtom(a, b)``
standing for the integral of ``sn**a * cs**b`` from 0 to ``r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .scalars import LAM, ONE, ZERO, LambdaScalar, binomial


@dataclass(frozen=True, order=True)
class IntegralAtom:
    a: int
    b: int

    def __str__(self) -> str:
        return f"int(sn^{self.a}*cs^{self.b})"


Key = tuple[int, int, "IntegralAtom | None"]


def _sort_key(key: Key):
    a, b, atom = key
    return (a, b, (-1, -1) if atom is None else (atom.a, atom.b))


class TrigPoly:
    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Key, object] | None = None, *, reduce: bool = True):
        raw: dict[Key, LambdaScalar] = {}
        for key, c in (terms or {}).items():
            c = LambdaScalar.coerce(c)
            if c:
                raw[key] = raw.get(key, ZERO) + c
        self._terms = _reduce(raw) if reduce else {k: c for k, c in raw.items() if c}

    @classmethod
    def monomial(cls, a: int = 0, b: int = 0, coef=1, atom: IntegralAtom | None = None) -> "TrigPoly":
        return cls({(a, b, atom): coef})

    @classmethod
    def constant(cls, coef) -> "TrigPoly":
        return cls({(0, 0, None): coef})

    @property
    def terms(self) -> dict[Key, LambdaScalar]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: _sort_key(kv[0]))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def _coerce(self, other) -> "TrigPoly | None":
        if isinstance(other, TrigPoly):
            return other
        try:
            return TrigPoly.constant(LambdaScalar.coerce(other))
        except TypeError:
            return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for k, c in o._terms.items():
            v = out.get(k, ZERO) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return TrigPoly._wrap(out)

    __radd__ = __add__

    def __neg__(self) -> "TrigPoly":
        return TrigPoly._wrap({k: -c for k, c in self._terms.items()})

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
        if not isinstance(other, TrigPoly):
            try:
                c = LambdaScalar.coerce(other)
            except TypeError:
                return NotImplemented
            if not c:
                return TrigPoly()
            return TrigPoly._wrap({k: v * c for k, v in self._terms.items()})
        raw: dict[Key, LambdaScalar] = {}
        for (a1, b1, t1), c1 in self._terms.items():
            for (a2, b2, t2), c2 in other._terms.items():
                if t1 is not None and t2 is not None:
                    raise ValueError("product of two integral atoms is not representable")
                key = (a1 + a2, b1 + b2, t1 if t1 is not None else t2)
                raw[key] = raw.get(key, ZERO) + c1 * c2
        return TrigPoly(raw)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "TrigPoly":
        out = TrigPoly.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    @classmethod
    def _wrap(cls, terms: dict[Key, LambdaScalar]) -> "TrigPoly":
        obj = cls.__new__(cls)
        obj._terms = {k: c for k, c in terms.items() if c}
        return obj

    def map_coefficients(self, f) -> "TrigPoly":
        return TrigPoly({k: f(c) for k, c in self._terms.items()})

    def subs_lambda(self, lam) -> "TrigPoly":
        return self.map_coefficients(lambda c: c.subs(lam))

    def at_zero(self) -> LambdaScalar:
        """Value at ``r = 0``: ``sn = 0``, ``cs = 1`` and every atom vanishes."""
        out = ZERO
        for (a, _, atom), c in self._terms.items():
            if a == 0 and atom is None:
                out = out + c
        return out

    def flat_limit(self) -> dict[int, LambdaScalar]:
        """``lam -> 0`` limit as a polynomial in ``r`` (atoms integrated)."""
        out: dict[int, LambdaScalar] = {}
        for (a, _, atom), c in self._terms.items():
            c0 = c.subs(0)
            if atom is None:
                out[a] = out.get(a, ZERO) + c0
            else:
                e = a + atom.a + 1
                out[e] = out.get(e, ZERO) + c0 / (atom.a + 1)
        return {e: c for e, c in out.items() if c}

    def evaluate(self, lam: float | Fraction, r: float) -> float:
        """Float value at a rational curvature and real radius."""
        sn, cs = sn_cs(float(lam), r)
        total = 0.0
        for (a, b, atom), c in self._terms.items():
            v = c.evaluate(lam) * sn**a * cs**b
            if atom is not None:
                v *= integrate_atom(atom, float(lam), r)
            total += v
        return total

    def __repr__(self) -> str:
        return f"TrigPoly({format_trig(self)})"


def _reduce(raw: dict[Key, LambdaScalar]) -> dict[Key, LambdaScalar]:
    out: dict[Key, LambdaScalar] = {}
    for (a, b, atom), c in raw.items():
        if not c:
            continue
        h, b0 = divmod(b, 2)
        # cs^(2h) = (1 - lam sn^2)^h
        for j in range(h + 1):
            coef = c * binomial(h, j) * (-1) ** j * LAM**j
            key = (a + 2 * j, b0, atom)
            v = out.get(key, ZERO) + coef
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def trig_reduce(p: TrigPoly) -> TrigPoly:
    return TrigPoly(p._terms)


def trig_differentiate(p: TrigPoly) -> TrigPoly:
    """Formal derivative in ``r``."""
    raw: dict[Key, LambdaScalar] = {}

    def add(key: Key, c: LambdaScalar) -> None:
        raw[key] = raw.get(key, ZERO) + c

    for (a, b, atom), c in p._terms.items():
        if a:
            add((a - 1, b + 1, atom), c * a)
        if b:
            add((a + 1, b - 1, atom), -c * LAM * b)
        if atom is not None:
            add((a + atom.a, b + atom.b, None), c)
    return TrigPoly(raw)


def sn_cs(lam: float, r: float) -> tuple[float, float]:
    if lam > 0:
        w = math.sqrt(lam)
        return math.sin(w * r) / w, math.cos(w * r)
    if lam < 0:
        w = math.sqrt(-lam)
        return math.sinh(w * r) / w, math.cosh(w * r)
    return r, 1.0


def integrate_atom(atom: IntegralAtom, lam: float, r: float) -> float:
    from scipy.integrate import quad

    def f(x: float) -> float:
        sn, cs = sn_cs(lam, x)
        return sn**atom.a * cs**atom.b

    value, _ = quad(f, 0.0, r, epsabs=1e-14, epsrel=1e-13, limit=200)
    return value


def format_trig(p: TrigPoly) -> str:
    from .scalars import format_lambda_scalar

    if not p._terms:
        return "0"
    parts = []
    for (a, b, atom), c in p.items():
        f = [f"({format_lambda_scalar(c)})"]
        if a:
            f.append(f"sn^{a}")
        if b:
            f.append("cs")
        if atom is not None:
            f.append(str(atom))
        parts.append("*".join(f))
    return " + ".join(parts)


SN = TrigPoly.monomial(1, 0)
CS = TrigPoly.monomial(0, 1)
ONE_T = TrigPoly.constant(ONE)
