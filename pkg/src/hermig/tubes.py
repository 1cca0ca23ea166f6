"""Tube formulas as exact identities in the ``sn, cs`` ring.

All functions work with formal ``lam`` since ``TrigPoly`` reduces with the
formal symbol.  Values at a rational curvature come from ``subs_lambda``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping

from .curvature import CurvElement, Key, _first_variation, globalize
from .scalars import LAM, ONE, ZERO, LambdaScalar, Scalar, binomial, binomial_series, omega
from .trig import IntegralAtom, TrigPoly, trig_differentiate
from .valuations import Index, mu_basis_to_st, valid_mu

INV_PI = LambdaScalar.monomial(1, pi=-1)


def _omega(k: int) -> LambdaScalar:
    return LambdaScalar.coerce(omega(k))


def _sncs(a: int, b: int, coef=1) -> TrigPoly:
    return TrigPoly.monomial(a, b, coef)


def global_tube(n: int) -> dict[Index, TrigPoly]:
    """``sum_k omega_{2n-k} sn^(2n-k) cs^k mu_k`` in mu coordinates."""
    out = {}
    for k in range(2 * n + 1):
        coef = _sncs(2 * n - k, k, _omega(2 * n - k))
        for q in range(k // 2 + 1):
            if valid_mu(k, q, n, 2 * n):
                out[(k, q)] = coef
    return out


def ball_tube(n: int) -> dict[Index, TrigPoly]:
    """``k_lam(chi)(., B_r)``: the second leg of the principal kinematic formula evaluated on a ball."""
    from .valuations import ValElement, eval_on_ball, kinematic_chi

    out: dict[Index, TrigPoly] = {}
    cache: dict[Index, TrigPoly] = {}
    for (x, y), c in kinematic_chi(n, None).items():
        if y not in cache:
            cache[y] = eval_on_ball(ValElement.mu(n, *y))
        out[x] = out.get(x, TrigPoly()) + cache[y] * c
    return {k: v for k, v in out.items() if v}


def local_tube(n: int) -> dict[Key, TrigPoly]:
    """The curvature measure ``T_r`` in Delta/N coordinates.

    ``T_r = vol + sum_k omega_{2n-k} dmu_k int_0^r sn^(2n-k) cs^k``, where
    ``dmu_k`` is the first variation of ``mu_k``.
    """
    out: dict[Key, TrigPoly] = {("D", 2 * n, n): TrigPoly.constant(ONE)}
    for k in range(2 * n + 1):
        atom = TrigPoly.monomial(0, 0, _omega(2 * n - k), IntegralAtom(2 * n - k, k))
        for key, c in _first_variation(k, n).to_dn().items():
            out[key] = out.get(key, TrigPoly()) + atom * c
    return {k: v for k, v in out.items() if v}


def curv_trig_globalize(d: Mapping[Key, TrigPoly], n: int) -> dict[Index, TrigPoly]:
    out: dict[Index, TrigPoly] = {}
    for key, p in d.items():
        for idx, c in globalize(CurvElement(n, {key: 1}), None).items():
            out[idx] = out.get(idx, TrigPoly()) + p * c
    return {k: v for k, v in out.items() if v}


def differentiate(d: Mapping) -> dict:
    out = {k: trig_differentiate(v) for k, v in d.items()}
    return {k: v for k, v in out.items() if v}


def local_tube_flat(n: int) -> dict[Key, dict[int, LambdaScalar]]:
    """``lam -> 0`` limit of ``T_r`` as polynomials in ``r``."""
    return {k: v.flat_limit() for k, v in local_tube(n).items() if v.flat_limit()}


# -- complex submanifolds --------------------------------------------------------------


def _neg_ratio(e: int) -> LambdaScalar:
    return (-LAM * INV_PI) ** e if e else ONE


def complex_tube(n: int) -> dict[int, TrigPoly]:
    """Tube coefficient of each Chern curvature measure ``C_j``."""
    out = {}
    for j in range(n + 1):
        p = TrigPoly()
        for k in range(j + 1):
            c = _omega(2 * n - 2 * k) * _neg_ratio(j - k) * Fraction(binomial(j, k), math.factorial(k))
            p = p + _sncs(2 * n - 2 * k, 2 * k, c)
        out[j] = p
    return out


def complex_tube_from_global(n: int) -> dict[int, TrigPoly]:
    """Push the global tube through ``mu_{2q,q} -> (1/q!) sum_k binom(k,q) (-lam/pi)^(k-q) Ch_k``."""
    g = global_tube(n)
    out: dict[int, TrigPoly] = {}
    for (k, q), p in g.items():
        if k != 2 * q:
            continue
        for j in range(q, n + 1):
            c = _neg_ratio(j - q) * Fraction(binomial(j, q), math.factorial(q))
            out[j] = out.get(j, TrigPoly()) + p * c
    return {k: v for k, v in out.items() if v}


def chern_value_cpm(j: int, m: int) -> LambdaScalar:
    """``c_j(CP^m_lam) = (pi/lam)^j binom(m+1, j+1)``."""
    if j > m:
        return ZERO
    return LambdaScalar.monomial(binomial(m + 1, j + 1), lam=-j, pi=j)


def cpm_tube(m: int, n: int) -> TrigPoly:
    """Volume of the ``r``-tube around ``CP^m`` inside ``CP^n_lam``."""
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")
    lead = Fraction(1, math.factorial(n))
    out = TrigPoly()
    for k in range(m + 1):
        c = LambdaScalar.monomial(lead * binomial(n, k), lam=-k, pi=n)
        out = out + _sncs(2 * n - 2 * k, 2 * k, c)
    return out


def cpm_tube_from_chern(m: int, n: int) -> TrigPoly:
    out = TrigPoly()
    for j, p in complex_tube(n).items():
        c = chern_value_cpm(j, m)
        if c:
            out = out + p * c
    return out


# -- totally real submanifolds --------------------------------------------------------


def _series_scale(coeffs: list[Fraction], step: int, base: LambdaScalar, order: int) -> list[LambdaScalar]:
    """Coefficients in ``t`` of ``sum_j c_j (base t^step)^j`` up to ``t^order``."""
    out = [ZERO] * (order + 1)
    for j, c in enumerate(coeffs):
        if j * step > order:
            break
        out[j * step] = out[j * step] + base**j * c
    return out


def _mul(a: list[LambdaScalar], b: list[LambdaScalar], order: int) -> list[LambdaScalar]:
    out = [ZERO] * (order + 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b[: order + 1 - i]):
                if y:
                    out[i + j] = out[i + j] + x * y
    return out


def totally_real_substitute(p, order: int) -> list[LambdaScalar]:
    """Substitute ``s = t^2/(4 + lam t^2)`` into an ``s, t`` polynomial, as a ``t``-series."""
    # s = (t^2/4) (1 + lam t^2/4)^(-1)
    geo = _series_scale(binomial_series(-1, order), 2, LAM * Fraction(-1, 4), order)
    s_series = _mul([ZERO, ZERO, LambdaScalar.coerce(Fraction(1, 4))], geo, order)
    powers = [[ONE] + [ZERO] * order]
    out = [ZERO] * (order + 1)
    for (a, b), c in p.items():
        while len(powers) <= a:
            powers.append(_mul(powers[-1], s_series, order))
        for i, x in enumerate(powers[a]):
            if x and i + b <= order:
                out[i + b] = out[i + b] + x * c
    return out


def totally_real_target(k: int, order: int) -> list[LambdaScalar]:
    """``(pi^k/(k! omega_k)) t^k (1 + lam t^2/4)^(-k/2-1)`` as a ``t``-series."""
    lead = LambdaScalar.coerce(Scalar.pi(k) / omega(k)) * Fraction(1, math.factorial(k))
    series = _series_scale(binomial_series(Fraction(-k - 2, 2), order), 2, LAM * Fraction(-1, 4), order)
    out = [ZERO] * (order + 1)
    for i, x in enumerate(series):
        if i + k <= order:
            out[i + k] = x * lead
    return out


def totally_real_tube(n: int, k: int) -> dict[int, LambdaScalar]:
    """Residual of the intrinsic formula for ``mu_k`` on totally real submanifolds.

    Returns the nonzero ``t``-coefficients (up to ``t^(2n)``) of the difference;
    an empty dict means the identity holds.
    """
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    cap = 2 * n
    p = None
    for q in range(k // 2 + 1):
        term = mu_basis_to_st(k, q, cap, None)
        p = term if p is None else p + term
    lhs = totally_real_substitute(p, cap)
    rhs = totally_real_target(k, cap)
    return {i: a - b for i, (a, b) in enumerate(zip(lhs, rhs)) if a - b}


def tube_rows(d: Mapping, label: str = "mu") -> list[tuple]:
    """Flatten a map ``index -> TrigPoly`` into sorted CSV-ready rows."""
    rows = []
    for idx in sorted(d):
        for (a, b, atom), c in d[idx].items():
            rows.append((idx, c, a, b, atom))
    return rows


__all__ = [
    "ball_tube",
    "complex_tube",
    "complex_tube_from_global",
    "cpm_tube",
    "cpm_tube_from_chern",
    "curv_trig_globalize",
    "differentiate",
    "global_tube",
    "local_tube",
    "local_tube_flat",
    "totally_real_substitute",
    "totally_real_target",
    "totally_real_tube",
    "tube_rows",
]
