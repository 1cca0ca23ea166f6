"""Batch verification of the structural identities, the conjecture and numerical identities.

Every check returns a report ``{"suite", "n", "lambda", "status", "witness"}``;
the witness of a failure is JSON and names the first counterexample.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator

from .curvature import (
    CurvElement,
    act_s,
    act_t,
    act_t_lambda,
    act_val_lambda,
    angular_predicate,
    angular_test,
    curv_indices,
    d1,
    d2,
    ell,
    free_decompose,
    g_poly,
    glob_kernel_basis,
    globalize,
    h_prime_0,
    nn,
    nn_inverse,
    recompose,
    restrict_curv,
    sigma_map,
    valid,
)
from .local_kinematic import curv_tensor_apply, global_from_local, local_kinematic, rho_kr_poly
from .polys import STPoly
from .scalars import ZERO, LambdaScalar, binomial
from .serialize import format_lambda, to_json_obj
from .tensor import Tensor
from .valuations import (
    ValElement,
    iso_map,
    kinematic,
    kinematic_chi,
    kinematic_pairs,
    mu_indices,
    multiply,
    pd_matrix,
    pi_kr_poly,
    restrict_val,
    s_multiply,
    t_multiply,
    valid_mu,
    value_table_cpn,
    vol_star,
)

DEFAULT_LAMBDAS: tuple = (Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 3))
WORKERS_ENV = "HERMIG_WORKERS"


class CheckFailed(Exception):
    def __init__(self, witness: dict):
        super().__init__(json.dumps(witness, sort_keys=True))
        self.witness = witness


def _expect(ok: bool, check: str, **data) -> None:
    if not ok:
        raise CheckFailed({"check": check, **{k: to_json_obj(v) for k, v in data.items()}})


# -- tensors with three legs ---------------------------------------------------------


def _coassoc(c: CurvElement) -> tuple[dict, dict]:
    n = c.n
    k = local_kinematic(c)
    left: dict = {}
    right: dict = {}
    for (x, y), a in k.items():
        for (y1, y2), b in local_kinematic(CurvElement(n, {y: 1})).items():
            key = (x, y1, y2)
            left[key] = left.get(key, ZERO) + a * b
        for (x1, x2), b in local_kinematic(CurvElement(n, {x: 1})).items():
            key = (x1, x2, y)
            right[key] = right.get(key, ZERO) + a * b
    clean = lambda d: {k: v for k, v in d.items() if v}  # noqa: E731
    return clean(left), clean(right)


def _val_coassoc(n: int, lam) -> tuple[dict, dict]:
    kc = kinematic_chi(n, lam)
    left: dict = {}
    right: dict = {}
    for (x, y), a in kc.items():
        for (y1, y2), b in kinematic(ValElement.mu(n, *y, lam)).items():
            key = (x, y1, y2)
            left[key] = left.get(key, ZERO) + a * b
        for (x1, x2), b in kinematic(ValElement.mu(n, *x, lam)).items():
            key = (x1, x2, y)
            right[key] = right.get(key, ZERO) + a * b
    clean = lambda d: {k: v for k, v in d.items() if v}  # noqa: E731
    return clean(left), clean(right)


def _basis(n: int, families: str = "DN") -> Iterator[CurvElement]:
    basis = "BG" if families in ("B", "G", "BG") else "DN"
    for key in curv_indices(n, families):
        yield CurvElement(n, {key: 1}, basis)


# -- suites ----------------------------------------------------------------------------


def suite_coalgebra(n: int, lam) -> None:
    for c in _basis(n):
        k = local_kinematic(c)
        _expect(k.is_symmetric(), "K cocommutative", element=c, tensor=k)
        a, b = _coassoc(c)
        _expect(a == b, "K coassociative", element=c)
    a, b = _val_coassoc(n, lam)
    _expect(a == b, "k coassociative")
    _expect(kinematic_chi(n, lam).is_symmetric(), "k cocommutative")
    for x in mu_indices(n):
        v0 = ValElement.mu(n, *x, 0)
        lhs = kinematic(iso_map(v0, "J_lambda", lam))
        j = lambda y: iso_map(ValElement.mu(n, *y, 0), "J_lambda", lam).to_mu()._coeffs  # noqa: E731
        rhs = kinematic(v0).map_legs(left=j, right=j)
        _expect(lhs == rhs, "J_lambda coalgebra morphism", index=list(x))


def suite_ftaig(n: int, lam) -> None:
    """``(pd (x) pd) k = m* pd`` as matrices over the mu basis."""
    idx = mu_indices(n)
    pd = pd_matrix(n, lam)
    prod = {}
    for x in idx:
        for y in idx:
            prod[(x, y)] = multiply(ValElement.mu(n, *x, lam), ValElement.mu(n, *y, lam))
    for phi in idx:
        kphi = kinematic(ValElement.mu(n, *phi, lam))
        for p1 in idx:
            for p2 in idx:
                lhs = ZERO
                for (x, y), c in kphi.items():
                    a = pd.get((x, p1))
                    b = pd.get((y, p2))
                    if a and b:
                        lhs = lhs + c * a * b
                rhs = vol_star(multiply(ValElement.mu(n, *phi, lam), prod[(p1, p2)]))
                _expect(lhs == rhs, "fundamental theorem", phi=list(phi), psi1=list(p1), psi2=list(p2), lhs=lhs, rhs=rhs)


def suite_module(n: int, lam) -> None:
    s, t = STPoly.monomial(1, 0), STPoly.monomial(0, 1)
    from .local_kinematic import act_left

    for c in _basis(n):
        k = local_kinematic(c)
        for op, p, name in ((act_s, s, "s"), (act_t, t, "t")):
            lhs = local_kinematic(op(c))
            _expect(lhs == act_left(p, k, n), f"K({name} c) = ({name} x chi) K(c)", element=c)
            _expect(lhs == act_left(p, k.swap(), n).swap(), f"K({name} c) = (chi x {name}) K(c)", element=c)
        _expect(act_s(act_t(c)) == act_t(act_s(c)), "[s, t] = 0", element=c)
        tl = act_t_lambda(c, lam)
        _expect(act_t_lambda(act_s(c), lam) == act_s(tl), "t_lam commutes with s", element=c)
        _expect(act_t_lambda(act_t(c), lam) == act_t(tl), "t_lam commutes with t", element=c)
        sv = ValElement.monomial(n, 1, 0, lam)
        _expect(act_val_lambda(sv, c) == act_s(c), "s acts independently of lam", element=c)
    for c in _basis(n, "B"):
        img = act_s(c.to_dn()).to_bg()
        _expect(all(f == "B" for f, _, _ in img.coeffs), "s preserves span{B}", element=c, image=img)


def suite_angularity(n: int, lam) -> None:
    for key in curv_indices(n, "D"):
        c = CurvElement(n, {key: 1})
        img = act_t_lambda(c, lam)
        _expect(angular_test(img), "t_lam Delta angular", element=c, image=img)


def suite_local_kin_derivation(n: int, lam) -> None:
    """Closure relations between ``K``, ``H'_0``, ``D_1``, ``D_2`` and ``Sigma``."""
    for x in mu_indices(n):
        p = ValElement.mu(n, *x, 0)
        _expect(h_prime_0(ell(p)) == d1(p), "H'_0 l = D_1", index=list(x))
        _expect(h_prime_0(nn(p)) == d2(p), "H'_0 n = D_2", index=list(x))
        _expect(sigma_map(d2(p)) == nn(p), "Sigma D_2 = n", index=list(x))
    for k, r in kinematic_pairs(n):
        a = nn(rho_kr_poly(n, k, r), n)
        b = sigma_map(d1(ValElement.from_tu(pi_kr_poly(n, k, r), n, 0)))
        _expect(a == b, "n(rho) = Sigma D_1 pi", k=k, r=r)
    for c in _basis(n):
        h = curv_tensor_apply(local_kinematic(c), n, left=h_prime_0, right=h_prime_0)
        _expect(not h, "(H'_0 x H'_0) K = 0", element=c, tensor=h)
    kc = kinematic_chi(n, 0)
    f1 = lambda x: d1(ValElement.mu(n, *x, 0))._coeffs  # noqa: E731
    f2 = lambda x: d2(ValElement.mu(n, *x, 0))._coeffs  # noqa: E731
    g = lambda x: ell(ValElement.mu(n, *x, 0))._coeffs  # noqa: E731
    h = lambda x: nn(ValElement.mu(n, *x, 0))._coeffs  # noqa: E731
    a1 = local_kinematic(CurvElement.delta(n, 0, 0)) - kc.map_legs(left=g, right=g)
    lhs = curv_tensor_apply(a1, n, left=h_prime_0, right=h_prime_0)
    _expect(lhs == kc.map_legs(left=f1, right=f1).scale(-1), "null part of K(Delta_00)")
    if valid("N", 1, 0, n, 2 * n):
        a2 = local_kinematic(CurvElement.nul(n, 1, 0)) - kc.map_legs(left=h, right=g) - kc.map_legs(left=g, right=h)
        lhs = curv_tensor_apply(a2, n, left=h_prime_0, right=h_prime_0)
        rhs = (kc.map_legs(left=f1, right=f2) + kc.map_legs(left=f2, right=f1)).scale(-1)
        _expect(lhs == rhs, "null part of K(N_10)")


def suite_globalization(n: int, lam) -> None:
    for c in _basis(n):
        g = globalize(c, lam)
        _expect(globalize(act_s(c), lam) == s_multiply(g), "glob s = s glob", element=c)
        _expect(globalize(act_t(c), 0) == t_multiply(globalize(c, 0)), "glob_0 t = t glob_0", element=c)
        _expect(globalize(act_t_lambda(c, lam), lam) == t_multiply(g), "glob t_lam = t glob", element=c)
        klhs = global_from_local(local_kinematic(c), n, lam)
        _expect(klhs == kinematic(g), "(glob x glob) K = k glob", element=c)
        if n > 1:
            r = restrict_curv(c, n - 1)
            _expect(globalize(r, lam) == restrict_val(g, n - 1), "restriction commutes with glob", element=c)
    ker = glob_kernel_basis(n, lam)
    _expect(len(ker) == len(curv_indices(n, "N")), "kernel dimension")
    for c in ker:
        _expect(globalize(c, lam).is_zero(), "kernel element globalizes to 0", element=c)


def suite_free_module(n: int, lam) -> None:
    for c in _basis(n):
        p1, p2 = free_decompose(c)
        _expect(recompose(p1, p2) == c, "recompose after decompose", element=c)
    for c in _basis(n, "N"):
        _expect(nn(nn_inverse(c)) == c, "n n^-1 = id", element=c)
    # the stable module is free: check up to degree 2n
    cap = 2 * n + 1
    zero = ValElement.zero(None, 0, cap)
    for x in mu_indices(None, 2 * n):
        p = ValElement.mu(None, *x, 0, cap)
        _expect(nn_inverse(nn(p)) == p, "n^-1 n = id", index=list(x))
        _expect(free_decompose(ell(p)) == (p, zero), "decompose l(p)", index=list(x))
        _expect(free_decompose(nn(p)) == (zero, p), "decompose n(p)", index=list(x))
    for key in curv_indices(None, "DN", cap):
        c = CurvElement(None, {key: 1}, cap=cap)
        _expect(angular_predicate(c) == angular_test(c), "angularity predicate", element=c)


def suite_kernel(n: int, lam) -> None:
    for m in (n - 1, n):
        img = nn(ValElement.from_tu(g_poly(m), n, 0))
        _expect(img.is_zero(), "n(g) = 0", degree=m, image=img)


SUITES: dict[str, Callable] = {
    "coalgebra": suite_coalgebra,
    "ftaig": suite_ftaig,
    "module": suite_module,
    "angularity": suite_angularity,
    "local_kin_derivation": suite_local_kin_derivation,
    "globalization": suite_globalization,
    "free_module": suite_free_module,
    "kernel": suite_kernel,
}


def _run_one(job: tuple[str, int, object]) -> dict:
    name, n, lam = job
    report = {"suite": name, "n": n, "lambda": format_lambda(lam), "status": "pass", "witness": None}
    try:
        SUITES[name](n, lam)
    except CheckFailed as exc:
        report["status"] = "fail"
        report["witness"] = exc.witness
    return report


def _workers(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def run_jobs(jobs: list[tuple[str, int, object]], workers: int | None = None) -> list[dict]:
    """Run ``(suite, n, lam)`` jobs, optionally in parallel; output order matches input."""
    for name, _, _ in jobs:
        if name not in SUITES:
            raise KeyError(name)
    w = _workers(workers)
    if w == 1 or len(jobs) < 2:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=w) as pool:
        return list(pool.map(_run_one, jobs))


def run_suite(name: str, n: int, lambda_set: Iterable = DEFAULT_LAMBDAS, workers: int | None = None) -> list[dict]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    return run_jobs([(name, n, lam) for lam in lambda_set], workers)


# -- conjecture ------------------------------------------------------------------------


def lambda_series(m_max: int) -> list[int]:
    """``binom(4m+1, m+1) - 9 binom(4m+1, m-1)`` for ``m = 0..m_max``."""
    return [binomial(4 * m + 1, m + 1) - 9 * binomial(4 * m + 1, m - 1) for m in range(m_max + 1)]


@lru_cache(maxsize=None)
def _series_powers(m_max: int, terms: int | None) -> tuple[tuple[int, ...], ...]:
    """``[z^M] L(z)^c`` for ``L = sum_{m>=1} b_m z^m`` (optionally cut after ``terms`` terms)."""
    b = lambda_series(m_max)
    base = [0] + [b[m] if terms is None or m <= terms else 0 for m in range(1, m_max + 1)]
    rows = [[1] + [0] * m_max]
    for _ in range(m_max):
        prev = rows[-1]
        cur = [0] * (m_max + 1)
        for i, x in enumerate(prev):
            if x:
                for j in range(1, m_max + 1 - i):
                    cur[i + j] += x * base[j]
        rows.append(cur)
    return tuple(tuple(r) for r in rows)


def fbar(k: int, max_degree: int, lambda_terms: int | None = None) -> dict[tuple[int, int], LambdaScalar]:
    """Coefficient of ``x^k`` in ``log(1 + t x + s x^2 + sum_m b_m lam^m x^(-2m))``.

    Only monomials ``s^a t^b`` with ``2a + b <= max_degree`` are kept.  Keys are
    ``(a, b)``; values are polynomials in ``lam``.
    """
    m_max = max(0, (max_degree - k) // 2)
    pw = _series_powers(m_max, lambda_terms)
    out: dict[tuple[int, int], LambdaScalar] = {}
    for a in range(max_degree // 2 + 1):
        for b in range(max_degree - 2 * a + 1):
            twice_m = b + 2 * a - k
            if twice_m < 0 or twice_m % 2:
                continue
            m = twice_m // 2
            total = Fraction(0)
            for c in range(m + 1):
                coef = pw[c][m]
                j = a + b + c
                if not coef or j == 0:
                    continue
                multinom = math.factorial(j) // (math.factorial(a) * math.factorial(b) * math.factorial(c))
                total += Fraction((-1) ** (j + 1) * multinom * coef, j)
            if total:
                out[(a, b)] = LambdaScalar.monomial(total, lam=m)
    return out


def conjecture_pairings(n: int, lam=None, lambda_terms: int | None = None) -> dict[tuple[int, int], LambdaScalar]:
    """``(fbar_{n+1} s^j t^k)(CP^n_lam)`` for ``2j + k <= n``; nonzero entries only."""
    values = value_table_cpn(n, lam)
    f = fbar(n + 1, 2 * n, lambda_terms)
    out = {}
    for j in range(n // 2 + 1):
        for k in range(n - 2 * j + 1):
            total = ZERO
            for (a, b), c in f.items():
                key = (a + j, b + k)
                if 2 * key[0] + key[1] <= 2 * n:
                    v = values.get(key)
                    if v:
                        total = total + (c.subs(lam) if lam is not None else c) * v
            if total:
                out[(j, k)] = total
    return out


def conjecture_check(n_max: int, lambda_terms: int | None = None, lam=None, n_min: int = 2) -> list[dict]:
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    reports = []
    for n in range(n_min, n_max + 1):
        t0 = time.perf_counter()
        bad = conjecture_pairings(n, lam, lambda_terms)
        status = "fail" if bad else "pass"
        witness = None
        if bad:
            (j, k), v = sorted(bad.items())[0]
            witness = {"check": "pairing vanishes", "j": j, "k": k, "value": to_json_obj(v)}
        reports.append(
            {
                "suite": "conjecture",
                "n": n,
                "lambda": format_lambda(lam),
                "status": status,
                "witness": witness,
                "seconds": round(time.perf_counter() - t0, 4),
            }
        )
    return reports


# -- numerical identities --------------------------------------------------------------


def pfaff_saalschutz_sum(n: int, k: int) -> Fraction:
    return sum(
        (
            Fraction((-1) ** i, n + 1 - i) * binomial(n + 1 - i, i) * binomial(2 * n - 2 * k - 2 * i, n - k - i)
            for i in range((n + 1) // 2 + 1)
        ),
        Fraction(0),
    )


def gessel_closed_form(n: int, k: int) -> Fraction:
    return Fraction((-1) ** (n - k), n + 1) * binomial(k, n - k)


def identity_check(which: str, bound: int) -> list[dict]:
    from .local_kinematic import shifrin_identity

    reports = []

    def report(params: dict, lhs, rhs):
        ok = lhs == rhs
        reports.append(
            {
                "suite": which,
                "n": params.get("n"),
                "lambda": None,
                "status": "pass" if ok else "fail",
                "witness": None if ok else {**params, "lhs": str(lhs), "rhs": str(rhs)},
            }
        )

    if which == "pfaff_saalschutz":
        # at k = n/2 the sum is (-1)^k/(n+1); the vanishing range is 2k < n
        for n in range(bound + 1):
            for k in range((n + 1) // 2):
                report({"n": n, "k": k}, pfaff_saalschutz_sum(n, k), Fraction(0))
    elif which == "gessel_closed_form":
        for n in range(bound + 1):
            for k in range(n + 1):
                report({"n": n, "k": k}, pfaff_saalschutz_sum(n, k), gessel_closed_form(n, k))
    elif which == "shifrin":
        for n in range(bound + 1):
            for k in range(bound + 1):
                for l in range(bound + 1):
                    for q in range(bound + 1):
                        lhs, rhs = shifrin_identity(n, k, l, q)
                        report({"n": n, "k": k, "l": l, "q": q}, lhs, rhs)
    else:
        raise KeyError(f"unknown identity {which!r}")
    return reports


def all_passed(reports: Iterable[dict]) -> bool:
    return all(r["status"] == "pass" for r in reports)
