"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line with its wall time.
Run ``pytest tests/test_acceptance.py -s`` (or execute this file) to see them.
"""

import time
from fractions import Fraction

import pytest

from hermig import verify as vf
from hermig.cli import main
from hermig.curvature import (
    CurvElement,
    act_s,
    act_t,
    act_val_lambda,
    curv_indices,
    d1,
    h_prime_0,
    nn,
    sigma_map,
)
from hermig.local_kinematic import curv_tensor_apply, local_kinematic, rho_kr_poly, shifrin, shifrin_via_gamma
from hermig.scalars import LambdaScalar, binomial
from hermig.serialize import loads
from hermig.tubes import (
    ball_tube,
    curv_trig_globalize,
    differentiate,
    global_tube,
    local_tube,
    totally_real_tube,
)
from hermig.valuations import ValElement, eval_on_cpm, kinematic_chi, kinematic_pairs, pi_kr_poly, restrict_val

LAMBDAS = (Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 3))
INV_PI = LambdaScalar.monomial(1, pi=-1)


def check(number, budget, body, capsys=None):
    start = time.perf_counter()
    failures = list(body())
    elapsed = time.perf_counter() - start
    if elapsed > budget:
        failures.append(f"took {elapsed:.1f}s, budget {budget}s")
    status = "PASS" if not failures else "FAIL"
    line = f"criterion {number}: {status} ({elapsed:.2f}s)"
    if failures:
        line += " " + "; ".join(failures[:3])
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    assert not failures, line


def _failed(reports):
    return [f"{r['suite']} n={r['n']} lam={r['lambda']}: {r['witness']['check']}" for r in reports if r["status"] != "pass"]


# -- 1 ---------------------------------------------------------------------------------


def c1_principal_formula_c3():
    import contextlib
    import io

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(["kin-chi", "--n", "3", "--lambda", "0"])
    if code:
        yield f"exit code {code}"
        return
    got = loads(buf.getvalue())
    q = lambda a, b: LambdaScalar.coerce(Fraction(a, b))  # noqa: E731
    p = lambda a, b: INV_PI * Fraction(a, b)  # noqa: E731
    table = {
        ((0, 0), (6, 3)): q(1, 1),
        ((1, 0), (5, 2)): p(16, 15),
        ((2, 0), (4, 1)): q(5, 24),
        ((2, 0), (4, 2)): q(1, 6),
        ((2, 1), (4, 1)): q(1, 6),
        ((2, 1), (4, 2)): q(1, 3),
        ((3, 0), (3, 0)): p(2, 3),
        ((3, 0), (3, 1)): p(4, 9),
        ((3, 1), (3, 1)): p(16, 27),
    }
    for (x, y), c in list(table.items()):
        table[(y, x)] = c
    entries = dict(got.items())
    if entries != table:
        yield f"table mismatch: {sorted(set(entries) ^ set(table))}"


def test_criterion_1(capsys):
    check(1, 1, c1_principal_formula_c3, capsys)


# -- 2 ---------------------------------------------------------------------------------


def c2_template_values():
    for n in range(1, 9):
        for k in range(n + 1):
            t2k = eval_on_cpm(ValElement.monomial(n, 0, 2 * k, None), n)
            if t2k != LambdaScalar.monomial(binomial(2 * k, k) * binomial(n + 1, k + 1), lam=-k):
                yield f"t^{2 * k} on CP^{n}"
            if eval_on_cpm(ValElement.monomial(n, k, 0, None), n) != LambdaScalar.monomial(n - k + 1, lam=-k):
                yield f"s^{k} on CP^{n}"


def test_criterion_2(capsys):
    check(2, 10, c2_template_values, capsys)


# -- 3 ---------------------------------------------------------------------------------


def c3_fundamental_theorem():
    for n in range(1, 5):
        yield from _failed(vf.run_suite("ftaig", n, LAMBDAS))


def test_criterion_3(capsys):
    check(3, 60, c3_fundamental_theorem, capsys)


# -- 4 ---------------------------------------------------------------------------------


def c4_coalgebra_and_globalization():
    for n in range(1, 4):
        yield from _failed(vf.run_suite("coalgebra", n, [None]))
        yield from _failed(vf.run_suite("globalization", n, [None]))


def test_criterion_4(capsys):
    check(4, 120, c4_coalgebra_and_globalization, capsys)


# -- 5 ---------------------------------------------------------------------------------


def _N(n, k, q, c=1):
    return CurvElement(n, {("N", k, q): c})


def c5_module_actions():
    for n in range(3, 7):
        if act_t(_N(n, 1, 0)) != _N(n, 2, 0, Fraction(3, 4)):
            yield f"t N_10, n={n}"
    for n in range(4, 7):
        if act_t(_N(n, 2, 0)) != _N(n, 3, 0, INV_PI * Fraction(16, 5)) + _N(n, 3, 1, INV_PI * Fraction(16, 15)):
            yield f"t N_20, n={n}"
    for n in range(1, 7):
        s_val = ValElement.monomial(n, 1, 0, None)
        for key in curv_indices(n, "DN"):
            c = CurvElement(n, {key: 1})
            sc = act_s(c)
            if act_val_lambda(s_val, c) != sc:
                yield f"s depends on lambda at {key}, n={n}"
            if act_s(act_t(c)) != act_t(sc):
                yield f"[s,t] at {key}, n={n}"
        for key in curv_indices(n, "B"):
            img = act_s(CurvElement(n, {key: 1}, "BG").to_dn()).to_bg()
            if any(f != "B" for f, _, _ in img.coeffs):
                yield f"s leaves span(B) at {key}, n={n}"


def test_criterion_5(capsys):
    check(5, 30, c5_module_actions, capsys)


# -- 6 ---------------------------------------------------------------------------------


def c6_angularity():
    for n in range(1, 6):
        yield from _failed(vf.run_suite("angularity", n, [None]))


def test_criterion_6(capsys):
    check(6, 120, c6_angularity, capsys)


# -- 7 ---------------------------------------------------------------------------------


def c7_free_module():
    for n in range(1, 6):
        yield from _failed(vf.run_suite("free_module", n, [Fraction(0)]))
    for n in range(1, 9):
        yield from _failed(vf.run_suite("kernel", n, [Fraction(0)]))


def test_criterion_7(capsys):
    check(7, 60, c7_free_module, capsys)


# -- 8 ---------------------------------------------------------------------------------


def c8_local_kinematic_closure():
    for n in range(1, 4):
        kc = kinematic_chi(n, 0)
        f1 = lambda x: d1(ValElement.mu(n, *x, 0))._coeffs  # noqa: E731
        lhs = curv_tensor_apply(local_kinematic(CurvElement.delta(n, 0, 0)), n, left=h_prime_0, right=h_prime_0)
        rhs = kc.map_legs(left=f1, right=f1).scale(-1)
        if lhs != rhs:
            diff = dict((lhs - rhs).items())
            yield f"(H'0 x H'0) K(Delta_00) != -(D1 x D1) k(chi) at n={n}, difference {diff}"
        for k, r in kinematic_pairs(n):
            a = nn(rho_kr_poly(n, k, r), n)
            b = sigma_map(d1(ValElement.from_tu(pi_kr_poly(n, k, r), n, 0)))
            if a != b:
                yield f"n(rho_{k}{r}) at n={n}"


def test_criterion_8(capsys):
    check(8, 120, c8_local_kinematic_closure, capsys)


# -- 9 ---------------------------------------------------------------------------------


def c9_tubes():
    for n in range(1, 5):
        if ball_tube(n) != global_tube(n):
            yield f"ball tube n={n}"
    for n in range(1, 4):
        if differentiate(curv_trig_globalize(local_tube(n), n)) != differentiate(global_tube(n)):
            yield f"local tube n={n}"
    for n in range(1, 6):
        for k in range(n + 1):
            if totally_real_tube(n, k):
                yield f"totally real n={n} k={k}"


def test_criterion_9(capsys):
    check(9, 120, c9_tubes, capsys)


# -- 10 --------------------------------------------------------------------------------


def c10_complex_kinematics():
    for n in range(1, 6):
        for lam in (None, Fraction(1)):
            for q in range(n + 1):
                if shifrin_via_gamma(q, n, lam) != shifrin(q, n, lam):
                    yield f"Shifrin q={q} n={n}"
    yield from (f"identity {r['witness']}" for r in vf.identity_check("shifrin", 8) if r["status"] != "pass")


def test_criterion_10(capsys):
    check(10, 30, c10_complex_kinematics, capsys)


# -- 11 --------------------------------------------------------------------------------


def c11_conjecture():
    yield from (f"n={r['n']}: {r['witness']}" for r in vf.conjecture_check(20) if r["status"] != "pass")


def test_criterion_11(capsys):
    check(11, 600, c11_conjecture, capsys)


# -- 12 --------------------------------------------------------------------------------


def c12_euler_characteristic():
    for n in range(1, 9):
        for lam in (None, Fraction(1), Fraction(1, 3)):
            # the stable-range chi comes from the generating function; restriction cuts it to C^n
            chi = restrict_val(ValElement.chi(None, lam, 2 * n), n)
            value = eval_on_cpm(chi, n)
            if value != n + 1:
                yield f"chi(CP^{n}) = {value} at lam={lam}"


def test_criterion_12(capsys):
    check(12, 10, c12_euler_characteristic, capsys)


if __name__ == "__main__":
    bodies = [v for k, v in sorted(globals().items()) if k.startswith("c") and k[1:].split("_")[0].isdigit()]
    bodies.sort(key=lambda f: int(f.__name__[1:].split("_")[0]))
    budgets = {1: 1, 2: 10, 3: 60, 4: 120, 5: 30, 6: 120, 7: 60, 8: 120, 9: 120, 10: 30, 11: 600, 12: 10}
    for body in bodies:
        num = int(body.__name__[1:].split("_")[0])
        try:
            check(num, budgets[num], body)
        except AssertionError:
            pass
