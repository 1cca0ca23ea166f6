"""Command-line front end: ``hermig <command> [options]``.

Elements are written as ``mu:k,q``, ``tau:k,q``, ``st:a,b``, ``chi``, ``vol``
(valuations) or ``D:k,q``, ``N:k,q``, ``B:k,q``, ``G:k,q``, ``T`` (curvature
measures; ``T`` is the total volume measure).  Terms can be combined:
``2*mu:1,0+-1/3*mu:2,1``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from . import curvature as cv
from .local_kinematic import complex_kinematic, local_kinematic, semi_local, shifrin
from . import tubes
from . import valuations as va
from . import verify as vf
from .scalars import LambdaScalar
from .serialize import (
    dumps,
    format_lambda,
    latex_element,
    latex_scalar,
    latex_scalar_map,
    latex_tensor,
    latex_trig,
    parse_lambda,
    to_csv,
)
from .tensor import Tensor
from .trig import TrigPoly


class UsageError(Exception):
    pass


# -- parsing ---------------------------------------------------------------------------


def _ints(text: str, count: int) -> tuple[int, ...]:
    parts = text.split(",") if text else []
    if len(parts) != count:
        raise UsageError(f"expected {count} integers, got {text!r}")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise UsageError(f"bad indices {text!r}") from None


def _term(text: str, n: int | None, lam, cap: int | None):
    coef = Fraction(1)
    if "*" in text:
        c, text = text.split("*", 1)
        try:
            coef = Fraction(c)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"bad coefficient {c!r}") from None
    head, _, rest = text.partition(":")
    try:
        if head == "chi":
            return va.ValElement.chi(n, lam, cap).scale(coef)
        if head == "vol":
            if n is None:
                raise UsageError("vol needs a finite --n")
            return va.ValElement.vol(n, lam).scale(coef)
        if head in ("mu", "tau"):
            k, q = _ints(rest, 2)
            return getattr(va.ValElement, head)(n, k, q, lam, cap, coef)
        if head == "st":
            a, b = _ints(rest, 2)
            return va.ValElement.monomial(n, a, b, lam, cap, coef)
        if head == "T":
            if n is None:
                raise UsageError("T needs a finite --n")
            return cv.CurvElement.vol(n).scale(coef)
        if head in ("D", "N", "B", "G"):
            k, q = _ints(rest, 2)
            return cv.CurvElement.basis_element(n, head, k, q, cap, coef)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    raise UsageError(f"unknown element {text!r}")


def parse_element(text: str, n: int | None, lam=None, cap: int | None = None):
    """Parse a ``+``-separated sum of terms into a ``ValElement`` or ``CurvElement``."""
    terms = [_term(t.strip(), n, lam, cap) for t in text.split("+") if t.strip()]
    if not terms:
        raise UsageError("empty element")
    out = terms[0]
    for t in terms[1:]:
        if type(t) is not type(out):
            raise UsageError("cannot mix valuations and curvature measures")
        if isinstance(out, cv.CurvElement) and t.basis != out.basis:
            t = t.convert(out.basis)
        out = out + t
    return out


def _parse_n(text: str) -> int | None:
    if text == "inf":
        return None
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dimension {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("dimension must be at least 1")
    return n


def _parse_lam(text: str):
    try:
        return parse_lambda(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad lambda {text!r}; use 'formal' or p/q") from None


def _curv(x) -> cv.CurvElement:
    if not isinstance(x, cv.CurvElement):
        raise UsageError("expected a curvature measure")
    return x


def _val(x) -> va.ValElement:
    if not isinstance(x, va.ValElement):
        raise UsageError("expected a valuation")
    return x


def _finite(args) -> int:
    if args.n is None:
        raise UsageError("this command needs a finite --n")
    return args.n


# -- output ----------------------------------------------------------------------------


def render(obj, fmt: str, numeric: bool = False, lam=None, title: str | None = None, kind: str = "mu") -> str:
    if fmt == "json":
        return dumps(obj) + "\n"
    if fmt == "csv":
        if isinstance(obj, (list, tuple)):
            return "\n".join(to_csv(x, numeric, lam) for x in obj)
        return to_csv(obj, numeric, lam)
    if isinstance(obj, Tensor):
        return latex_tensor(obj, title)
    if isinstance(obj, (va.ValElement, cv.CurvElement)):
        return latex_element(obj) + "\n"
    if isinstance(obj, LambdaScalar):
        return latex_scalar(obj) + "\n"
    if isinstance(obj, TrigPoly):
        return latex_trig(obj) + "\n"
    if isinstance(obj, dict):
        return latex_scalar_map(obj, kind)
    if isinstance(obj, (list, tuple)):
        return "".join(render(x, fmt, numeric, lam, None, kind) for x in obj)
    raise UsageError(f"cannot typeset {type(obj).__name__}")


# -- commands --------------------------------------------------------------------------


def cmd_convert(args):
    x = parse_element(args.element, args.n, args.lam, args.cap)
    target = args.basis or ("mu" if isinstance(x, va.ValElement) else "DN")
    try:
        return x.convert(target)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_mult(args):
    a = _val(parse_element(args.a, args.n, args.lam, args.cap))
    b = _val(parse_element(args.b, args.n, args.lam, args.cap))
    out = va.multiply(a, b)
    return out.convert(args.basis) if args.basis else out


def cmd_kin_chi(args):
    return va.kinematic_chi(_finite(args), args.lam)


def cmd_kin(args):
    return va.kinematic(_val(parse_element(args.element, _finite(args), args.lam)))


def cmd_local_kin(args):
    return local_kinematic(_curv(parse_element(args.element, _finite(args))).to_dn())


def cmd_semi_local(args):
    return semi_local(_curv(parse_element(args.element, _finite(args))).to_dn(), args.lam)


def cmd_act(args):
    c = _curv(parse_element(args.target, args.n, None, args.cap)).to_dn()
    ops = {"s": cv.act_s, "t": cv.act_t, "u": cv.act_u}
    if args.op in ops:
        out = ops[args.op](c)
    elif args.op == "t_lambda":
        out = cv.act_t_lambda(c, args.lam)
    else:
        v = _val(parse_element(args.op, args.n, args.lam, args.cap))
        out = cv.act_val_lambda(v, c)
    return out.convert(args.basis) if args.basis else out


def cmd_glob(args):
    c = _curv(parse_element(args.element, args.n, None, args.cap))
    out = cv.globalize(c, args.lam)
    return out.convert(args.basis) if args.basis else out


def cmd_decompose(args):
    c = _curv(parse_element(args.element, args.n, None, args.cap))
    return list(cv.free_decompose(c.to_dn()))


def cmd_tube(args):
    n = _finite(args)
    kind = args.kind
    if kind == "global":
        return tubes.global_tube(n)
    if kind == "ball":
        return tubes.ball_tube(n)
    if kind == "local":
        return tubes.local_tube(n)
    if kind == "complex":
        return tubes.complex_tube(n)
    if kind == "cpm":
        if args.m is None:
            raise UsageError("--m is required for the CP^m tube")
        return tubes.cpm_tube(args.m, n)
    if args.k is None:
        raise UsageError("--k is required for the totally real check")
    return tubes.totally_real_tube(n, args.k)


def cmd_complex_kin(args):
    n = _finite(args)
    if not 0 <= args.q <= n:
        raise UsageError("need 0 <= q <= n")
    if args.chern:
        return shifrin(args.q, n, args.lam)
    return complex_kinematic(args.q, n)


def cmd_eval(args):
    n = _finite(args)
    v = _val(parse_element(args.element, n, args.lam))
    on = args.on
    if on == "ball":
        return va.eval_on_ball(v.with_lam(None))
    if on == "vol":
        return va.vol_star(v)
    if on.startswith("cp:"):
        try:
            m = int(on[3:])
        except ValueError:
            raise UsageError(f"bad target {on!r}") from None
        if not 0 <= m <= n:
            raise UsageError("need 0 <= m <= n")
        return va.eval_on_cpm(v, m)
    raise UsageError(f"unknown evaluation target {on!r}")


_KINDS = {"tube": {"complex": "chern", "local": "curv"}}


def _print(out: str) -> None:
    sys.stdout.write(out)


def _report_lines(reports: list[dict]) -> str:
    return json.dumps(reports, indent=2, sort_keys=True) + "\n"


def _verify_jobs(args) -> list[tuple[str, int, object]]:
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        jobs = []
        for sweep in cfg.get("sweeps", []):
            names = list(vf.SUITES) if sweep.get("suite", "all") == "all" else [sweep["suite"]]
            ns = sweep.get("n", [1])
            lams = [parse_lambda(str(x)) for x in sweep.get("lambda", [format_lambda(x) for x in vf.DEFAULT_LAMBDAS])]
            jobs += [(s, n, lam) for s in names for n in ([ns] if isinstance(ns, int) else ns) for lam in lams]
    else:
        names = list(vf.SUITES) if args.suite == "all" else [args.suite]
        n = _finite(args)
        lams = args.lambdas if args.lambdas else list(vf.DEFAULT_LAMBDAS)
        jobs = [(s, n, lam) for s in names for lam in lams]
    for name, n, _ in jobs:
        if name not in vf.SUITES:
            raise UsageError(f"unknown suite {name!r}")
        if not isinstance(n, int) or n < 1:
            raise UsageError(f"bad dimension {n!r}")
    return jobs


def _lambda_list(text: str) -> list:
    return [_parse_lam(x.strip()) for x in text.split(",") if x.strip()]


COMMANDS = {
    "convert": cmd_convert,
    "mult": cmd_mult,
    "kin-chi": cmd_kin_chi,
    "kin": cmd_kin,
    "local-kin": cmd_local_kin,
    "semi-local": cmd_semi_local,
    "act": cmd_act,
    "glob": cmd_glob,
    "decompose": cmd_decompose,
    "tube": cmd_tube,
    "complex-kin": cmd_complex_kin,
    "eval": cmd_eval,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=_parse_n, default=None, help="dimension, or 'inf' (with --cap)")
    common.add_argument("--cap", type=int, default=None, help="degree cap for --n inf")
    common.add_argument("--lambda", dest="lam", type=_parse_lam, default=None, help="'formal' (default) or p/q")
    common.add_argument("--basis", default=None, help="output basis: mu, tau, st, DN or BG")
    common.add_argument("--format", dest="fmt", choices=("json", "csv", "latex"), default="json")
    common.add_argument("--numeric", action="store_true", help="add a float column (CSV)")

    p = argparse.ArgumentParser(prog="hermig", description="Exact integral geometry of complex space forms.")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("convert", parents=[common], help="change basis").add_argument("element")
    m = sub.add_parser("mult", parents=[common], help="product of two valuations")
    m.add_argument("a")
    m.add_argument("b")
    sub.add_parser("kin-chi", parents=[common], help="principal kinematic formula")
    sub.add_parser("kin", parents=[common], help="kinematic formula of a valuation").add_argument("element")
    sub.add_parser("local-kin", parents=[common], help="local kinematic formula").add_argument("element")
    sub.add_parser("semi-local", parents=[common], help="semi-local kinematic formula").add_argument("element")
    a = sub.add_parser("act", parents=[common], help="module action on a curvature measure")
    a.add_argument("--op", required=True, help="s, t, u, t_lambda or a valuation")
    a.add_argument("--target", required=True)
    sub.add_parser("glob", parents=[common], help="globalize a curvature measure").add_argument("element")
    sub.add_parser("decompose", parents=[common], help="free-module coordinates (p1, p2)").add_argument("element")
    t = sub.add_parser("tube", parents=[common], help="tube formulas")
    t.add_argument("--kind", choices=("global", "ball", "local", "complex", "cpm", "totally-real"), default="global")
    t.add_argument("--m", type=int, default=None)
    t.add_argument("--k", type=int, default=None)
    c = sub.add_parser("complex-kin", parents=[common], help="kinematic formula for complex subvarieties")
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--chern", action="store_true", help="Chern basis closed form")
    e = sub.add_parser("eval", parents=[common], help="evaluate a valuation")
    e.add_argument("element")
    e.add_argument("--on", default="cp:1", help="cp:M, ball or vol")

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", default="all", choices=("all", *vf.SUITES))
    v.add_argument("--lambdas", type=_lambda_list, default=None, help="comma-separated list")
    v.add_argument("--config", default=None, help="JSON file with a list of sweeps")
    v.add_argument("--workers", type=int, default=None)
    v.add_argument("--identity", choices=("pfaff_saalschutz", "shifrin", "gessel_closed_form"), default=None)
    v.add_argument("--bound", type=int, default=8)

    cj = sub.add_parser("conjecture", parents=[common], help="check the conjectured template relations")
    cj.add_argument("--n-max", type=int, required=True)
    cj.add_argument("--n-min", type=int, default=2)
    cj.add_argument("--lambda-terms", type=int, default=None)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            if args.identity:
                reports = vf.identity_check(args.identity, args.bound)
            else:
                reports = vf.run_jobs(_verify_jobs(args), args.workers)
            _print(_report_lines(reports))
            return 0 if vf.all_passed(reports) else 1
        if args.command == "conjecture":
            if args.n_max < 2 or args.n_min < 2:
                raise UsageError("conjecture needs n >= 2")
            reports = vf.conjecture_check(args.n_max, args.lambda_terms, args.lam, args.n_min)
            _print(_report_lines(reports))
            return 0 if vf.all_passed(reports) else 1
        obj = COMMANDS[args.command](args)
        kind = _KINDS.get(args.command, {}).get(getattr(args, "kind", None), "mu")
        title = None
        if args.command == "kin-chi" and args.fmt == "latex":
            title = f"k_{{{format_lambda(args.lam)}}}(\\chi),\\ n={args.n}"
        _print(render(obj, args.fmt, args.numeric, args.lam, title, kind))
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"hermig: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
