"""JSON, CSV and LaTeX encodings of library objects."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Any, Iterable

from .curvature import CurvElement
from .scalars import LambdaScalar, format_lambda_scalar
from .tensor import Tensor
from .trig import IntegralAtom, TrigPoly
from .valuations import ValElement

# -- lambda modes ----------------------------------------------------------------------


def parse_lambda(text: str | None) -> Fraction | None:
    if text is None or text == "formal":
        return None
    return Fraction(text)


def format_lambda(lam: Fraction | None) -> str:
    return "formal" if lam is None else str(lam)


# -- JSON --------------------------------------------------------------------------------


def scalar_to_json(x: LambdaScalar) -> list[dict]:
    return [
        {"lambda": le, "pi": pe, "num": str(c.numerator), "den": str(c.denominator)}
        for (le, pe), c in x.sorted_items()
    ]


def scalar_from_json(data: Iterable[dict]) -> LambdaScalar:
    terms: dict[tuple[int, int], Fraction] = {}
    for t in data:
        key = (int(t["lambda"]), int(t["pi"]))
        terms[key] = terms.get(key, Fraction(0)) + Fraction(int(t["num"]), int(t["den"]))
    return LambdaScalar(terms)


def _n_to_json(n: int | None):
    return "inf" if n is None else n


def _n_from_json(v) -> int | None:
    return None if v == "inf" else int(v)


def val_to_json(v: ValElement) -> dict:
    names = ("s", "t") if v.basis == "st" else ("k", "q")
    out = {
        "type": "ValElement",
        "n": _n_to_json(v.n),
        "basis": v.basis,
        "lambda": format_lambda(v.lam),
        "terms": [{names[0]: a, names[1]: b, "coef": scalar_to_json(c)} for (a, b), c in v.items()],
    }
    if v.n is None:
        out["cap"] = v.cap
    return out


def val_from_json(d: dict) -> ValElement:
    names = ("s", "t") if d["basis"] == "st" else ("k", "q")
    coeffs = {(t[names[0]], t[names[1]]): scalar_from_json(t["coef"]) for t in d["terms"]}
    return ValElement(_n_from_json(d["n"]), d["basis"], coeffs, parse_lambda(d.get("lambda")), d.get("cap"))


def curv_to_json(c: CurvElement) -> dict:
    out = {
        "type": "CurvElement",
        "n": _n_to_json(c.n),
        "basis": c.basis,
        "terms": [{"family": f, "k": k, "q": q, "coef": scalar_to_json(x)} for (f, k, q), x in c.items()],
    }
    if c.n is None:
        out["cap"] = c.cap
    return out


def curv_from_json(d: dict) -> CurvElement:
    coeffs = {(t["family"], t["k"], t["q"]): scalar_from_json(t["coef"]) for t in d["terms"]}
    return CurvElement(_n_from_json(d["n"]), coeffs, d["basis"], d.get("cap"))


def _key_to_json(key):
    return list(key) if isinstance(key, tuple) else key


def _key_from_json(key):
    return tuple(key) if isinstance(key, list) else key


def _meta_to_json(meta: dict) -> dict:
    out = {}
    for k, v in meta.items():
        if k == "lam":
            out["lambda"] = format_lambda(v)
        elif isinstance(v, tuple):
            out[k] = list(v)
        else:
            out[k] = v
    return out


def _meta_from_json(meta: dict) -> dict:
    out = {}
    for k, v in meta.items():
        if k == "lambda":
            out["lam"] = parse_lambda(v)
        elif isinstance(v, list):
            out[k] = tuple(v)
        else:
            out[k] = v
    return out


def tensor_to_json(t: Tensor) -> dict:
    return {
        "type": "Tensor",
        "meta": _meta_to_json(t.meta),
        "terms": [
            {"left": _key_to_json(x), "right": _key_to_json(y), "coef": scalar_to_json(c)} for (x, y), c in t.items()
        ],
    }


def tensor_from_json(d: dict) -> Tensor:
    terms = {(_key_from_json(t["left"]), _key_from_json(t["right"])): scalar_from_json(t["coef"]) for t in d["terms"]}
    return Tensor(terms, _meta_from_json(d.get("meta", {})))


def trig_to_json(p: TrigPoly) -> dict:
    return {
        "type": "TrigPoly",
        "terms": [
            {"sn": a, "cs": b, "atom": None if atom is None else [atom.a, atom.b], "coef": scalar_to_json(c)}
            for (a, b, atom), c in p.items()
        ],
    }


def trig_from_json(d: dict) -> TrigPoly:
    terms = {}
    for t in d["terms"]:
        atom = None if t["atom"] is None else IntegralAtom(*t["atom"])
        terms[(t["sn"], t["cs"], atom)] = scalar_from_json(t["coef"])
    return TrigPoly(terms, reduce=False)


_ENCODERS = (
    (LambdaScalar, scalar_to_json),
    (ValElement, val_to_json),
    (CurvElement, curv_to_json),
    (Tensor, tensor_to_json),
    (TrigPoly, trig_to_json),
)

_DECODERS = {
    "ValElement": val_from_json,
    "CurvElement": curv_from_json,
    "Tensor": tensor_from_json,
    "TrigPoly": trig_from_json,
}


def to_json_obj(x: Any):
    for cls, enc in _ENCODERS:
        if isinstance(x, cls):
            return enc(x)
    if isinstance(x, LambdaScalar):
        return scalar_to_json(x)
    if isinstance(x, Fraction):
        return scalar_to_json(LambdaScalar.coerce(x))
    if isinstance(x, dict):
        return {"type": "Map", "entries": [{"key": _key_to_json(k), "value": to_json_obj(v)} for k, v in sorted(x.items())]}
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, (list, tuple)):
        return [to_json_obj(v) for v in x]
    raise TypeError(f"cannot encode {type(x).__name__}")


def from_json_obj(d: Any):
    if isinstance(d, list):
        return scalar_from_json(d)
    if isinstance(d, dict) and d.get("type") == "Map":
        return {_key_from_json(e["key"]): from_json_obj(e["value"]) for e in d["entries"]}
    return _DECODERS[d["type"]](d)


def dumps(x: Any) -> str:
    return json.dumps(to_json_obj(x), indent=2, sort_keys=True)


def loads(text: str):
    return from_json_obj(json.loads(text))


# -- LaTeX -------------------------------------------------------------------------------


def _power(sym: str, e: int) -> str:
    return sym if e == 1 else f"{sym}^{{{e}}}"


def latex_scalar(x: LambdaScalar) -> str:
    if not x:
        return "0"
    parts = []
    for (le, pe), c in x.sorted_items():
        num = [str(abs(c.numerator))]
        den = [str(c.denominator)] if c.denominator != 1 else []
        for sym, e in (("\\lambda", le), ("\\pi", pe)):
            if e > 0:
                num.append(_power(sym, e))
            elif e < 0:
                den.append(_power(sym, -e))
        if len(num) > 1 and num[0] == "1":
            num = num[1:]
        top = " ".join(num)
        body = f"\\frac{{{top}}}{{{' '.join(den)}}}" if den else top
        parts.append(("-" if c < 0 else "+", body))
    text = "".join(f" {s} {b}" for s, b in parts).strip()
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


_CURV_SYMBOLS = {"D": "\\Delta", "N": "N", "B": "B", "G": "\\Gamma"}


def latex_label(key, kind: str, lam=0) -> str:
    if kind == "mu":
        sup = "" if lam == 0 else "^{\\lambda}"
        return f"\\mu{sup}_{{{key[0]},{key[1]}}}"
    if kind == "tau":
        sup = "" if lam == 0 else "^{\\lambda}"
        return f"\\tau{sup}_{{{key[0]},{key[1]}}}"
    if kind == "st":
        a, b = key
        mono = " ".join(p for p in ((_power("s", a) if a else ""), (_power("t", b) if b else "")) if p)
        return mono or "\\chi"
    if kind == "curv":
        f, k, q = key
        return f"{_CURV_SYMBOLS[f]}_{{{k},{q}}}"
    if kind == "gamma":
        return f"\\Gamma_{{{2 * key},{key}}}"
    if kind == "chern":
        return f"\\mathrm{{Ch}}_{{{key}}}"
    return str(key)


def _signed(coef: LambdaScalar, label: str, first: bool) -> str:
    text = latex_scalar(coef)
    multi = len(coef.sorted_items()) > 1
    if multi:
        text = f"\\left({text}\\right)"
        return (text if first else "+ " + text) + " " + label
    if text == "1":
        text = ""
    elif text == "-1":
        text = "-"
    if text.startswith("-"):
        body = text[1:]
        return ("-" if first else "- ") + (body + " " if body else "") + label
    return ("" if first else "+ ") + (text + " " if text else "") + label


def latex_element(x) -> str:
    if isinstance(x, ValElement):
        kind = x.basis
        items = [(latex_label(k, kind, x.lam), c) for k, c in x.items()]
    elif isinstance(x, CurvElement):
        items = [(latex_label(k, "curv"), c) for k, c in x.items()]
    else:
        raise TypeError(f"cannot typeset {type(x).__name__}")
    if not items:
        return "0"
    return " ".join(_signed(c, lab, i == 0) for i, (lab, c) in enumerate(items))


def latex_tensor(t: Tensor, title: str | None = None) -> str:
    legs = t.meta.get("legs", ("mu", "mu"))
    lam = t.meta.get("lam", 0)
    lines = ["\\begin{array}{lll}"]
    if title:
        lines.append(f"\\multicolumn{{3}}{{l}}{{{title}}} \\\\")
    for (x, y), c in t.items():
        lines.append(f"{latex_label(x, legs[0], lam)} & \\otimes {latex_label(y, legs[1], lam)} & {latex_scalar(c)} \\\\")
    lines.append("\\end{array}")
    return "\n".join(lines) + "\n"


def latex_trig(p: TrigPoly) -> str:
    """``sn``/``cs`` polynomial with integral atoms ``int_0^r sn^a cs^b``."""
    if not p:
        return "0"
    out = []
    for i, ((a, b, atom), c) in enumerate(p.items()):
        factors = [f for f in ((_power("\\mathrm{sn}", a) if a else ""), (_power("\\mathrm{cs}", b) if b else "")) if f]
        if atom is not None:
            inner = " ".join(
                f for f in ((_power("\\mathrm{sn}", atom.a) if atom.a else ""), (_power("\\mathrm{cs}", atom.b) if atom.b else "")) if f
            )
            factors.append(f"\\int_0^r {inner or '1'}\\,d\\rho")
        out.append(_signed(c, " ".join(factors), i == 0) if factors else _plain(c, i == 0))
    return " ".join(out)


def _plain(c: LambdaScalar, first: bool) -> str:
    text = latex_scalar(c)
    if len(c.sorted_items()) > 1:
        text = f"\\left({text}\\right)"
    if first:
        return text
    return "- " + text[1:] if text.startswith("-") else "+ " + text


def latex_scalar_map(d: dict, kind: str) -> str:
    lines = ["\\begin{array}{ll}"]
    for k in sorted(d):
        v = d[k]
        if isinstance(v, TrigPoly):
            body = latex_trig(v)
        else:
            body = latex_scalar(v) if isinstance(v, LambdaScalar) else str(v)
        lines.append(f"{latex_label(k, kind)} & {body} \\\\")
    lines.append("\\end{array}")
    return "\n".join(lines) + "\n"


# -- CSV ---------------------------------------------------------------------------------


def _key_cells(key) -> list:
    return list(key) if isinstance(key, tuple) else [key]


def to_csv(x: Any, numeric: bool = False, lam_value: Fraction | None = None) -> str:
    """Rows of indices followed by the coefficient (and optionally its float value)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")

    def coef_cells(c: LambdaScalar) -> list:
        cells = [format_lambda_scalar(c)]
        if numeric:
            cells.append(repr(c.evaluate(lam_value or 0)))
        return cells

    if isinstance(x, ValElement):
        names = ["s", "t"] if x.basis == "st" else ["k", "q"]
        w.writerow(names + ["coef"] + (["value"] if numeric else []))
        for key, c in x.items():
            w.writerow(list(key) + coef_cells(c))
    elif isinstance(x, CurvElement):
        w.writerow(["family", "k", "q", "coef"] + (["value"] if numeric else []))
        for key, c in x.items():
            w.writerow(list(key) + coef_cells(c))
    elif isinstance(x, Tensor):
        w.writerow(["left", "right", "coef"] + (["value"] if numeric else []))
        for (a, b), c in x.items():
            w.writerow([":".join(map(str, _key_cells(a))), ":".join(map(str, _key_cells(b)))] + coef_cells(c))
    elif isinstance(x, dict) and all(isinstance(v, TrigPoly) for v in x.values()):
        w.writerow(["index", "coef", "sn", "cs", "atom"])
        for key in sorted(x):
            for (a, b, atom), c in x[key].items():
                w.writerow(
                    [":".join(map(str, _key_cells(key))), format_lambda_scalar(c), a, b, "" if atom is None else f"{atom.a}:{atom.b}"]
                )
    elif isinstance(x, TrigPoly):
        w.writerow(["coef", "sn", "cs", "atom"])
        for (a, b, atom), c in x.items():
            w.writerow([format_lambda_scalar(c), a, b, "" if atom is None else f"{atom.a}:{atom.b}"])
    elif isinstance(x, dict):
        w.writerow(["index", "coef"])
        for key in sorted(x):
            v = x[key]
            w.writerow([":".join(map(str, _key_cells(key))), format_lambda_scalar(v) if isinstance(v, LambdaScalar) else v])
    elif isinstance(x, LambdaScalar):
        w.writerow(["coef"] + (["value"] if numeric else []))
        w.writerow(coef_cells(x))
    else:
        raise TypeError(f"cannot write {type(x).__name__} as CSV")
    return buf.getvalue()
