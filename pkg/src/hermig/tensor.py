"""Sparse two-leg tensors over ``LambdaScalar``."""

from __future__ import annotations

from typing import Callable, Hashable, Iterable, Mapping

from .scalars import ZERO, LambdaScalar

LinearMap = Callable[[Hashable], Mapping[Hashable, LambdaScalar]]


class Tensor:
    """``sum c[(x, y)] e_x (x) e_y``; keys are basis labels of each leg."""

    __slots__ = ("_terms", "meta")

    def __init__(self, terms: Mapping[tuple, object] | None = None, meta: Mapping | None = None):
        out: dict[tuple, LambdaScalar] = {}
        for key, c in (terms or {}).items():
            c = LambdaScalar.coerce(c)
            if c:
                v = out.get(key, ZERO) + c
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        self._terms = out
        self.meta = dict(meta or {})

    @property
    def terms(self) -> dict[tuple, LambdaScalar]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "Tensor") -> "Tensor":
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, ZERO) + c
        return Tensor(out, self.meta or other.meta)

    def __neg__(self) -> "Tensor":
        return Tensor({k: -c for k, c in self._terms.items()}, self.meta)

    def __sub__(self, other: "Tensor") -> "Tensor":
        return self + (-other)

    def scale(self, c) -> "Tensor":
        c = LambdaScalar.coerce(c)
        return Tensor({k: v * c for k, v in self._terms.items()}, self.meta)

    def swap(self) -> "Tensor":
        return Tensor({(y, x): c for (x, y), c in self._terms.items()}, self.meta)

    def is_symmetric(self) -> bool:
        return self == self.swap()

    def map_legs(self, left: LinearMap | None = None, right: LinearMap | None = None, meta=None) -> "Tensor":
        """Apply linear maps (given on basis labels) to either leg."""
        cache_l: dict = {}
        cache_r: dict = {}

        def image(f, cache, x):
            if f is None:
                return {x: 1}
            if x not in cache:
                cache[x] = dict(f(x))
            return cache[x]

        out: dict[tuple, LambdaScalar] = {}
        for (x, y), c in self._terms.items():
            for x2, a in image(left, cache_l, x).items():
                ca = c * a
                for y2, b in image(right, cache_r, y).items():
                    key = (x2, y2)
                    out[key] = out.get(key, ZERO) + ca * b
        return Tensor(out, self.meta if meta is None else meta)

    def contract_left(self, functional: Callable[[Hashable], LambdaScalar]) -> dict:
        """Pair the first leg with a functional; returns coefficients of the second leg."""
        out: dict = {}
        for (x, y), c in self._terms.items():
            v = functional(x)
            if v:
                out[y] = out.get(y, ZERO) + c * v
        return {k: v for k, v in out.items() if v}

    def left_keys(self) -> set:
        return {x for x, _ in self._terms}

    def right_keys(self) -> set:
        return {y for _, y in self._terms}


def outer(a: Mapping, b: Mapping, meta=None) -> Tensor:
    out: dict[tuple, LambdaScalar] = {}
    for x, ca in a.items():
        for y, cb in b.items():
            key = (x, y)
            out[key] = out.get(key, ZERO) + LambdaScalar.coerce(ca) * cb
    return Tensor(out, meta)


def tensor_sum(parts: Iterable[Tensor]) -> Tensor:
    out: dict[tuple, LambdaScalar] = {}
    meta: dict = {}
    for t in parts:
        meta = meta or t.meta
        for k, c in t._terms.items():
            out[k] = out.get(k, ZERO) + c
    return Tensor(out, meta)
