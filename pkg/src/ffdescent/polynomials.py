"""Polynomial rings F_p[x_1..x_n], restricted to what the polynomial example needs.

Only construction, arithmetic, evaluation, degree slices and quotients by
linear forms ``x_i - a_i`` are supported.
"""

from __future__ import annotations

import itertools
import json
from functools import cached_property, lru_cache
from typing import Mapping, Sequence

import numpy as np

from ffdescent.errors import MixedRings
from ffdescent.rings import check_prime


class PolyElem:
    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: Mapping[tuple, int]):
        self.ring = ring
        p = ring.p
        self.terms = {e: c % p for e, c in terms.items() if c % p}

    def _coerce(self, other):
        if isinstance(other, PolyElem):
            if other.ring != self.ring:
                raise MixedRings(f"{self.ring!r} vs {other.ring!r}")
            return other
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            return self.ring.scalar(int(other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        out = dict(self.terms)
        for e, c in o.terms.items():
            out[e] = out.get(e, 0) + c
        return PolyElem(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return PolyElem(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        out: dict[tuple, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return PolyElem(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            other = self.ring.scalar(int(other))
        if not isinstance(other, PolyElem):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring.key, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def evaluate(self, point: Mapping[str, int]) -> int:
        total = 0
        for e, c in self.terms.items():
            term = c
            for name, k in zip(self.ring.vars, e):
                term *= point[name] ** k
            total += term
        return total % self.ring.p

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda e: (sum(e), e)):
            c = self.terms[e]
            mono = "*".join(
                (v if k == 1 else f"{v}^{k}") for v, k in zip(self.ring.vars, e) if k
            )
            if not mono:
                parts.append(str(c))
            else:
                parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)


class PolyRing:
    """F_p[vars]; infinite-dimensional unless there are no variables."""

    kind = "poly"

    def __init__(self, p: int, vars: Sequence[str]):
        self.p = check_prime(p)
        self.vars = tuple(str(v) for v in vars)
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("repeated variable name")
        self.nvars = len(self.vars)

    @property
    def descriptor(self) -> dict:
        return {"kind": self.kind, "p": self.p, "vars": list(self.vars)}

    @cached_property
    def key(self) -> str:
        return json.dumps(self.descriptor, sort_keys=True)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and other.key == self.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"PolyRing({self.key})"

    @property
    def dim(self):
        return 1 if self.nvars == 0 else None

    def zero(self) -> PolyElem:
        return PolyElem(self, {})

    def one(self) -> PolyElem:
        return self.scalar(1)

    def scalar(self, c: int) -> PolyElem:
        return PolyElem(self, {(0,) * self.nvars: c})

    def var(self, name: str) -> PolyElem:
        i = self.vars.index(name)
        e = [0] * self.nvars
        e[i] = 1
        return PolyElem(self, {tuple(e): 1})

    def elem(self, terms: Mapping[tuple, int]) -> PolyElem:
        return PolyElem(self, terms)

    # degree slices ---------------------------------------------------------

    def monomials(self, D: int) -> tuple[tuple, ...]:
        return _monomials(self.nvars, D)

    def slice_dim(self, D: int) -> int:
        return len(self.monomials(D))

    def encode(self, x: PolyElem, D: int) -> np.ndarray:
        index = _monomial_index(self.nvars, D)
        v = np.zeros(len(index), dtype=np.int64)
        for e, c in x.terms.items():
            if e not in index:
                raise ValueError(f"{x!r} has degree above {D}")
            v[index[e]] = c
        return v

    def decode(self, v: np.ndarray, D: int) -> PolyElem:
        mons = self.monomials(D)
        return PolyElem(self, {mons[i]: int(v[i]) for i in np.flatnonzero(v)})

    def mult_block(self, z: PolyElem, D_in: int, D_out: int) -> np.ndarray:
        """Matrix of ``x -> z x`` from the degree <= D_in slice into the degree <= D_out slice."""
        if D_in + max(z.degree, 0) > D_out:
            raise ValueError("product leaves the output slice")
        mons_in = self.monomials(D_in)
        out_index = _monomial_index(self.nvars, D_out)
        M = np.zeros((len(out_index), len(mons_in)), dtype=np.int64)
        for j, m in enumerate(mons_in):
            for e, c in z.terms.items():
                M[out_index[tuple(a + b for a, b in zip(m, e))], j] += c
        return M % self.p


@lru_cache(maxsize=None)
def _monomials(nvars: int, D: int) -> tuple[tuple, ...]:
    out = []
    for d in range(D + 1):
        for e in itertools.product(range(d + 1), repeat=nvars):
            if sum(e) == d:
                out.append(e)
    if nvars == 0:
        out = [()]
    return tuple(sorted(set(out), key=lambda e: (sum(e), tuple(-a for a in e))))


@lru_cache(maxsize=None)
def _monomial_index(nvars: int, D: int) -> dict:
    return {e: i for i, e in enumerate(_monomials(nvars, D))}


class QuotientMap:
    """Substitution ``x_i -> a_i``: the residue map F_p[x] -> F_p[x] / (x_i - a_i)."""

    def __init__(self, source: PolyRing, target: PolyRing, values: Mapping[str, int]):
        self.source = source
        self.target = target
        self.values = dict(values)

    def __call__(self, x: PolyElem) -> PolyElem:
        keep = [i for i, v in enumerate(self.source.vars) if v not in self.values]
        out: dict[tuple, int] = {}
        for e, c in x.terms.items():
            term = c
            for name, k in zip(self.source.vars, e):
                if name in self.values:
                    term *= self.values[name] ** k
            key = tuple(e[i] for i in keep)
            out[key] = out.get(key, 0) + term
        return PolyElem(self.target, out)


def quotient_by_linear(R: PolyRing, forms: Sequence[tuple[str, int]]) -> tuple[PolyRing, QuotientMap]:
    """R / (x_i - a_i for (x_i, a_i) in forms), realized by substitution."""
    names = [v for v, _ in forms]
    if len(set(names)) != len(names):
        raise ValueError("repeated variable in linear forms")
    for v in names:
        if v not in R.vars:
            raise ValueError(f"unknown variable {v!r}")
    values = {v: int(a) % R.p for v, a in forms}
    residue = PolyRing(R.p, [v for v in R.vars if v not in values])
    return residue, QuotientMap(R, residue, values)
