"""Free algebras over a finite base ring with a monomial basis, stored sparsely.

Subclasses fix the basis labels and the label product; the product of two
basis labels is another label or ``None`` (zero).  Elements map labels to
nonzero base-ring coefficients, so structural equality is equality.
"""

from __future__ import annotations

import itertools
import json
from functools import cached_property
from typing import Iterator, Mapping

import numpy as np

from ffdescent.errors import CapExceeded, MixedRings
from ffdescent.rings import EXHAUSTIVE_CARDINALITY, Ring, RingElem, _combine_tables


def _is_base_scalar(alg, x) -> bool:
    # polynomial-ring coefficients are not RingElem instances
    return not isinstance(x, AlgElem) and getattr(x, "ring", None) == alg.base


class AlgElem:
    __slots__ = ("alg", "terms")

    def __init__(self, alg: FreeAlgebra, terms: Mapping):
        self.alg = alg
        self.terms = {lab: c for lab, c in terms.items() if not c.is_zero()}

    def _coerce(self, other):
        if isinstance(other, AlgElem):
            if other.alg is not self.alg and other.alg != self.alg:
                raise MixedRings(f"{self.alg!r} vs {other.alg!r}")
            return other
        if isinstance(other, RingElem) or _is_base_scalar(self.alg, other):
            return self.alg.scalar(other)
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            return self.alg.scalar(self.alg.base.scalar(int(other)))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        out = dict(self.terms)
        for lab, c in o.terms.items():
            out[lab] = out[lab] + c if lab in out else c
        return AlgElem(self.alg, out)

    __radd__ = __add__

    def __neg__(self):
        return AlgElem(self.alg, {lab: -c for lab, c in self.terms.items()})

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
        if isinstance(other, RingElem) or _is_base_scalar(self.alg, other):
            return AlgElem(self.alg, {lab: other * c for lab, c in self.terms.items()})
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        mul = self.alg.label_mul
        out: dict = {}
        for l1, c1 in self.terms.items():
            for l2, c2 in o.terms.items():
                lab = mul(l1, l2)
                if lab is None:
                    continue
                c = c1 * c2
                out[lab] = out[lab] + c if lab in out else c
        return AlgElem(self.alg, out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, e: int):
        result = self.alg.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, AlgElem):
            try:
                other = self._coerce(other)
            except MixedRings:
                return False
            if other is NotImplemented:
                return NotImplemented
        return self.alg == other.alg and self.terms == other.terms

    def __hash__(self):
        return hash((self.alg.key, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, label) -> RingElem:
        return self.terms.get(label, self.alg.base.zero())

    @property
    def ring(self):
        return self.alg

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for lab in sorted(self.terms, key=self.alg.label_sort_key):
            parts.append(f"({self.terms[lab]!r})*{self.alg.format_label(lab)}")
        return " + ".join(parts)


class FreeAlgebra:
    """Commutative R-algebra, free over R on the basis ``labels``."""

    kind = "free"

    def __init__(self, base: Ring):
        self.base = base
        self.p = base.p

    # subclass interface ------------------------------------------------------

    unit_label = None

    def label_mul(self, a, b):
        raise NotImplementedError

    @cached_property
    def labels(self) -> tuple:
        raise NotImplementedError

    def label_value(self, label, fibre_point) -> int:
        """Value of the basis label at a point of the fibre over a base point (p-boolean case)."""
        raise NotImplementedError

    @cached_property
    def fibre_points(self) -> tuple:
        raise NotImplementedError

    @property
    def descriptor(self) -> dict:
        raise NotImplementedError

    def format_label(self, label) -> str:
        return str(label)

    def label_sort_key(self, label):
        return self.label_position[label]

    # identity ------------------------------------------------------------------

    @cached_property
    def key(self) -> str:
        return json.dumps(self.descriptor, sort_keys=True, default=str)

    def __eq__(self, other):
        return isinstance(other, FreeAlgebra) and (other is self or other.key == self.key)

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"{type(self).__name__}({self.key})"

    # elements ------------------------------------------------------------------

    def zero(self) -> AlgElem:
        return AlgElem(self, {})

    def one(self) -> AlgElem:
        return AlgElem(self, {self.unit_label: self.base.one()})

    def scalar(self, c: RingElem) -> AlgElem:
        return AlgElem(self, {self.unit_label: c})

    def term(self, label, c: RingElem | None = None) -> AlgElem:
        return AlgElem(self, {label: self.base.one() if c is None else c})

    def elem(self, terms: Mapping) -> AlgElem:
        return AlgElem(self, terms)

    @cached_property
    def label_position(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}

    @property
    def rank(self) -> int:
        """Rank as a free module over the base ring."""
        return len(self.labels)

    @property
    def dim(self) -> int:
        return self.rank * self.base.dim

    @property
    def cardinality(self) -> int:
        return self.p**self.dim

    def basis(self) -> list[AlgElem]:
        """F_p basis: label times base basis vector."""
        return [self.term(lab, b) for lab in self.labels for b in self.base.basis()]

    def coords(self, x: AlgElem) -> np.ndarray:
        if x.alg != self:
            raise MixedRings(f"{x.alg!r} is not {self!r}")
        d = self.base.dim
        v = np.zeros(self.dim, dtype=np.int64)
        pos = self.label_position
        for lab, c in x.terms.items():
            k = pos[lab]
            v[k * d : (k + 1) * d] = c.vec
        return v

    def from_coords(self, v) -> AlgElem:
        v = np.asarray(v, dtype=np.int64) % self.p
        d = self.base.dim
        terms = {}
        for k, lab in enumerate(self.labels):
            blk = v[k * d : (k + 1) * d]
            if blk.any():
                terms[lab] = self.base.from_coords(blk)
        return AlgElem(self, terms)

    def elements(self) -> Iterator[AlgElem]:
        if self.cardinality > EXHAUSTIVE_CARDINALITY:
            raise CapExceeded(f"|A| = {self.p}^{self.dim} is too large to enumerate")
        for v in itertools.product(range(self.p), repeat=self.dim):
            yield self.from_coords(v)

    @cached_property
    def structure_ring(self) -> StructureRing:
        """The same algebra as a dense :class:`Ring` over F_p (label-major basis)."""
        return StructureRing(self)

    def dense(self, x: AlgElem) -> RingElem:
        return self.structure_ring.from_coords(self.coords(x))

    def sparse(self, x: RingElem) -> AlgElem:
        return self.from_coords(x.vec)

    # spectrum (for p-boolean algebras) --------------------------------------------

    @cached_property
    def point_labels(self) -> tuple:
        return tuple(itertools.product(self.base.point_labels, self.fibre_points))

    def evaluate(self, x: AlgElem) -> np.ndarray:
        """Values of x at every point ``(base point, fibre point)``."""
        base_vals = {lab: self.base.evaluate(c) for lab, c in x.terms.items()}
        fibres = self.fibre_points
        out = np.zeros((len(self.base.point_labels), len(fibres)), dtype=np.int64)
        for lab, bv in base_vals.items():
            lv = np.array([self.label_value(lab, q) for q in fibres], dtype=np.int64)
            out += np.outer(bv, lv)
        return (out % self.p).ravel()

    @cached_property
    def eval_matrix(self) -> np.ndarray:
        """Rows are points, columns the F_p basis (label-major)."""
        fibres = self.fibre_points
        L = np.array([[self.label_value(lab, q) for lab in self.labels] for q in fibres], dtype=np.int64)
        B = self.base.eval_matrix
        # value at (c, q) of label l times base basis b: B[c, b] * L[q, l]
        V = np.einsum("cb,ql->cqlb", B, L).reshape(B.shape[0] * len(fibres), self.dim)
        return V % self.p


class StructureRing(Ring):
    """Dense multiplication tables of a free algebra over a monomial base ring."""

    kind = "structure"

    def __init__(self, alg: FreeAlgebra):
        self.algebra = alg
        labels = alg.labels
        pos = alg.label_position
        r = len(labels)
        lidx = np.full((r, r), -1, dtype=np.int64)
        for i, a in enumerate(labels):
            for j, b in enumerate(labels):
                c = alg.label_mul(a, b)
                if c is not None:
                    lidx[i, j] = pos[c]
        base = alg.base
        idx, coef = _combine_tables(lidx, np.ones((r, r), dtype=np.int64), base.idx, base.coef, alg.p)
        flat = [(lab, b) for lab in labels for b in base.labels]
        super().__init__(alg.p, flat, idx, coef, alg.coords(alg.one()))

    @property
    def descriptor(self):
        return {"kind": self.kind, "of": self.algebra.descriptor}

    def format_label(self, label) -> str:
        lab, b = label
        return f"{self.algebra.base.format_label(b)}*{self.algebra.format_label(lab)}"

    @cached_property
    def point_labels(self):
        return self.algebra.point_labels

    @cached_property
    def eval_matrix(self):
        return self.algebra.eval_matrix


class FreeTensor(FreeAlgebra):
    """A (x)_R B for free algebras over the same base; labels are pairs."""

    kind = "free_tensor"

    def __init__(self, left: FreeAlgebra, right: FreeAlgebra):
        if left.base != right.base:
            raise MixedRings("tensor factors must share the base ring")
        super().__init__(left.base)
        self.left = left
        self.right = right
        self.unit_label = (left.unit_label, right.unit_label)

    @property
    def descriptor(self):
        return {"kind": self.kind, "left": self.left.descriptor, "right": self.right.descriptor}

    @cached_property
    def labels(self):
        return tuple(itertools.product(self.left.labels, self.right.labels))

    def label_mul(self, a, b):
        x = self.left.label_mul(a[0], b[0])
        if x is None:
            return None
        y = self.right.label_mul(a[1], b[1])
        if y is None:
            return None
        return (x, y)

    def pure(self, x: AlgElem, y: AlgElem) -> AlgElem:
        out: dict = {}
        for la, ca in x.terms.items():
            for lb, cb in y.terms.items():
                out[(la, lb)] = ca * cb
        return AlgElem(self, out)

    @cached_property
    def fibre_points(self):
        return tuple(itertools.product(self.left.fibre_points, self.right.fibre_points))

    def label_value(self, label, q):
        return self.left.label_value(label[0], q[0]) * self.right.label_value(label[1], q[1]) % self.p

    def format_label(self, label):
        return f"{self.left.format_label(label[0])} (x) {self.right.format_label(label[1])}"
