"""The boolean group ring R{S} = R[B(S)] on finite subsets under union.

The index set is always a tagged disjoint union S_1 u ... u S_n (labels
``(i, s)``, i from 1), so R{S} itself is the case n = 1.  Basis subsets are
bitmasks over that universe: the product of basis elements is bitwise or.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Sequence

from ffdescent.algebras import AlgElem, FreeAlgebra, FreeTensor
from ffdescent.errors import CapExceeded, MixedRings
from ffdescent.modules import FinVec, IndexSet, encode_label
from ffdescent.rings import Ring

MAX_UNIVERSE = 16


class GroupRing(FreeAlgebra):
    kind = "group_ring"
    unit_label = 0

    def __init__(self, base: Ring, sets: IndexSet | Sequence[IndexSet]):
        super().__init__(base)
        if isinstance(sets, IndexSet):
            sets = [sets]
        self.sets = tuple(sets)
        self.n = len(self.sets)
        self.universe = IndexSet.disjoint_union(self.sets)
        if len(self.universe) > MAX_UNIVERSE:
            raise CapExceeded(f"group ring on {len(self.universe)} generators exceeds cap {MAX_UNIVERSE}")
        self.size = len(self.universe)
        # bits belonging to factor i (1-based)
        self.factor_masks = []
        for i in range(1, self.n + 1):
            m = 0
            for s in self.sets[i - 1]:
                m |= 1 << self.universe.position((i, s))
            self.factor_masks.append(m)

    @property
    def descriptor(self):
        return {
            "kind": self.kind,
            "base": self.base.descriptor,
            "sets": [[encode_label(s) for s in S] for S in self.sets],
        }

    def label_mul(self, a: int, b: int) -> int:
        return a | b

    @cached_property
    def labels(self):
        return tuple(range(1 << self.size))

    @cached_property
    def label_position(self):
        return _IdentityIndex(1 << self.size)

    def label_sort_key(self, label):
        return label

    @cached_property
    def fibre_points(self):
        return tuple(range(1 << self.size))

    def label_value(self, label: int, z: int) -> int:
        return 1 if label & z == label else 0

    # subsets -----------------------------------------------------------------

    def mask(self, members: Iterable) -> int:
        """Bitmask of a set of tagged labels ``(i, s)``."""
        m = 0
        for lab in members:
            m |= 1 << self.universe.position(lab)
        return m

    def members(self, mask: int) -> tuple:
        return tuple(lab for k, lab in enumerate(self.universe.labels) if mask >> k & 1)

    def subset(self, members: Iterable, c=None) -> AlgElem:
        """1_K for the subset K of tagged labels."""
        return self.term(self.mask(members), c)

    def singleton(self, s, i: int = 1, c=None) -> AlgElem:
        return self.term(1 << self.universe.position((i, s)), c)

    def format_label(self, mask: int) -> str:
        inner = ",".join(
            str(s) if self.n == 1 else f"{s}@{i}" for i, s in self.members(mask)
        )
        return "{" + inner + "}"

    def graded_part(self, x: AlgElem, degree: int) -> AlgElem:
        return AlgElem(self, {K: c for K, c in x.terms.items() if K.bit_count() == degree})

    def to_pairs(self, x: AlgElem) -> list:
        """Serialized form: ``[[sorted subset], coefficients]`` pairs."""
        return [[[encode_label(m) for m in self.members(K)], [int(v) for v in c.vec]] for K, c in sorted(x.terms.items())]

    def from_pairs(self, pairs) -> AlgElem:
        from ffdescent.modules import decode_label

        terms = {}
        for members, coeffs in pairs:
            K = self.mask(decode_label(m) for m in members)
            terms[K] = self.base.elem(coeffs)
        return AlgElem(self, terms)


class _IdentityIndex:
    __slots__ = ("n",)

    def __init__(self, n):
        self.n = n

    def __getitem__(self, k):
        if not 0 <= k < self.n:
            raise KeyError(k)
        return k


def gr_make(base: Ring, S: IndexSet) -> GroupRing:
    return GroupRing(base, [S])


def gr_mul(x: AlgElem, y: AlgElem) -> AlgElem:
    if x.alg != y.alg:
        raise MixedRings("group ring elements from different handles")
    return x * y


def iota_embed(gr: GroupRing, v: FinVec, i: int = 1) -> AlgElem:
    """R(iota_S): sum_s v(s) 1_{{s}} in degree 1."""
    if v.index != gr.sets[i - 1]:
        raise MixedRings("vector is not indexed by the group ring's factor")
    terms = {1 << gr.universe.position((i, s)): c for s, c in v.entries.items()}
    return AlgElem(gr, terms)


def tensor_iota(gr: GroupRing, t: tuple, c=None) -> AlgElem:
    """(x)_i R(iota_{S_i}) on the basis vector 1_t: the subset {t_1, ..., t_n}."""
    if len(t) != gr.n:
        raise ValueError(f"tuple of arity {len(t)} for {gr.n} factors")
    return gr.subset(((i, s) for i, s in enumerate(t, start=1)), c)


def d_extract(gr: GroupRing, x: AlgElem) -> FinVec:
    """d_n: the coefficient of {s_1, ..., s_n} with exactly one element from each S_i.

    Coefficients of any other subset are discarded, which makes d_n the
    left inverse of ``tensor_iota`` that is zero off its image.
    """
    if x.alg != gr:
        raise MixedRings("element is not in this group ring")
    target = IndexSet.product(gr.sets)
    entries = {}
    for K, c in x.terms.items():
        if K.bit_count() != gr.n:
            continue
        if all((K & m).bit_count() == 1 for m in gr.factor_masks):
            t = tuple(s for _, s in gr.members(K))
            entries[t] = c
    return FinVec(target, gr.base, entries)


class UnionIso:
    """R{S u T} -> R{S} (x)_R R{T}, 1_K -> 1_{K n S} (x) 1_{K n T}."""

    def __init__(self, base: Ring, S: IndexSet, T: IndexSet):
        overlap = set(S.labels) & set(T.labels)
        if overlap:
            raise ValueError(f"S and T overlap in {sorted(map(repr, overlap))}")
        self.source = GroupRing(base, [S, T])
        self.left = GroupRing(base, [S])
        self.right = GroupRing(base, [T])
        self.target = FreeTensor(self.left, self.right)
        nS = len(S)
        self._lo = (1 << nS) - 1
        self._nS = nS

    def label_map(self, K: int) -> tuple[int, int]:
        # tagged universe lists S first, then T, so the split is by bit position
        return (K & self._lo, K >> self._nS)

    def __call__(self, x: AlgElem) -> AlgElem:
        return AlgElem(self.target, {self.label_map(K): c for K, c in x.terms.items()})

    def inverse(self, y: AlgElem) -> AlgElem:
        return AlgElem(self.source, {a | (b << self._nS): c for (a, b), c in y.terms.items()})

    def verify(self) -> bool:
        """Bijective on basis labels, unital, multiplicative on every pair of basis subsets."""
        labels = self.source.labels
        images = [self.label_map(K) for K in labels]
        if len(set(images)) != len(labels) or set(images) != set(self.target.labels):
            return False
        if self(self.source.one()) != self.target.one():
            return False
        tmul = self.target.label_mul
        for K in labels:
            fK = images[K]
            for L in labels:
                if images[K | L] != tmul(fK, images[L]):
                    return False
        return True


def disjoint_union_iso(base: Ring, S: IndexSet, T: IndexSet) -> UnionIso:
    return UnionIso(base, S, T)
