"""F^p and truncated Sym on free modules and maps, and faithful flatness of finite p-boolean maps.

On a free module (+)_S R the functor F^p gives R[X_s]/(X_s^p - X_s); a linear
map sends each generator to the linear form given by its column.  Sym is
only built as the slice of total degree at most D, with products of higher
degree set to zero there.

A finite p-boolean ring is a product of copies of F_p indexed by its points,
so a map of such rings is faithfully flat exactly when no primitive
idempotent of the source dies, which is also when the induced map on points
is surjective.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from ffdescent import linalg
from ffdescent.algebras import AlgElem, FreeAlgebra
from ffdescent.errors import CapExceeded, ConsistencyError, MixedRings, NotPBoolean
from ffdescent.group_ring import GroupRing
from ffdescent.indivisibility import IndivSpec, specialize
from ffdescent.modules import FinVec, IndexSet, LinMap, encode_label, fp_matrix, psi_map
from ffdescent.retraction import left_inverse
from ffdescent.rings import Ring, RingHom, _reduce_exponent, is_pboolean

MAX_GENERATORS = 10


def _exponent_mul(a: tuple, b: tuple, p: int) -> tuple:
    return tuple(int(v) for v in _reduce_exponent(np.add(a, b), p)) if a else ()


class FpFree(FreeAlgebra):
    """F^p_R((+)_S R) = R[X_s : s in S] / (X_s^p - X_s); labels are exponent tuples."""

    kind = "fp_free"

    def __init__(self, base: Ring, generators: IndexSet, check: bool = True):
        if len(generators) > MAX_GENERATORS:
            raise CapExceeded(f"{len(generators)} generators exceed cap {MAX_GENERATORS}")
        if check and not is_pboolean(base).holds:
            raise NotPBoolean(f"{base!r} is not p-boolean")
        super().__init__(base)
        self.generators = generators
        self.unit_label = (0,) * len(generators)

    @property
    def descriptor(self):
        return {"kind": self.kind, "base": self.base.descriptor, "generators": [encode_label(s) for s in self.generators]}

    @cached_property
    def labels(self):
        return tuple(itertools.product(range(self.p), repeat=len(self.generators)))

    def label_mul(self, a, b):
        return _exponent_mul(a, b, self.p)

    @cached_property
    def fibre_points(self):
        return tuple(itertools.product(range(self.p), repeat=len(self.generators)))

    def label_value(self, label, z):
        v = 1
        for e, x in zip(label, z):
            v *= x**e
        return v % self.p

    def variable(self, s) -> AlgElem:
        e = [0] * len(self.generators)
        e[self.generators.position(s)] = 1
        return self.term(tuple(e))

    def format_label(self, label):
        parts = []
        for s, e in zip(self.generators, label):
            if e:
                parts.append(f"X[{s}]" if e == 1 else f"X[{s}]^{e}")
        return "*".join(parts) if parts else "1"


class SymTrunc(FreeAlgebra):
    """Sym_R((+)_S R) cut at total degree D; products above D are zero."""

    kind = "sym_trunc"
    truncated = True

    def __init__(self, base: Ring, generators: IndexSet, D: int):
        if D < 1:
            raise ValueError("truncation degree must be >= 1")
        super().__init__(base)
        self.generators = generators
        self.D = D
        self.unit_label = (0,) * len(generators)

    @property
    def descriptor(self):
        return {
            "kind": self.kind,
            "base": self.base.descriptor,
            "generators": [encode_label(s) for s in self.generators],
            "D": self.D,
        }

    @cached_property
    def labels(self):
        k = len(self.generators)
        mons = [e for e in itertools.product(range(self.D + 1), repeat=k) if sum(e) <= self.D]
        return tuple(sorted(mons, key=lambda e: (sum(e), tuple(-v for v in e))))

    def label_mul(self, a, b):
        c = tuple(x + y for x, y in zip(a, b))
        return c if sum(c) <= self.D else None

    def variable(self, s) -> AlgElem:
        e = [0] * len(self.generators)
        e[self.generators.position(s)] = 1
        return self.term(tuple(e))

    def format_label(self, label):
        parts = [f"X[{s}]" if e == 1 else f"X[{s}]^{e}" for s, e in zip(self.generators, label) if e]
        return "*".join(parts) if parts else "1"


def fp_free(R: Ring, S: IndexSet) -> FpFree:
    return FpFree(R, S)


def _generator_exponents(alg: FreeAlgebra, label) -> list:
    return [(s, e) for s, e in zip(alg.generators, label) if e]


class AlgebraMap:
    """R-algebra map out of a polynomial-type algebra, fixed by the images of its generators."""

    def __init__(self, source: FreeAlgebra, target: FreeAlgebra, images: Mapping):
        if source.base != target.base:
            raise MixedRings("algebra maps must be over one base")
        missing = set(source.generators.labels) - set(images)
        if missing:
            raise KeyError(f"no image for generators {sorted(map(repr, missing))}")
        for y in images.values():
            if y.alg != target:
                raise MixedRings("generator image is not in the target")
        self.source = source
        self.target = target
        self.images = {s: images[s] for s in source.generators}
        self._mono: dict = {}

    def monomial_image(self, label) -> AlgElem:
        out = self._mono.get(label)
        if out is None:
            out = self.target.one()
            for s, e in _generator_exponents(self.source, label):
                out = out * self.images[s] ** e
            self._mono[label] = out
        return out

    def __call__(self, x: AlgElem) -> AlgElem:
        if x.alg != self.source:
            raise MixedRings("element is not in the source")
        out = self.target.zero()
        for lab, c in x.terms.items():
            out = out + self.monomial_image(lab) * c
        return out

    @cached_property
    def matrix(self) -> np.ndarray:
        """F_p matrix on the label-major bases."""
        cols = []
        for lab in self.source.labels:
            img = self.monomial_image(lab)
            for b in self.source.base.basis():
                cols.append(self.target.coords(img * b))
        return np.stack(cols, axis=1) % self.target.p

    def dense(self) -> RingHom:
        return RingHom(self.source.structure_ring, self.target.structure_ring, self.matrix)

    def is_homomorphism(self) -> bool:
        """phi(1) = 1 and phi(a b) = phi(a) phi(b) on every pair of basis elements."""
        return self.dense().is_multiplicative()

    def compose(self, first: AlgebraMap) -> AlgebraMap:
        """self o first."""
        if first.target != self.source:
            raise MixedRings("maps are not composable")
        return AlgebraMap(first.source, self.target, {s: self(y) for s, y in first.images.items()})

    def __eq__(self, other):
        if not isinstance(other, AlgebraMap):
            return NotImplemented
        return self.source == other.source and self.target == other.target and self.images == other.images


def identity_map(A: FreeAlgebra) -> AlgebraMap:
    return AlgebraMap(A, A, {s: A.variable(s) for s in A.generators})


def _linear_images(f: LinMap, source: FreeAlgebra, target: FreeAlgebra) -> dict:
    images = {}
    for u in f.source:
        y = target.zero()
        for b, x in f.columns[u].entries.items():
            y = y + target.variable(b) * x
        images[u] = y
    return images


def fp_map(f: LinMap) -> AlgebraMap:
    """F^p(f): X_u -> sum_b f[b, u] Y_b."""
    A = FpFree(f.ring, f.source)
    B = FpFree(f.ring, f.target, check=False)
    return AlgebraMap(A, B, _linear_images(f, A, B))


def sym_trunc_map(f: LinMap, D: int) -> AlgebraMap:
    """Degree-<= D slice of Sym(f); generators go to linear forms, so degrees are kept."""
    A = SymTrunc(f.ring, f.source, D)
    B = SymTrunc(f.ring, f.target, D)
    return AlgebraMap(A, B, _linear_images(f, A, B))


def group_ring_iso(S: IndexSet, base: Ring | None = None) -> AlgebraMap:
    """F^2(S) -> F_2{S}, X_s -> 1_{{s}}; both are F_2[X_s] / (X_s^2 - X_s)."""
    from ffdescent.rings import ProductFp

    base = base or ProductFp(2, 1)
    if base.p != 2:
        raise ValueError("the group-ring identification needs p = 2")
    A = FpFree(base, S)
    G = GroupRing(base, [S])
    return AlgebraMap(A, G, {s: G.singleton(s) for s in S})


def is_algebra_isomorphism(phi: AlgebraMap) -> bool:
    return phi.dense().is_ring_isomorphism()


class FpUnionIso:
    """F^p(S u T) -> F^p(S) (x)_R F^p(T), splitting each exponent tuple."""

    def __init__(self, base: Ring, S: IndexSet, T: IndexSet):
        from ffdescent.algebras import FreeTensor

        self.source = FpFree(base, IndexSet.disjoint_union([S, T]))
        self.left = FpFree(base, S)
        self.right = FpFree(base, T)
        self.target = FreeTensor(self.left, self.right)
        self._k = len(S)

    def label_map(self, e: tuple) -> tuple:
        return (e[: self._k], e[self._k :])

    def __call__(self, x: AlgElem) -> AlgElem:
        return AlgElem(self.target, {self.label_map(e): c for e, c in x.terms.items()})

    def verify(self) -> bool:
        labels = self.source.labels
        imgs = {e: self.label_map(e) for e in labels}
        if len(set(imgs.values())) != len(labels) or set(imgs.values()) != set(self.target.labels):
            return False
        smul, tmul = self.source.label_mul, self.target.label_mul
        return all(imgs[smul(a, b)] == tmul(imgs[a], imgs[b]) for a in labels for b in labels)


# ---------------------------------------------------------------------------
# splitting of F^p along a split injection


@dataclass
class LazardSplit:
    f: LinMap
    retraction: LinMap
    complement: list  # FinVecs over f.target spanning a free complement of im f
    module_iso: bool
    algebra_map: AlgebraMap
    algebra_iso: bool
    dims: tuple  # (dim F^p(N), dim F^p(M), dim F^p(K)) over R

    @property
    def verified(self) -> bool:
        return self.module_iso and self.algebra_iso and self.dims[0] == self.dims[1] * self.dims[2]


def _pointwise_complement(f: LinMap) -> list[FinVec]:
    """Glue point-by-point complements of im f with the primitive idempotents of R."""
    R = f.ring
    idems = R.primitive_idempotents()
    nN = len(f.target)
    k = nN - len(f.source)
    choices = []
    for q in range(len(R.point_labels)):
        M = specialize(f, q)
        picked = []
        current = M
        for b in range(nN):
            e = np.zeros((nN, 1), dtype=np.int64)
            e[b, 0] = 1
            trial = np.hstack([current, e])
            if linalg.rank(trial, R.p) > linalg.rank(current, R.p):
                current = trial
                picked.append(b)
        if len(picked) != k:
            raise ValueError("cokernel rank varies between points, so it is not free")
        choices.append(picked)
    out = []
    for j in range(k):
        entries: dict = {}
        for q, picked in enumerate(choices):
            b = f.target.labels[picked[j]]
            entries[b] = entries[b] + idems[q] if b in entries else idems[q]
        out.append(FinVec(f.target, R, entries))
    return out


def lazard_split_check(f: LinMap) -> LazardSplit:
    """N = im f (+) K with K free; F^p(N) = F^p(M) (x) F^p(K) as rings.

    Raises ValueError when f has no retraction (the cokernel is not projective).
    """
    R = f.ring
    if not is_pboolean(R).holds:
        raise NotPBoolean("lazard_split_check needs a p-boolean base")
    try:
        r = left_inverse(f)
    except linalg.Unsolvable as exc:
        raise ValueError("f is not split injective; its cokernel is not free") from exc
    comp = _pointwise_complement(f)
    K = IndexSet([("K", j) for j in range(len(comp))])
    # M (+) K -> N as one linear map
    src = IndexSet.disjoint_union([f.source, K])
    cols = {(1, a): f.columns[a] for a in f.source}
    cols.update({(2, kk): comp[j] for j, kk in enumerate(K)})
    g = LinMap(src, f.target, R, cols)
    Mg, _ = fp_matrix(g)
    module_iso = Mg.shape[0] == Mg.shape[1] and linalg.rank(Mg, R.p) == Mg.shape[0]
    phi = fp_map(g)
    algebra_iso = is_algebra_isomorphism(phi)
    p = R.p
    dims = (p ** len(f.target), p ** len(f.source), p ** len(K))
    return LazardSplit(f, r, comp, module_iso, phi, algebra_iso, dims)


# ---------------------------------------------------------------------------
# faithful flatness


@dataclass
class FlatnessVerdict:
    holds: bool
    injective: bool
    dead_idempotent: object = None  # a primitive idempotent of the source that maps to 0
    point_surjective: bool | None = None


def _hom_parts(phi) -> tuple[Ring, Ring, np.ndarray]:
    if isinstance(phi, AlgebraMap):
        h = phi.dense()
        return h.source, h.target, h.matrix
    if isinstance(phi, RingHom):
        return phi.source, phi.target, phi.matrix
    raise TypeError(f"cannot read a ring map from {phi!r}")


def faithfully_flat_check(phi) -> FlatnessVerdict:
    """Flat is automatic (von Neumann regular); faithful = every primitive idempotent survives."""
    A, B, M = _hom_parts(phi)
    for X in (A, B):
        if not is_pboolean(X).holds:
            raise NotPBoolean(f"{X!r} is not p-boolean")
    p = A.p
    idems = A.primitive_idempotents()
    dead = None
    for e in idems:
        if not ((M @ e.vec) % p).any():
            dead = e
            break
    injective = linalg.rank(M, p) == A.dim
    # points of B pulled back to A: each row of V_B M is a point of A
    VA, VB = A.eval_matrix, B.eval_matrix
    pulled = (VB @ M) % p
    hit = {tuple(row) for row in pulled}
    surjective = all(tuple(row) in hit for row in VA)
    holds = dead is None
    if holds != surjective:
        raise ConsistencyError("idempotent survival and point surjectivity disagree")
    if holds and not injective:
        raise ConsistencyError("faithfully flat map that is not injective")
    return FlatnessVerdict(holds, injective, dead, surjective)


# ---------------------------------------------------------------------------
# the assembled map


def direct_sum(maps: Sequence[LinMap]) -> LinMap:
    """(+)_i f_i on tagged labels (i, a) -> (i, b), i from 1."""
    ring = maps[0].ring
    src = IndexSet.disjoint_union([f.source for f in maps])
    tgt = IndexSet.disjoint_union([f.target for f in maps])
    cols = {}
    for i, f in enumerate(maps, start=1):
        if f.ring != ring:
            raise MixedRings("summands over different rings")
        for a in f.source:
            cols[(i, a)] = FinVec(tgt, ring, {(i, b): x for b, x in f.columns[a].entries.items()})
    return LinMap(src, tgt, ring, cols)


@dataclass
class BaseChange:
    """C = R{u S_i} -> B (x)_A C = B / (phi(X_s)^2 - phi(X_s))."""

    quotient_points: int  # points of B on which every phi(X_s) is 0 or 1
    c_points: int
    surjective: bool  # every point of C lies under some point of the quotient

    @property
    def faithfully_flat(self) -> bool:
        return self.surjective and self.quotient_points > 0


@dataclass
class MainMap:
    spec: IndivSpec
    summed: LinMap
    fp: AlgebraMap
    flatness: FlatnessVerdict
    base_change: BaseChange
    sym: AlgebraMap | None = field(default=None, repr=False)

    @property
    def dims(self) -> tuple[int, int]:
        return self.fp.source.dim, self.fp.target.dim


def _base_change(phi: AlgebraMap, sets: Sequence[IndexSet]) -> BaseChange:
    A, B = phi.source, phi.target
    p = A.p
    gens = list(A.generators)
    VB = B.eval_matrix
    vals = np.stack([(VB @ B.coords(phi.images[s])) % p for s in gens], axis=1)  # points x generators
    base_pts = len(A.base.point_labels)
    fib = VB.shape[0] // base_pts
    keep = np.all((vals == 0) | (vals == 1), axis=1)
    # B's points are (base point, fibre point) in base-major order
    seen = set()
    for row in np.flatnonzero(keep):
        c = row // fib
        mask = tuple(int(v) for v in vals[row])
        seen.add((c, mask))
    total = base_pts * 2 ** len(gens)
    return BaseChange(int(keep.sum()), total, len(seen) == total)


def main_map_builder(spec: IndivSpec, sym_degree: int | None = None) -> MainMap:
    """(x)_i F^p(Psi_{R,S_i}), realized as F^p of the direct sum on tagged generators."""
    R = spec.ring
    if not isinstance(R, Ring) or not is_pboolean(R).holds:
        raise NotPBoolean("the F^p track needs a finite p-boolean base")
    maps = [psi_map(R, S, psi) for S, psi in spec.entries]
    summed = direct_sum(maps)
    phi = fp_map(summed)
    if not phi.is_homomorphism():
        raise ConsistencyError("F^p of a linear map failed to be multiplicative")
    flat = faithfully_flat_check(phi)
    if not flat.holds:
        raise ConsistencyError(f"assembled map is not faithfully flat: {flat.dead_idempotent!r} dies")
    bc = _base_change(phi, spec.sets)
    sym = sym_trunc_map(summed, sym_degree) if sym_degree else None
    return MainMap(spec, summed, phi, flat, bc, sym)
