"""Finitely supported vectors and linear maps between free modules.

An R-linear map is stored as sparse columns and realized as an F_p-linear
map by restriction of scalars along the ring's basis.  For a polynomial ring
the scalars are restricted to a degree slice, so kernels there are only
verified up to that degree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from ffdescent import linalg
from ffdescent.errors import CapExceeded, MixedRings
from ffdescent.polynomials import PolyRing
from ffdescent.rings import Ring

DEFAULT_POLY_DEGREE = 8
DEGREE0 = "*"


class IndexSet:
    """Ordered finite set of hashable labels, optionally a product or tagged union."""

    __slots__ = ("labels", "kind", "factors", "_pos")

    def __init__(self, labels: Iterable, kind: str = "plain", factors: Sequence[IndexSet] = ()):
        self.labels = tuple(labels)
        self.kind = kind
        self.factors = tuple(factors)
        self._pos = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._pos) != len(self.labels):
            raise ValueError("index labels must be distinct")

    @classmethod
    def product(cls, sets: Sequence[IndexSet]) -> IndexSet:
        """Tuples in lexicographic order of the factors; the empty product is a point."""
        sets = tuple(sets)
        return cls(itertools.product(*(s.labels for s in sets)), "product", sets)

    @classmethod
    def disjoint_union(cls, sets: Sequence[IndexSet]) -> IndexSet:
        """Labels ``(i, s)`` with the factor number i counted from 1."""
        sets = tuple(sets)
        labels = [(i, s) for i, S in enumerate(sets, start=1) for s in S.labels]
        return cls(labels, "union", sets)

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label):
        return label in self._pos

    def position(self, label) -> int:
        return self._pos[label]

    def __eq__(self, other):
        return (
            isinstance(other, IndexSet)
            and self.labels == other.labels
            and self.kind == other.kind
            and self.factors == other.factors
        )

    def __hash__(self):
        return hash((self.labels, self.kind))

    def __repr__(self):
        return f"IndexSet({list(self.labels)!r})"


def encode_label(label):
    """JSON form of a label: tuples become lists."""
    if isinstance(label, tuple):
        return [encode_label(x) for x in label]
    if isinstance(label, (np.integer,)):
        return int(label)
    return label


def decode_label(obj):
    if isinstance(obj, list):
        return tuple(decode_label(x) for x in obj)
    return obj


def proj(s: tuple, i: int) -> tuple:
    """p^n_i: drop the i-th coordinate (1-based)."""
    if not 1 <= i <= len(s):
        raise ValueError(f"coordinate {i} out of range for arity {len(s)}")
    return s[: i - 1] + s[i:]


def degeneracy(i: int, rest: tuple, x) -> tuple:
    """t_i^{rest}: insert ``x`` so that it becomes the i-th coordinate (1-based)."""
    if not 1 <= i <= len(rest) + 1:
        raise ValueError(f"slot {i} out of range for arity {len(rest) + 1}")
    return rest[: i - 1] + (x,) + rest[i - 1 :]


class FinVec:
    """A finitely supported function ``index -> ring``; zero entries are never stored."""

    __slots__ = ("index", "ring", "entries")

    def __init__(self, index: IndexSet, ring, entries: Mapping | None = None):
        self.index = index
        self.ring = ring
        clean = {}
        for lab, x in (entries or {}).items():
            if lab not in index:
                raise KeyError(f"label {lab!r} not in index set")
            if x.ring != ring:
                raise MixedRings(f"entry in {x.ring!r}, vector over {ring!r}")
            if not x.is_zero():
                clean[lab] = x
        self.entries = dict(sorted(clean.items(), key=lambda kv: index.position(kv[0])))

    @classmethod
    def delta(cls, index: IndexSet, ring, label) -> FinVec:
        return cls(index, ring, {label: ring.one()})

    def __getitem__(self, label):
        if label not in self.index:
            raise KeyError(label)
        return self.entries.get(label, self.ring.zero())

    __call__ = __getitem__

    def support(self) -> list:
        return list(self.entries)

    def _check(self, other: FinVec):
        if other.index != self.index or other.ring != self.ring:
            raise MixedRings("vectors over different index sets or rings")

    def __add__(self, other: FinVec) -> FinVec:
        self._check(other)
        out = dict(self.entries)
        for lab, x in other.entries.items():
            out[lab] = out[lab] + x if lab in out else x
        return FinVec(self.index, self.ring, out)

    def __neg__(self) -> FinVec:
        return FinVec(self.index, self.ring, {lab: -x for lab, x in self.entries.items()})

    def __sub__(self, other: FinVec) -> FinVec:
        return self + (-other)

    def scale(self, c) -> FinVec:
        return FinVec(self.index, self.ring, {lab: c * x for lab, x in self.entries.items()})

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, FinVec):
            return NotImplemented
        return self.index == other.index and self.ring == other.ring and self.entries == other.entries

    def __repr__(self):
        body = ", ".join(f"{lab!r}: {x!r}" for lab, x in self.entries.items())
        return f"FinVec({{{body}}})"


def _scalar_degree(x) -> int:
    return max(getattr(x, "degree", 0), 0)


class LinMap:
    """R-linear map ``(+)_source R -> (+)_target R`` stored column by column."""

    def __init__(self, source: IndexSet, target: IndexSet, ring, columns: Mapping):
        self.source = source
        self.target = target
        self.ring = ring
        cols = {}
        for a in source:
            col = columns.get(a)
            if col is None:
                col = FinVec(target, ring)
            elif not isinstance(col, FinVec):
                col = FinVec(target, ring, col)
            if col.index != target or col.ring != ring:
                raise MixedRings(f"column {a!r} does not live in the target module")
            cols[a] = col
        extra = set(columns) - set(source.labels)
        if extra:
            raise KeyError(f"columns for unknown source labels {sorted(map(repr, extra))}")
        self.columns = cols

    @classmethod
    def identity(cls, ring, index: IndexSet) -> LinMap:
        return cls(index, index, ring, {a: FinVec.delta(index, ring, a) for a in index})

    def entry(self, b, a):
        return self.columns[a][b]

    def __call__(self, v: FinVec) -> FinVec:
        if v.index != self.source:
            raise MixedRings("vector is not in the source module")
        out = FinVec(self.target, self.ring)
        for a, x in v.entries.items():
            out = out + self.columns[a].scale(x)
        return out

    def compose(self, first: LinMap) -> LinMap:
        """self o first."""
        if first.target != self.source:
            raise MixedRings("index sets do not match for composition")
        return LinMap(first.source, self.target, self.ring, {a: self(col) for a, col in first.columns.items()})

    def relabel(self, source_map: Callable | None = None, target_map: Callable | None = None) -> LinMap:
        sm = source_map or (lambda x: x)
        tm = target_map or (lambda x: x)
        src = IndexSet([sm(a) for a in self.source])
        tgt = IndexSet([tm(b) for b in self.target])
        cols = {sm(a): FinVec(tgt, self.ring, {tm(b): x for b, x in col.entries.items()}) for a, col in self.columns.items()}
        return LinMap(src, tgt, self.ring, cols)

    def max_degree(self) -> int:
        return max((_scalar_degree(x) for col in self.columns.values() for x in col.entries.values()), default=0)

    def __eq__(self, other):
        if not isinstance(other, LinMap):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.ring == other.ring
            and self.columns == other.columns
        )

    def __repr__(self):
        return f"LinMap({len(self.source)} -> {len(self.target)} over {self.ring!r})"


def stack_maps(maps: Sequence[LinMap]) -> LinMap:
    """(+)_i f_i for maps sharing a source, into the union of their (disjoint) targets."""
    src = maps[0].source
    ring = maps[0].ring
    labels = [b for f in maps for b in f.target]
    tgt = IndexSet(labels)
    cols = {}
    for a in src:
        entries = {}
        for f in maps:
            if f.source != src:
                raise MixedRings("stacked maps must share a source")
            entries.update(f.columns[a].entries)
        cols[a] = FinVec(tgt, ring, entries)
    return LinMap(src, tgt, ring, cols)


# ---------------------------------------------------------------------------
# restriction of scalars


class ScalarSpace:
    """Coordinates for ring elements: the full basis, or a degree slice of a polynomial ring.

    ``block(z)`` is the matrix of ``x -> z x`` from input coordinates to output
    coordinates.  For finite rings both coordinate systems are the basis.
    """

    def __init__(self, ring, degree: int | None = None, shift: int = 0):
        self.ring = ring
        self.p = ring.p
        if isinstance(ring, PolyRing):
            self.d_in = DEFAULT_POLY_DEGREE if degree is None else degree
            self.d_out = self.d_in + shift
            self.n_in = ring.slice_dim(self.d_in)
            self.n_out = ring.slice_dim(self.d_out)
        elif isinstance(ring, Ring):
            self.d_in = self.d_out = None
            self.n_in = self.n_out = ring.dim
        else:
            raise TypeError(f"no scalar coordinates for {ring!r}")
        self._cache: dict = {}

    @property
    def truncated(self) -> bool:
        return self.d_in is not None

    def block(self, z) -> np.ndarray:
        key = z
        M = self._cache.get(key)
        if M is None:
            if self.truncated:
                M = self.ring.mult_block(z, self.d_in, self.d_out)
            else:
                M = self.ring.mult_matrix(z)
            self._cache[key] = M
        return M

    def encode_out(self, x) -> np.ndarray:
        if self.truncated:
            return self.ring.encode(x, self.d_out)
        return self.ring.coords(x)

    def encode_in(self, x) -> np.ndarray:
        if self.truncated:
            return self.ring.encode(x, self.d_in)
        return self.ring.coords(x)

    def decode_in(self, v):
        if self.truncated:
            return self.ring.decode(v, self.d_in)
        return self.ring.from_coords(v)

    def decode_out(self, v):
        if self.truncated:
            return self.ring.decode(v, self.d_out)
        return self.ring.from_coords(v)


def fp_matrix(f: LinMap, degree: int | None = None) -> tuple[np.ndarray, ScalarSpace]:
    """Matrix of f over F_p: rows (target label, out coordinate), columns (source label, in coordinate)."""
    sp = ScalarSpace(f.ring, degree, f.max_degree())
    nt, ns = len(f.target), len(f.source)
    M = np.zeros((nt * sp.n_out, ns * sp.n_in), dtype=np.int64)
    for ja, a in enumerate(f.source):
        for b, x in f.columns[a].entries.items():
            ib = f.target.position(b)
            M[ib * sp.n_out : (ib + 1) * sp.n_out, ja * sp.n_in : (ja + 1) * sp.n_in] = sp.block(x)
    return M, sp


def _vecs_from_fp(rows: np.ndarray, index: IndexSet, sp: ScalarSpace, out: bool = False) -> list[FinVec]:
    n = sp.n_out if out else sp.n_in
    dec = sp.decode_out if out else sp.decode_in
    vecs = []
    for row in rows:
        entries = {lab: dec(row[k * n : (k + 1) * n]) for k, lab in enumerate(index)}
        vecs.append(FinVec(index, sp.ring, entries))
    return vecs


def kernel(f: LinMap, degree: int | None = None) -> list[FinVec]:
    """F_p-basis of ker f; empty iff f is injective (on the degree slice, for polynomial rings)."""
    M, sp = fp_matrix(f, degree)
    N = linalg.nullspace(M, f.ring.p)
    return _vecs_from_fp(N, f.source, sp)


def is_injective(f: LinMap, degree: int | None = None) -> bool:
    M, _ = fp_matrix(f, degree)
    return linalg.rank(M, f.ring.p) == M.shape[1]


@dataclass(frozen=True)
class PresentedModule:
    """coker f as an F_p-space: generators ``(target label, basis index)``, relation columns."""

    generators: tuple
    relations: np.ndarray
    p: int

    @property
    def fp_rank(self) -> int:
        return len(self.generators) - linalg.rank(self.relations, self.p)


def coker_presentation(f: LinMap) -> PresentedModule:
    if not isinstance(f.ring, Ring):
        raise TypeError("cokernel presentations need a finite ring")
    M, _ = fp_matrix(f)
    gens = tuple((b, c) for b in f.target for c in range(f.ring.dim))
    return PresentedModule(gens, M, f.ring.p)


# ---------------------------------------------------------------------------
# the maps Psi_{R,S} and Psi^n_{R,S_i}


def _values(psi, S: IndexSet) -> dict:
    if callable(psi) and not isinstance(psi, Mapping):
        return {s: psi(s) for s in S}
    return {s: psi[s] for s in S}


def psi_map(ring, S: IndexSet, psi) -> LinMap:
    """Psi_{R,S}: (+)_S R -> R (+) (+)_S R, 1_s -> 1_* + psi(s) 1_s.

    The degree-0 summand is labelled ``"*"``.
    """
    if DEGREE0 in S:
        raise ValueError(f"label {DEGREE0!r} is reserved for the degree-0 summand")
    vals = _values(psi, S)
    target = IndexSet((DEGREE0,) + S.labels)
    one = ring.one()
    cols = {s: FinVec(target, ring, {DEGREE0: one, s: vals[s]}) for s in S}
    return LinMap(S, target, ring, cols)


def psi_n_map(ring, sets: Sequence[IndexSet], psis: Sequence, i: int) -> LinMap:
    """Psi^n_{R,S_i}: 1_s -> 1_{p^n_i(s)} (+) psi_i(s_i) 1_s  (i counted from 1).

    Target labels are ``("f", i, s')`` for s' in prod_{j != i} S_j and
    ``("g", i, s)`` for s in prod_j S_j.
    """
    n = len(sets)
    if not 1 <= i <= n:
        raise IndexError(f"factor {i} not in 1..{n}")
    vals = _values(psis[i - 1], sets[i - 1])
    source = IndexSet.product(sets)
    rest = IndexSet.product([S for j, S in enumerate(sets, start=1) if j != i])
    target = IndexSet([("f", i, s) for s in rest] + [("g", i, s) for s in source])
    one = ring.one()
    cols = {s: FinVec(target, ring, {("f", i, proj(s, i)): one, ("g", i, s): vals[s[i - 1]]}) for s in source}
    return LinMap(source, target, ring, cols)


def check_cap(value: int, cap: int, what: str) -> None:
    if value > cap:
        raise CapExceeded(f"{what} = {value} exceeds cap {cap}")
