"""Deciding 1- and n-indivisibility, and the example sequences that have it.

A sequence is n-indivisible when every Psi_{R,S_i} is universally injective
and no tuple of values (Psi_1(s_1), ..., Psi_n(s_n)) generates the unit
ideal.  For finite data universal injectivity is split injectivity, which the
retraction solver decides; over p-boolean rings plain injectivity must give
the same answer, and both are computed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ffdescent import linalg
from ffdescent.errors import CapExceeded, ConsistencyError, MixedRings
from ffdescent.modules import (
    DEFAULT_POLY_DEGREE,
    FinVec,
    IndexSet,
    LinMap,
    check_cap,
    kernel,
    psi_map,
)
from ffdescent.polynomials import PolyElem, PolyRing, quotient_by_linear
from ffdescent.retraction import left_inverse
from ffdescent.rings import (
    PBoolPoly,
    ProductFp,
    ProductRing,
    Ring,
    RingElem,
    TensorRing,
    ideal_quotient_dim,
    idempotent_family,
    is_pboolean,
)
from ffdescent import _kernels

MAX_TUPLES = 4096


@dataclass(frozen=True)
class IndivSpec:
    """A candidate indivisible sequence: pairs (S_i, Psi_i) over one ring."""

    ring: object
    entries: tuple
    degree: int | None = None  # slice bound when the ring is a polynomial ring

    def __post_init__(self):
        entries = tuple((S, dict(psi)) for S, psi in self.entries)
        if not entries:
            raise ValueError("an indivisible sequence needs n >= 1 entries")
        for S, psi in entries:
            if set(psi) != set(S.labels):
                raise ValueError("each Psi_i must be defined exactly on S_i")
            for x in psi.values():
                if x.ring != self.ring:
                    raise MixedRings(f"value {x!r} is not in {self.ring!r}")
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def sets(self) -> list[IndexSet]:
        return [S for S, _ in self.entries]

    @property
    def psis(self) -> list[dict]:
        return [psi for _, psi in self.entries]

    def prefix(self, m: int) -> IndivSpec:
        return IndivSpec(self.ring, self.entries[:m], self.degree)

    def values_at(self, t: tuple) -> list:
        return [psi[s] for (_, psi), s in zip(self.entries, t)]

    def tuples(self):
        return itertools.product(*(S.labels for S in self.sets))

    @property
    def tuple_count(self) -> int:
        return math.prod(len(S) for S in self.sets)


def idempotent_example(p: int, m: int, n: int = 1) -> IndivSpec:
    """R = F_p^m, S = {1..m}, Psi(s) = 1 - e_s, repeated n times."""
    R = ProductFp(p, m)
    S = IndexSet(range(1, m + 1))
    psi = {s: R.one() - R.idempotent(s) for s in S}
    return IndivSpec(R, tuple((S, psi) for _ in range(n)))


def build_polynomial_example(q: int, n: int, D: int = DEFAULT_POLY_DEGREE) -> IndivSpec:
    """F_q[x_1..x_n] with S_i = F_q and Psi_i(a) = x_i - a (q prime)."""
    try:
        R = PolyRing(q, [f"x{i}" for i in range(1, n + 1)])
    except ValueError as exc:
        raise ValueError(f"unsupported q = {q}: only prime fields are realized") from exc
    S = IndexSet(range(q))
    entries = []
    for i in range(1, n + 1):
        x = R.var(f"x{i}")
        entries.append((S, {a: x - a for a in S}))
    return IndivSpec(R, tuple(entries), D)


# ---------------------------------------------------------------------------
# 1-indivisibility


@dataclass
class OneIndivVerdict:
    holds: bool
    split: bool
    injective: bool
    left_inverse: LinMap | None = None
    kernel_witness: FinVec | None = None
    base_change: object = None  # a point of R where the specialized map is not injective
    certificate: linalg.InfeasibilityCertificate | None = None
    truncated_degree: int | None = None
    map: LinMap | None = field(default=None, repr=False)

    @property
    def reason(self) -> str:
        if self.holds:
            return "split"
        if self.kernel_witness is not None:
            return "kernel"
        if self.base_change is not None:
            return "base-change"
        return "not-split"


def specialize(f: LinMap, point: int) -> np.ndarray:
    """Matrix over F_p of f after base change along the point ``point`` of R."""
    R = f.ring
    M = np.zeros((len(f.target), len(f.source)), dtype=np.int64)
    for ja, a in enumerate(f.source):
        for b, x in f.columns[a].entries.items():
            M[f.target.position(b), ja] = R.evaluate(x)[point]
    return M % R.p


def is_one_indivisible(ring, S: IndexSet, psi, degree: int | None = None, rng=None) -> OneIndivVerdict:
    """Decide whether Psi_{R,S} is universally injective.

    The decision is "a left inverse exists".  Over a finite ring the kernel
    is computed as well; when the ring is p-boolean (von Neumann regular, so
    every module is flat) injectivity alone must give the same verdict.
    """
    f = psi_map(ring, S, psi)
    poly = isinstance(ring, PolyRing)
    D = (DEFAULT_POLY_DEGREE if degree is None else degree) if poly else None
    r = None
    cert = None
    try:
        r = left_inverse(f, D, rng)
        split = True
    except linalg.Unsolvable as exc:
        split = False
        cert = exc.certificate
    ker = kernel(f, D)
    injective = not ker
    if not poly and is_pboolean(ring).holds and split != injective:
        raise ConsistencyError(f"split = {split} but injective = {injective} over a p-boolean ring")
    verdict = OneIndivVerdict(split, split, injective, r, certificate=cert, truncated_degree=D, map=f)
    if not split:
        if ker:
            verdict.kernel_witness = ker[0]
        elif not poly:
            for q in range(len(ring.point_labels)):
                M = specialize(f, q)
                if linalg.rank(M, ring.p) < M.shape[1]:
                    verdict.base_change = ring.point_labels[q]
                    break
    return verdict


def verify_left_inverse(f: LinMap, r: LinMap) -> bool:
    return r.compose(f) == LinMap.identity(f.ring, f.source)


# ---------------------------------------------------------------------------
# unit ideal


def _multiplier_space(ring, elems, degree):
    if isinstance(ring, PolyRing):
        D = DEFAULT_POLY_DEGREE if degree is None else degree
        top = max((max(g.degree, 0) for g in elems), default=0)
        blocks = [ring.mult_block(g, D, D + top) for g in elems]
        rhs = ring.encode(ring.one(), D + top)
        return blocks, rhs, lambda v: ring.decode(v, D), ring.slice_dim(D)
    blocks = [ring.mult_matrix(g) for g in elems]
    return blocks, ring.coords(ring.one()), ring.from_coords, ring.dim


def unit_ideal_test(ring, elems: Sequence, degree: int | None = None) -> tuple[bool, list | None]:
    """Whether 1 = sum_i r_i g_i is solvable; returns the multipliers r_i when it is.

    Over a polynomial ring the multipliers are sought in degree at most
    ``degree`` (default 8), so ``False`` there means "none up to that degree".
    """
    elems = list(elems)
    if not elems:
        return False, None
    for g in elems:
        if g.ring != ring:
            raise MixedRings(f"{g!r} is not in {ring!r}")
    blocks, rhs, decode, width = _multiplier_space(ring, elems, degree)
    try:
        x = linalg.solve(np.hstack(blocks), rhs, ring.p)
    except linalg.Unsolvable:
        return False, None
    return True, [decode(x[k * width : (k + 1) * width]) for k in range(len(elems))]


def recombine(multipliers: Sequence, elems: Sequence):
    total = elems[0].ring.zero()
    for r, g in zip(multipliers, elems):
        total = total + r * g
    return total


def _linear_form(x) -> tuple[str, int] | None:
    """(v, a) when x = v - a for a single variable v, else None."""
    if not isinstance(x, PolyElem) or x.degree != 1:
        return None
    linear = [(e, c) for e, c in x.terms.items() if sum(e) == 1]
    if len(linear) != 1 or linear[0][1] != 1:
        return None
    e, _ = linear[0]
    const = x.terms.get((0,) * x.ring.nvars, 0)
    return x.ring.vars[e.index(1)], (-const) % x.ring.p


def tuple_quotient(spec: IndivSpec, t: tuple):
    """R / (Psi_i(t_i))_i by substitution, for the polynomial example."""
    forms = [_linear_form(x) for x in spec.values_at(t)]
    if any(fm is None for fm in forms):
        raise ValueError("values are not linear forms x_i - a")
    return quotient_by_linear(spec.ring, forms)


# ---------------------------------------------------------------------------
# n-indivisibility


@dataclass
class IndivReport:
    entries: list
    violating_tuple: tuple | None
    multipliers: list | None
    mode: str  # exhaustive | substitution | truncated
    tuples_checked: int

    @property
    def unit_ideal_free(self) -> bool:
        return self.violating_tuple is None

    @property
    def holds(self) -> bool:
        return self.unit_ideal_free and all(v.holds for v in self.entries)


def is_n_indivisible(spec: IndivSpec, cap: int = MAX_TUPLES, rng=None) -> IndivReport:
    check_cap(spec.tuple_count, cap, "number of tuples")
    R = spec.ring
    entries = [is_one_indivisible(R, S, psi, spec.degree, rng) for S, psi in spec.entries]
    if isinstance(R, PolyRing):
        distinct = all(_linear_form(x) is not None for psi in spec.psis for x in psi.values())
        mode = "substitution" if distinct else "truncated"
    else:
        mode = "exhaustive"
    checked = 0
    for t in spec.tuples():
        checked += 1
        vals = spec.values_at(t)
        if mode == "substitution":
            forms = [_linear_form(x) for x in vals]
            if len({v for v, _ in forms}) == len(forms):
                residue, hom = quotient_by_linear(R, forms)
                # the residue ring is a polynomial ring, never zero; 1 survives
                if hom(R.one()).is_zero():
                    raise ConsistencyError("substitution killed 1")
                continue
            generates, mult = unit_ideal_test(R, vals, spec.degree)
        else:
            generates, mult = unit_ideal_test(R, vals, spec.degree)
        if generates:
            return IndivReport(entries, t, mult, mode, checked)
    return IndivReport(entries, None, None, mode, checked)


# ---------------------------------------------------------------------------
# tensor lift


@dataclass
class TensorLift:
    spec: IndivSpec
    base: IndivSpec
    kunneth: list  # (tuple, dim of tensor quotient, product of factor quotient dims)

    @property
    def kunneth_holds(self) -> bool:
        return all(lhs == rhs for _, lhs, rhs in self.kunneth)


def tensor_lift(spec: IndivSpec, n: int | None = None) -> TensorLift:
    """Move entry i into tensor slot i of R^{(x) n}: Psi'_i = t_i o Psi_i.

    With a single entry and ``n`` given, that entry is used in every slot.
    Every quotient R / Psi_i(s) must be nonzero (the finite stand-in for the
    faithful flatness hypothesis).
    """
    R = spec.ring
    if not isinstance(R, Ring):
        raise TypeError("tensor_lift needs a finite ring")
    if n is not None and spec.n == 1:
        spec = IndivSpec(R, spec.entries * n, spec.degree)
    n = spec.n
    dims = []
    for S, psi in spec.entries:
        d = {s: ideal_quotient_dim(R, [psi[s]]) for s in S}
        dead = [s for s, v in d.items() if v == 0]
        if dead:
            raise ValueError(f"R / Psi({dead[0]!r}) is the zero ring")
        dims.append(d)
    if n == 1:
        rows = [((s,), dims[0][s], dims[0][s]) for s in spec.sets[0]]
        return TensorLift(spec, spec, rows)
    T = TensorRing([R] * n)
    lifted = []
    for i, (S, psi) in enumerate(spec.entries):
        t_i = T.inclusion(i)
        lifted.append((S, {s: t_i(psi[s]) for s in S}))
    out = IndivSpec(T, tuple(lifted))
    rows = []
    for t in out.tuples():
        lhs = ideal_quotient_dim(T, out.values_at(t))
        rhs = math.prod(dims[i][s] for i, s in enumerate(t))
        rows.append((t, lhs, rhs))
    lift = TensorLift(out, spec, rows)
    if not lift.kunneth_holds:
        bad = next(r for r in rows if r[1] != r[2])
        raise ConsistencyError(f"Kunneth dimensions disagree at {bad}")
    return lift


# ---------------------------------------------------------------------------
# idempotent tower


@dataclass
class IdempotentTower:
    """Level ``depth`` of the tower over PBoolPoly(p, N), truncated to width W.

    An element of level d is a W^d-tuple of level-0 elements; ``components``
    has shape (family size, W^d, dim of level 0).  Member j of level d is the
    diagonal tuple ``w -> member (j + w) mod N of level d - 1``.
    """

    base: PBoolPoly
    depth: int
    width: int
    components: np.ndarray

    @property
    def size(self) -> int:
        return self.components.shape[0]

    @property
    def dim(self) -> int:
        return self.components.shape[1] * self.base.dim

    def ring(self) -> Ring:
        """The level as an explicit ring; raises CapExceeded when too large."""
        R: Ring = self.base
        for _ in range(self.depth):
            R = ProductRing([R] * self.width)
        return R

    def family(self) -> list[RingElem]:
        R = self.ring()
        return [R.from_coords(self.components[j].ravel()) for j in range(self.size)]

    def product_table(self) -> np.ndarray:
        """(j, k, component, coords) array of member products, computed coordinatewise."""
        B = self.base
        N, C, d = self.components.shape
        left = np.repeat(self.components, N, axis=0).reshape(-1, d)
        right = np.tile(self.components, (N, 1, 1)).reshape(-1, d)
        prod = _kernels.mono_mul_rows(left, right, B.idx, B.coef, B.p)
        return prod.reshape(N, N, C, d)

    def is_orthogonal(self) -> bool:
        """Every member idempotent, distinct members multiply to zero."""
        P = self.product_table()
        N = self.size
        for j in range(N):
            for k in range(N):
                expected = self.components[j] if j == k else 0
                if not np.array_equal(P[j, k], np.broadcast_to(expected, P[j, k].shape)):
                    return False
        return True


def idempotent_tower(p: int, N: int, depth: int = 0, width: int = 2) -> IdempotentTower:
    if depth < 0 or depth > 2:
        raise CapExceeded("tower depth must be 0, 1 or 2")
    if width < 1:
        raise ValueError("width must be positive")
    base = PBoolPoly(p, N)
    fam = np.array([base.coords(a) for a in idempotent_family(base)], dtype=np.int64).reshape(N, 1, base.dim)
    comps = fam
    for _ in range(depth):
        # member j of the next level: component w is member (j + w) mod N
        comps = np.concatenate([np.roll(comps, -w, axis=0) for w in range(width)], axis=1)
    return IdempotentTower(base, depth, width, comps)
