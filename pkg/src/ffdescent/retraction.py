"""Solving ``y o f = rhs`` for R-linear rows y, the engine behind every splitting question.

The unknown row y assigns a ring element y[b] to every target label b of f.
The condition ``sum_b y[b] f[b, a] = rhs[a]`` is R-linear in y, and becomes
F_p-linear after restricting scalars: block (a, b) of the system is the
multiplication matrix of f[b, a].  Every row shares that matrix, so all
rows are solved in one elimination.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from ffdescent import linalg
from ffdescent.errors import MixedRings
from ffdescent.modules import FinVec, IndexSet, LinMap, ScalarSpace


def retraction_system(f: LinMap, degree: int | None = None) -> tuple[np.ndarray, ScalarSpace]:
    sp = ScalarSpace(f.ring, degree, f.max_degree())
    A = np.zeros((len(f.source) * sp.n_out, len(f.target) * sp.n_in), dtype=np.int64)
    for ja, a in enumerate(f.source):
        for b, x in f.columns[a].entries.items():
            ib = f.target.position(b)
            A[ja * sp.n_out : (ja + 1) * sp.n_out, ib * sp.n_in : (ib + 1) * sp.n_in] = sp.block(x)
    return A, sp


def solve_rows(
    f: LinMap,
    rhs: Mapping,
    degree: int | None = None,
    rng: np.random.Generator | None = None,
) -> dict:
    """For each key w, a row y_w over f.target with ``y_w o f = rhs[w]``.

    ``rhs[w]`` is a FinVec over f.source.  Raises :class:`linalg.Unsolvable`
    whose certificate is attached to the first unsolvable key (``exc.key``).
    With ``rng`` the solution is sampled rather than canonical.
    """
    A, sp = retraction_system(f, degree)
    keys = list(rhs)
    B = np.zeros((A.shape[0], len(keys)), dtype=np.int64)
    for k, w in enumerate(keys):
        v = rhs[w]
        if v.index != f.source:
            raise MixedRings(f"right-hand side {w!r} is not indexed by the source")
        for a, x in v.entries.items():
            ja = f.source.position(a)
            B[ja * sp.n_out : (ja + 1) * sp.n_out, k] = sp.encode_out(x)
    try:
        X = linalg.solve(A, B, f.ring.p, rng)
    except linalg.Unsolvable as exc:
        exc.key = keys[exc.certificate.rhs_index]
        raise
    out = {}
    for k, w in enumerate(keys):
        col = X[:, k]
        entries = {
            b: sp.decode_in(col[ib * sp.n_in : (ib + 1) * sp.n_in]) for ib, b in enumerate(f.target)
        }
        out[w] = FinVec(f.target, f.ring, entries)
    return out


def rows_to_map(rows: Mapping, row_index: IndexSet, f: LinMap) -> LinMap:
    """Assemble rows y_w (w in row_index) into the map f.target -> (+)_{row_index} R."""
    cols = {b: {} for b in f.target}
    for w, y in rows.items():
        for b, x in y.entries.items():
            cols[b][w] = x
    return LinMap(f.target, row_index, f.ring, {b: FinVec(row_index, f.ring, c) for b, c in cols.items()})


def left_inverse(f: LinMap, degree: int | None = None, rng: np.random.Generator | None = None) -> LinMap:
    """r with ``r o f = id``; raises :class:`linalg.Unsolvable` when there is none.

    The entries of r are unknown ring elements, so the answer is R-linear by
    construction.  Over a polynomial ring the entries have degree at most
    ``degree``, and ``r o f = id`` is verified exactly for that r.
    """
    one = f.ring.one()
    rhs = {w: FinVec(f.source, f.ring, {w: one}) for w in f.source}
    rows = solve_rows(f, rhs, degree, rng)
    return rows_to_map(rows, f.source, f)


def has_left_inverse(f: LinMap, degree: int | None = None) -> bool:
    try:
        left_inverse(f, degree)
    except linalg.Unsolvable:
        return False
    return True


def tensor_two_term(d1: LinMap, d2: LinMap) -> LinMap:
    """P1 (x) P1' -> P2 (x) P1' (+) P1 (x) P2,  u (x) v -> (d1 u (x) v) (+) (u (x) d2 v).

    Target labels are ``("L", b, v)`` and ``("R", u, c)``.
    """
    if d1.ring != d2.ring:
        raise MixedRings("tensor_two_term needs a shared ring")
    ring = d1.ring
    source = IndexSet.product([d1.source, d2.source])
    target = IndexSet(
        [("L", b, v) for b in d1.target for v in d2.source]
        + [("R", u, c) for u in d1.source for c in d2.target]
    )
    cols = {}
    for u, v in source:
        entries = {("L", b, v): x for b, x in d1.columns[u].entries.items()}
        entries.update({("R", u, c): x for c, x in d2.columns[v].entries.items()})
        cols[(u, v)] = FinVec(target, ring, entries)
    return LinMap(source, target, ring, cols)
