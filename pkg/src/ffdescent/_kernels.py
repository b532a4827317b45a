"""Hot integer kernels over F_p.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with identical semantics.  The public names dispatch to one of them
according to ``FFDESCENT_NUMBA`` (``0`` selects numpy; anything else, or unset,
selects numba when it imports).  All arrays are ``int64`` with entries reduced
into ``[0, p)``.
"""

from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


def numba_enabled() -> bool:
    return HAVE_NUMBA and os.environ.get("FFDESCENT_NUMBA", "1") != "0"


def inverse_table(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, p - 2, p)
    return inv


# ---------------------------------------------------------------------------
# reduced row echelon form


@njit(cache=True)
def _rref_nb(A, p, ncols, inv):
    m, n = A.shape
    pivots = np.empty(min(m, ncols), dtype=np.int64)
    row = 0
    for col in range(ncols):
        if row == m:
            break
        sel = -1
        for r in range(row, m):
            if A[r, col] != 0:
                sel = r
                break
        if sel < 0:
            continue
        if sel != row:
            for j in range(n):
                t = A[row, j]
                A[row, j] = A[sel, j]
                A[sel, j] = t
        c = inv[A[row, col]]
        if c != 1:
            for j in range(col, n):
                A[row, j] = (A[row, j] * c) % p
        for r in range(m):
            if r == row:
                continue
            f = A[r, col]
            if f == 0:
                continue
            g = p - f
            for j in range(col, n):
                A[r, j] = (A[r, j] + g * A[row, j]) % p
        pivots[row] = col
        row += 1
    return pivots[:row]


def _rref_np(A, p, ncols, inv):
    m, _ = A.shape
    pivots = []
    row = 0
    for col in range(ncols):
        if row == m:
            break
        nz = np.flatnonzero(A[row:, col])
        if nz.size == 0:
            continue
        sel = row + nz[0]
        if sel != row:
            A[[row, sel]] = A[[sel, row]]
        c = inv[A[row, col]]
        if c != 1:
            A[row, col:] = (A[row, col:] * c) % p
        others = np.flatnonzero(A[:, col])
        others = others[others != row]
        if others.size:
            A[others, col:] = (A[others, col:] - np.outer(A[others, col], A[row, col:])) % p
        pivots.append(col)
        row += 1
    return np.asarray(pivots, dtype=np.int64)


def rref_inplace(A: np.ndarray, p: int, ncols: int | None = None) -> np.ndarray:
    """Row-reduce ``A`` in place; pivots are searched in the first ``ncols`` columns only."""
    if ncols is None:
        ncols = A.shape[1]
    inv = inverse_table(p)
    if numba_enabled():
        return _rref_nb(A, np.int64(p), np.int64(ncols), inv)
    return _rref_np(A, p, ncols, inv)


# ---------------------------------------------------------------------------
# multiplication in a monomial basis: b_i * b_j = coef[i, j] * b_{idx[i, j]}, idx < 0 means 0


@njit(cache=True)
def _mono_mul_nb(a, b, idx, coef, p):
    n = a.shape[0]
    out = np.zeros(n, dtype=np.int64)
    for i in range(n):
        ai = a[i]
        if ai == 0:
            continue
        for j in range(n):
            bj = b[j]
            if bj == 0:
                continue
            k = idx[i, j]
            if k >= 0:
                out[k] = (out[k] + ai * bj * coef[i, j]) % p
    return out


def _mono_mul_np(a, b, idx, coef, p):
    ia = np.flatnonzero(a)
    jb = np.flatnonzero(b)
    out = np.zeros(a.shape[0], dtype=np.int64)
    if ia.size == 0 or jb.size == 0:
        return out
    sub = idx[np.ix_(ia, jb)]
    w = a[ia][:, None] * b[jb][None, :] * coef[np.ix_(ia, jb)]
    keep = sub >= 0
    np.add.at(out, sub[keep], w[keep])
    return out % p


@njit(cache=True)
def _mono_mul_rows_nb(A, B, idx, coef, p):
    rows, n = A.shape
    out = np.zeros((rows, n), dtype=np.int64)
    for r in range(rows):
        for i in range(n):
            ai = A[r, i]
            if ai == 0:
                continue
            for j in range(n):
                bj = B[r, j]
                if bj == 0:
                    continue
                k = idx[i, j]
                if k >= 0:
                    out[r, k] = (out[r, k] + ai * bj * coef[i, j]) % p
    return out


def _mono_mul_rows_np(A, B, idx, coef, p):
    rows, n = A.shape
    out = np.zeros((rows, n), dtype=np.int64)
    ii, jj = np.nonzero(idx >= 0)
    kk = idx[ii, jj]
    cc = coef[ii, jj]
    contrib = A[:, ii] * B[:, jj] * cc[None, :]
    np.add.at(out, (slice(None), kk), contrib)
    return out % p


@njit(cache=True)
def _mult_matrix_nb(z, idx, coef, p):
    n = z.shape[0]
    M = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        zi = z[i]
        if zi == 0:
            continue
        for j in range(n):
            k = idx[i, j]
            if k >= 0:
                M[k, j] = (M[k, j] + zi * coef[i, j]) % p
    return M


def _mult_matrix_np(z, idx, coef, p):
    n = z.shape[0]
    M = np.zeros((n, n), dtype=np.int64)
    cols = np.arange(n)
    for i in np.flatnonzero(z):
        ok = idx[i] >= 0
        M[idx[i, ok], cols[ok]] += z[i] * coef[i, ok]
    return M % p


def mono_mul(a, b, idx, coef, p):
    if numba_enabled():
        return _mono_mul_nb(a, b, idx, coef, np.int64(p))
    return _mono_mul_np(a, b, idx, coef, p)


def mono_mul_rows(A, B, idx, coef, p):
    """Row-wise products of two stacks of elements."""
    if numba_enabled():
        return _mono_mul_rows_nb(A, B, idx, coef, np.int64(p))
    return _mono_mul_rows_np(A, B, idx, coef, p)


def mult_matrix(z, idx, coef, p):
    """F_p matrix of ``x -> z * x`` in the monomial basis (column j is z * b_j)."""
    if numba_enabled():
        return _mult_matrix_nb(z, idx, coef, np.int64(p))
    return _mult_matrix_np(z, idx, coef, p)


# ---------------------------------------------------------------------------
# avoidance scan: hits has shape (n, P); find least flat index not covered by any row


@njit(cache=True)
def _first_uncovered_nb(hits):
    n, P = hits.shape
    for t in range(P):
        covered = False
        for i in range(n):
            if hits[i, t]:
                covered = True
                break
        if not covered:
            return t
    return -1


def _first_uncovered_np(hits):
    free = np.flatnonzero(~hits.any(axis=0))
    return int(free[0]) if free.size else -1


def first_uncovered(hits: np.ndarray) -> int:
    if numba_enabled():
        return int(_first_uncovered_nb(hits))
    return _first_uncovered_np(hits)


def warmup() -> None:
    """Compile the numba kernels once (no-op under the numpy path)."""
    if not numba_enabled():
        return
    A = np.array([[1, 1], [0, 1]], dtype=np.int64)
    rref_inplace(A.copy(), 2)
    idx = np.array([[0, -1], [-1, 1]], dtype=np.int64)
    coef = np.ones((2, 2), dtype=np.int64)
    v = np.array([1, 1], dtype=np.int64)
    mono_mul(v, v, idx, coef, 2)
    mono_mul_rows(A, A, idx, coef, 2)
    mult_matrix(v, idx, coef, 2)
    first_uncovered(np.zeros((1, 2), dtype=np.bool_))
