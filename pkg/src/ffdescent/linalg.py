"""Exact dense linear algebra over F_p.

Everything here works on ``int64`` numpy arrays with entries in ``[0, p)``.
Row reduction is delegated to :mod:`ffdescent._kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ffdescent import _kernels


@dataclass(frozen=True)
class InfeasibilityCertificate:
    """A row combination ``y`` with ``y @ A == 0`` and ``y @ B[:, rhs_index] != 0``.

    This is the final inconsistent row of the eliminated system.
    """

    combination: tuple[int, ...]
    rhs_index: int

    def holds(self, A: np.ndarray, B: np.ndarray, p: int) -> bool:
        y = np.asarray(self.combination, dtype=np.int64)
        if y.shape[0] != A.shape[0]:
            return False
        if np.any((y @ A) % p):
            return False
        return bool((y @ B[:, self.rhs_index]) % p)

    def to_dict(self) -> dict:
        return {"combination": list(self.combination), "rhs_index": self.rhs_index}

    @classmethod
    def from_dict(cls, d: dict) -> InfeasibilityCertificate:
        return cls(tuple(int(v) for v in d["combination"]), int(d["rhs_index"]))


class Unsolvable(Exception):
    """Raised when ``A X = B`` has no solution; carries the certificate."""

    def __init__(self, certificate: InfeasibilityCertificate, message: str = "linear system is inconsistent", system=None):
        super().__init__(message)
        self.certificate = certificate
        # (A, B, p) of the inconsistent system, kept for replay
        self.system = system


def as_fp(A, p: int) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(A, dtype=np.int64) % p)


def rref(A, p: int, ncols: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    R = as_fp(A, p).copy()
    pivots = _kernels.rref_inplace(R, p, ncols)
    return R, pivots


def rank(A, p: int) -> int:
    A = as_fp(A, p)
    if A.size == 0:
        return 0
    return len(rref(A, p)[1])


def nullspace(A, p: int) -> np.ndarray:
    """Rows form a basis of ``{x : A x = 0}``."""
    A = as_fp(A, p)
    m, n = A.shape
    if m == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = rref(A, p)
    free = np.setdiff1d(np.arange(n), piv)
    N = np.zeros((free.size, n), dtype=np.int64)
    for k, f in enumerate(free):
        N[k, f] = 1
        N[k, piv] = (-R[: len(piv), f]) % p
    return N


def solve(A, B, p: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Return ``X`` with ``A X = B`` over F_p, or raise :class:`Unsolvable`.

    Without ``rng`` the free variables are zero in the natural column order.
    With ``rng`` the pivot search runs over a random column permutation and the
    free variables are drawn uniformly, which samples different solutions.
    """
    A = as_fp(A, p)
    B = as_fp(B, p)
    if B.ndim == 1:
        return solve(A, B[:, None], p, rng)[:, 0]
    m, n = A.shape
    k = B.shape[1]
    perm = rng.permutation(n) if rng is not None else np.arange(n)
    aug = np.zeros((m, n + k + m), dtype=np.int64)
    aug[:, :n] = A[:, perm]
    aug[:, n : n + k] = B
    aug[:, n + k :] = np.eye(m, dtype=np.int64)
    piv = _kernels.rref_inplace(aug, p, n)
    r = len(piv)
    tail = aug[r:, n : n + k]
    if tail.size and tail.any():
        rows, cols = np.nonzero(tail)
        j = int(cols.min())
        i = int(rows[cols == j][0])
        cert = InfeasibilityCertificate(tuple(int(v) for v in aug[r + i, n + k :]), j)
        raise Unsolvable(cert, system=(A, B, p))
    free = np.setdiff1d(np.arange(n), piv)
    X = np.zeros((n, k), dtype=np.int64)
    if rng is not None and free.size:
        X[free] = rng.integers(0, p, size=(free.size, k))
    X[piv] = (aug[:r, n : n + k] - aug[:r, free] @ X[free]) % p
    out = np.zeros_like(X)
    out[perm] = X
    return out
