from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffdescent import _kernels, linalg


def brute_solutions(A, B, p):
    n = A.shape[1]
    return [np.array(x) for x in itertools.product(range(p), repeat=n) if np.array_equal(A @ np.array(x) % p, B % p)]


@st.composite
def small_system(draw):
    p = draw(st.sampled_from([2, 3, 5]))
    m = draw(st.integers(1, 4))
    n = draw(st.integers(1, 4))
    A = np.array(draw(st.lists(st.integers(0, p - 1), min_size=m * n, max_size=m * n)), dtype=np.int64).reshape(m, n)
    B = np.array(draw(st.lists(st.integers(0, p - 1), min_size=m, max_size=m)), dtype=np.int64)
    return A, B, p


@settings(max_examples=150, deadline=None)
@given(small_system(), st.integers(0, 10**6))
def test_solve_agrees_with_enumeration(system, seed):
    A, B, p = system
    sols = brute_solutions(A, B, p)
    rng = np.random.default_rng(seed)
    if sols:
        x = linalg.solve(A, B, p, rng)
        assert np.array_equal(A @ x % p, B % p)
    else:
        with pytest.raises(linalg.Unsolvable) as info:
            linalg.solve(A, B, p, rng)
        assert info.value.certificate.holds(A, B.reshape(-1, 1), p)


@settings(max_examples=100, deadline=None)
@given(small_system())
def test_rank_plus_nullity(system):
    A, _, p = system
    N = linalg.nullspace(A, p)
    r = linalg.rank(A, p)
    assert r + len(N) == A.shape[1]
    for v in N:
        assert not (A @ v % p).any()
    # kernel size matches enumeration
    zero = np.zeros(A.shape[0], dtype=np.int64)
    assert len(brute_solutions(A, zero, p)) == p ** len(N)


def test_certificate_round_trip():
    A = np.array([[1, 1], [1, 1]])
    B = np.array([0, 1])
    with pytest.raises(linalg.Unsolvable) as info:
        linalg.solve(A, B, 2)
    cert = info.value.certificate
    again = linalg.InfeasibilityCertificate.from_dict(cert.to_dict())
    assert again.holds(A, B.reshape(-1, 1), 2)


@pytest.fixture
def numpy_path(monkeypatch):
    monkeypatch.setenv("FFDESCENT_NUMBA", "0")
    assert not _kernels.numba_enabled()


def _run_all(rng):
    A = rng.integers(0, 5, size=(12, 15))
    R = A.copy()
    piv = _kernels.rref_inplace(R, 5)
    idx = rng.integers(-1, 6, size=(6, 6))
    idx = np.triu(idx) + np.triu(idx, 1).T
    coef = rng.integers(0, 5, size=(6, 6))
    coef = np.triu(coef) + np.triu(coef, 1).T
    X = rng.integers(0, 5, size=(7, 6))
    Y = rng.integers(0, 5, size=(7, 6))
    hits = rng.random((3, 50)) < 0.8
    return (
        R,
        piv,
        _kernels.mono_mul(X[0], Y[0], idx, coef, 5),
        _kernels.mono_mul_rows(X, Y, idx, coef, 5),
        _kernels.mult_matrix(X[0], idx, coef, 5),
        _kernels.first_uncovered(hits),
    )


def test_numba_and_numpy_paths_agree(monkeypatch):
    fast = _run_all(np.random.default_rng(3))
    monkeypatch.setenv("FFDESCENT_NUMBA", "0")
    slow = _run_all(np.random.default_rng(3))
    for a, b in zip(fast, slow):
        assert np.array_equal(np.asarray(a), np.asarray(b))


def test_mult_matrix_matches_mono_mul(rng):
    idx = np.array([[0, 1], [1, -1]])
    coef = np.ones((2, 2), dtype=np.int64)
    z = np.array([1, 1])
    M = _kernels.mult_matrix(z, idx, coef, 2)
    for j in range(2):
        e = np.zeros(2, dtype=np.int64)
        e[j] = 1
        assert np.array_equal(M[:, j], _kernels.mono_mul(z, e, idx, coef, 2))


def test_first_uncovered(numpy_path):
    hits = np.array([[True, False, True], [True, True, False]])
    assert _kernels.first_uncovered(hits) == -1
    hits[1, 1] = False
    assert _kernels.first_uncovered(hits) == 1
