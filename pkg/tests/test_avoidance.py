from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffdescent.avoidance import (
    AvoidanceProblem,
    covering_problem,
    find_avoiding_exhaustive,
    find_avoiding_greedy,
    greedy_trap,
    order_sensitivity,
    random_problem,
    sizes_pass_threshold,
    threshold_check,
    threshold_sizes,
)
from ffdescent.errors import CapExceeded
from ffdescent.modules import FinVec, IndexSet
from ffdescent.rings import ProductFp


def brute_force(problem):
    for s in itertools.product(*(S.labels for S in problem.sets)):
        if problem.avoids(s):
            return s
    return None


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=3), st.integers(0, 3), st.integers(0, 10**6))
def test_solvers_agree_with_enumeration(sizes, k, seed):
    prob = random_problem(sizes, k, np.random.default_rng(seed))
    assert prob.slice_bound() <= k
    ex = find_avoiding_exhaustive(prob)
    assert ex.witness == brute_force(prob)
    g = find_avoiding_greedy(prob)
    if g.found:
        assert prob.avoids(g.witness) and ex.found
    if not ex.found:
        assert not g.found


@pytest.mark.parametrize("n,k", list(itertools.product([1, 2, 3], [1, 2, 3])))
def test_threshold_guarantees_greedy(n, k):
    sizes = threshold_sizes(n, k)
    rng = np.random.default_rng(100 * n + k)
    for _ in range(50):
        prob = random_problem(sizes, k, rng)
        assert threshold_check(prob, k)
        assert find_avoiding_greedy(prob).found


def test_threshold_sizes_are_minimal():
    for n, k in itertools.product([1, 2, 3], [1, 2, 3]):
        sizes = threshold_sizes(n, k)
        assert sizes_pass_threshold(sizes, k)
        for j in range(n):
            smaller = list(sizes)
            smaller[j] -= 1
            assert not sizes_pass_threshold(smaller, k)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_covering_problem_has_no_witness(n):
    prob = covering_problem(n)
    assert prob.slice_bound() == 1
    assert not threshold_check(prob, 1)
    assert brute_force(prob) is None
    assert not find_avoiding_exhaustive(prob).found
    assert not find_avoiding_greedy(prob).found


def test_greedy_trap():
    prob = greedy_trap()
    g = find_avoiding_greedy(prob)
    assert not g.found and g.failure_level == 2
    ex = find_avoiding_exhaustive(prob)
    assert ex.witness == (0, 2) == brute_force(prob)


def test_order_sensitivity_on_trap():
    assert order_sensitivity(greedy_trap()) == [False, True]


def test_greedy_records_choices():
    hits = [np.zeros((2, 3), bool), np.zeros((2, 3), bool)]
    hits[1][0, 0] = True
    g = find_avoiding_greedy(AvoidanceProblem.from_arrays(hits))
    assert g.witness == (0, 1)
    assert g.choices == [(2, 1), (1, 0)]
    assert g.excluded == [(2, 1), (1, 0)]


def test_from_functions_reads_diagonal_values_only():
    R = ProductFp(2, 1)
    S1, S2 = IndexSet("ab"), IndexSet([0, 1])
    P = IndexSet.product([S1, S2])
    # v_2(("a",)) hits (a, 0) and also (b, 1), which is off its own fibre and must be ignored
    v2 = {("a",): FinVec(P, R, {("a", 0): R.one(), ("b", 1): R.one()})}
    prob = AvoidanceProblem.from_functions([S1, S2], [{}, v2])
    assert not prob.avoids(("a", 0))
    assert prob.avoids(("b", 1))


def test_exhaustive_cap():
    prob = AvoidanceProblem.from_arrays([np.zeros((10, 10), bool)] * 2)
    with pytest.raises(CapExceeded):
        find_avoiding_exhaustive(prob, cap=50)
