from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffdescent import linalg
from ffdescent.errors import CapExceeded
from ffdescent.indivisibility import (
    IndivSpec,
    build_polynomial_example,
    idempotent_example,
    idempotent_tower,
    is_n_indivisible,
    is_one_indivisible,
    recombine,
    specialize,
    tensor_lift,
    tuple_quotient,
    unit_ideal_test,
    verify_left_inverse,
)
from ffdescent.modules import IndexSet, psi_map
from ffdescent.rings import PBoolPoly, ProductFp, ProductRing, TensorRing, ideal_quotient_dim, is_orthogonal_family


def pointwise_injective(ring, S, psi):
    """Oracle: over F_p^N a map of free modules is injective iff it is at every point."""
    f = psi_map(ring, S, psi)
    return all(linalg.rank(specialize(f, q), ring.p) == len(S) for q in range(len(ring.point_labels)))


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_idempotent_example_is_one_indivisible(p, m):
    spec = idempotent_example(p, m)
    (S, psi), = spec.entries
    v = is_one_indivisible(spec.ring, S, psi)
    assert v.holds and v.split and v.injective
    assert verify_left_inverse(v.map, v.left_inverse)
    assert pointwise_injective(spec.ring, S, psi)


def test_zero_psi_has_kernel():
    R = ProductFp(2, 2)
    S = IndexSet("ab")
    v = is_one_indivisible(R, S, {s: R.zero() for s in S})
    assert not v.holds and v.reason == "kernel"
    assert v.map(v.kernel_witness).is_zero() and not v.kernel_witness.is_zero()
    assert v.certificate is not None


def test_pointwise_failure_is_reported():
    # at the point e_1 both columns become (1, 0, 0): a base change kills injectivity
    R = ProductFp(3, 2)
    S = IndexSet([1, 2])
    psi = {1: R.idempotent(2), 2: R.idempotent(2)}
    v = is_one_indivisible(R, S, psi)
    assert not v.holds
    assert not pointwise_injective(R, S, psi)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3]), st.integers(1, 3), st.integers(1, 3))
def test_split_matches_pointwise_oracle(seed, p, m, k):
    rng = np.random.default_rng(seed)
    R = ProductFp(p, m)
    S = IndexSet(range(k))
    psi = {s: R.random_element(rng) for s in S}
    v = is_one_indivisible(R, S, psi)
    assert v.holds == pointwise_injective(R, S, psi)


def test_unit_tuple_is_found():
    R = ProductFp(2, 2)
    S = IndexSet("a")
    spec = IndivSpec(R, ((S, {"a": R.one()}),))
    rep = is_n_indivisible(spec)
    assert not rep.holds and rep.violating_tuple == ("a",)
    assert recombine(rep.multipliers, spec.values_at(("a",))) == R.one()


def test_unit_ideal_test_certifies():
    R = ProductFp(3, 3)
    gens = [R.idempotent(1), R.idempotent(2) + R.idempotent(3)]
    ok, mult = unit_ideal_test(R, gens)
    assert ok and recombine(mult, gens) == R.one()
    ok, mult = unit_ideal_test(R, [R.idempotent(1), R.idempotent(2)])
    assert not ok and mult is None
    # oracle: the ideal is proper iff the quotient is nonzero
    assert ideal_quotient_dim(R, [R.idempotent(1), R.idempotent(2)]) == 1


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("m", [1, 2, 3, 4])
@pytest.mark.parametrize("n", [2, 3])
def test_tensor_lifts(p, m, n):
    if m**n > 64:
        pytest.skip("above the exhaustive tuple budget")
    lift = tensor_lift(idempotent_example(p, m), n)
    assert lift.kunneth_holds
    rep = is_n_indivisible(lift.spec)
    assert rep.holds and rep.tuples_checked == m**n


def test_tensor_lift_of_one_is_identity():
    spec = idempotent_example(2, 3)
    lift = tensor_lift(spec)
    assert lift.spec == spec


def test_tensor_lift_rejects_dead_quotient():
    R = ProductFp(2, 1)
    spec = IndivSpec(R, ((IndexSet("a"), {"a": R.one()}),))
    with pytest.raises(ValueError):
        tensor_lift(spec, 2)


def test_shrinking_sets_keeps_indivisibility():
    lift = tensor_lift(idempotent_example(3, 3), 2).spec
    for keep in itertools.product([[1], [1, 2], [2, 3]], repeat=2):
        entries = []
        for (S, psi), kept in zip(lift.entries, keep):
            sub = IndexSet(kept)
            entries.append((sub, {s: psi[s] for s in sub}))
        assert is_n_indivisible(IndivSpec(lift.ring, tuple(entries))).holds


def test_faithfully_flat_base_change_preserves():
    # R -> R (x) F_p^2 is faithfully flat; push the idempotent example along it
    spec = idempotent_example(2, 2)
    T = TensorRing([spec.ring, ProductFp(2, 2)])
    inc = T.inclusion(0)
    (S, psi), = spec.entries
    moved = IndivSpec(T, ((S, {s: inc(psi[s]) for s in S}),))
    assert is_n_indivisible(moved).holds


@pytest.mark.parametrize("q", [2, 3, 5])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_polynomial_example(q, n):
    spec = build_polynomial_example(q, n, max(1, q - 1))
    rep = is_n_indivisible(spec)
    assert rep.holds and rep.mode == "substitution"
    assert rep.tuples_checked == q**n
    for t in spec.tuples():
        residue, hom = tuple_quotient(spec, t)
        assert residue.nvars == 0 and hom(spec.ring.one()) == residue.one()


@pytest.mark.parametrize("q", [2, 3, 5])
@pytest.mark.parametrize("n", [1, 2])
def test_polynomial_quotient_dimension_oracle(q, n):
    # oracle: F_q[x]/(x_i - a_i) is a quotient of F_q[x]/(x_i^q - x_i), where linear algebra is finite
    B = PBoolPoly(q, n)
    for t in itertools.product(range(q), repeat=n):
        gens = [B.variable(i) - a for i, a in enumerate(t, start=1)]
        assert ideal_quotient_dim(B, gens) == 1


def test_unsupported_q():
    with pytest.raises(ValueError):
        build_polynomial_example(4, 1)


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("N", range(1, 7))
def test_tower_level_zero(p, N):
    tower = idempotent_tower(p, N)
    assert tower.is_orthogonal()
    if tower.dim <= 243:
        assert is_orthogonal_family(tower.family())


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("N", range(1, 7))
@pytest.mark.parametrize("width", [1, 2, 3])
def test_tower_level_one(p, N, width):
    tower = idempotent_tower(p, N, depth=1, width=width)
    assert tower.is_orthogonal()
    assert tower.size == N


def test_tower_dense_agrees_on_small_level():
    tower = idempotent_tower(2, 3, depth=1, width=2)
    fam = tower.family()
    assert is_orthogonal_family(fam)
    assert tower.ring().dim == tower.dim


def test_full_product_is_not_orthogonal():
    # all pairs (a_i, a_j): (a_1, a_1) * (a_1, a_2) = (a_1, 0) != 0
    B = PBoolPoly(2, 2)
    a = [x for x in tower_family(B)]
    P = ProductRing([B, B])
    full = [P.tuple_elem([x, y]) for x in a for y in a]
    assert not is_orthogonal_family(full)
    assert (full[0] * full[1]) == P.tuple_elem([a[0], B.zero()])


def tower_family(B):
    from ffdescent.rings import idempotent_family

    return idempotent_family(B)


def test_tower_depth_cap():
    with pytest.raises(CapExceeded):
        idempotent_tower(2, 2, depth=3)
