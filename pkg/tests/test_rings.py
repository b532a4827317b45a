from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffdescent.errors import MixedRings
from ffdescent.rings import (
    PBoolPoly,
    ProductFp,
    ProductRing,
    RingHom,
    TensorRing,
    idempotent_family,
    ideal_quotient_dim,
    is_orthogonal_family,
    is_pboolean,
    make_ring,
    tensor_ring,
    verify_axioms,
)

RINGS = [
    ProductFp(2, 1),
    ProductFp(3, 2),
    ProductFp(5, 3),
    PBoolPoly(2, 3),
    PBoolPoly(3, 2),
    TensorRing([ProductFp(2, 2), ProductFp(2, 3)]),
    ProductRing([PBoolPoly(2, 1), ProductFp(2, 2)]),
]


@pytest.mark.parametrize("R", RINGS, ids=repr)
def test_axioms_and_pboolean(R):
    assert verify_axioms(R, np.random.default_rng(0), samples=20)
    assert is_pboolean(R).holds


@pytest.mark.parametrize("R", RINGS, ids=repr)
def test_descriptor_round_trip(R):
    assert make_ring(R.descriptor) == R
    assert make_ring(R.descriptor).descriptor == R.descriptor


def test_frobenius_by_enumeration():
    # independent oracle: raise every element of PBoolPoly(3, 2) to the p-th power by repeated products
    R = PBoolPoly(3, 2)
    for x in R.elements():
        assert x * x * x == x


def test_non_pboolean_detected():
    # F_2[X]/(X^2): X^2 = 0 != X, a dual-number ring built from explicit tables
    from ffdescent.rings import Ring

    R = Ring(2, ["1", "X"], np.array([[0, 1], [1, -1]]), np.ones((2, 2)), np.array([1, 0]))
    rep = is_pboolean(R)
    assert not rep.holds and rep.witness is not None
    assert rep.witness**2 != rep.witness


@pytest.mark.parametrize("p,m", [(2, 1), (2, 4), (3, 3)])
def test_coordinate_idempotents(p, m):
    R = ProductFp(p, m)
    fam = idempotent_family(R)
    assert is_orthogonal_family(fam)
    total = R.zero()
    for e in fam:
        total = total + e
    assert total == R.one()
    assert sorted(map(repr, R.primitive_idempotents())) == sorted(map(repr, fam))


def test_tensor_inclusions_are_ring_maps():
    A, B = ProductFp(3, 2), PBoolPoly(3, 1)
    T, i1, i2 = tensor_ring(A, B)
    assert T.dim == A.dim * B.dim
    for i in (i1, i2):
        assert i.is_multiplicative()
        assert i.is_injective()
    # pure tensors multiply componentwise
    a, b = A.idempotent(1), B.variable(1)
    assert i1(a) * i2(b) == T.pure([a, b])


def test_tensor_points_are_product_of_points():
    T = TensorRing([ProductFp(2, 2), ProductFp(2, 3)])
    assert len(T.primitive_idempotents()) == 6


def test_mixed_rings_rejected():
    with pytest.raises(MixedRings):
        ProductFp(2, 2).one() + ProductFp(2, 3).one()


def test_ring_hom_checks():
    src, tgt = ProductFp(2, 1), ProductFp(2, 2)
    diag = RingHom.from_images(src, tgt, [tgt.one()])
    assert diag.is_multiplicative() and diag.is_injective() and not diag.is_bijective()
    bad = RingHom.from_images(src, tgt, [tgt.idempotent(1) + tgt.idempotent(1)])
    assert not bad.is_multiplicative()


def test_ideal_quotient_dim():
    R = ProductFp(3, 3)
    assert ideal_quotient_dim(R, [R.idempotent(1)]) == 2
    assert ideal_quotient_dim(R, [R.one()]) == 0
    assert ideal_quotient_dim(R, []) == 3


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(RINGS), st.integers(0, 2**32 - 1))
def test_random_element_laws(R, seed):
    rng = np.random.default_rng(seed)
    a, b, c = (R.random_element(rng) for _ in range(3))
    assert a * (b * c) == (a * b) * c
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == R.zero()
    assert a ** R.p == a


def test_pboolean_poly_tower_family():
    for p, k in itertools.product([2, 3], [1, 2, 3]):
        fam = idempotent_family(PBoolPoly(p, k))
        assert len(fam) == k
        assert is_orthogonal_family(fam)


def test_table_ring_descriptor_round_trip():
    from ffdescent.rings import Ring

    R = Ring(2, ["1", "X"], np.array([[0, 1], [1, -1]]), np.ones((2, 2)), np.array([1, 0]))
    again = make_ring(R.descriptor)
    assert again == R and np.array_equal(again.idx, R.idx)
