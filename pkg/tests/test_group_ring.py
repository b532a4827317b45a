from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffdescent.errors import CapExceeded
from ffdescent.group_ring import GroupRing, d_extract, disjoint_union_iso, iota_embed, tensor_iota
from ffdescent.modules import FinVec, IndexSet
from ffdescent.rings import ProductFp, RingHom, is_pboolean


def test_union_product():
    G = GroupRing(ProductFp(2, 1), IndexSet("abc"))
    a, b = G.singleton("a"), G.singleton("b")
    assert a * a == a
    assert a * b == G.subset([(1, "a"), (1, "b")])
    assert G.one() * a == a
    assert G.dim == 8


@pytest.mark.parametrize("base", [ProductFp(2, 1), ProductFp(3, 2)], ids=repr)
def test_group_ring_is_pboolean(base):
    G = GroupRing(base, IndexSet([1, 2]))
    assert is_pboolean(G).holds


def test_dense_structure_ring_axioms():
    from ffdescent.rings import verify_axioms

    G = GroupRing(ProductFp(3, 1), [IndexSet([1, 2]), IndexSet("x")])
    assert verify_axioms(G.structure_ring)


def test_iota_embed_degree_one():
    R = ProductFp(2, 2)
    S = IndexSet("ab")
    G = GroupRing(R, S)
    v = FinVec(S, R, {"a": R.idempotent(1), "b": R.one()})
    x = iota_embed(G, v)
    assert G.graded_part(x, 1) == x
    assert d_extract(G, x) == FinVec(IndexSet.product([S]), R, {("a",): R.idempotent(1), ("b",): R.one()})


@pytest.mark.parametrize("sizes", [(1,), (3,), (2, 2), (3, 3), (1, 2, 3), (3, 3, 3)])
@pytest.mark.parametrize("base", [ProductFp(2, 1), ProductFp(2, 2)], ids=repr)
def test_d_extract_is_left_inverse_of_tensor_iota(sizes, base):
    sets = [IndexSet(range(m)) for m in sizes]
    G = GroupRing(base, sets)
    P = IndexSet.product(sets)
    for t in P:
        for c in base.elements():
            assert d_extract(G, tensor_iota(G, t, c)) == FinVec(P, base, {t: c})


def test_d_extract_ignores_foreign_subsets():
    G = GroupRing(ProductFp(2, 1), [IndexSet([1, 2]), IndexSet([1, 2])])
    both_from_first = G.subset([(1, 1), (1, 2)])
    assert d_extract(G, both_from_first).is_zero()
    assert d_extract(G, G.one()).is_zero()


def _dense_union_check(base, a, b):
    """Oracle: the iso as a dense matrix between structure rings, tested as a ring map there."""
    S = IndexSet([f"s{j}" for j in range(a)])
    T = IndexSet([f"t{j}" for j in range(b)])
    iso = disjoint_union_iso(base, S, T)
    src, tgt = iso.source, iso.target
    images = [tgt.dense(iso(src.sparse(e))) for e in src.structure_ring.basis()]
    return RingHom.from_images(src.structure_ring, tgt.structure_ring, images).is_ring_isomorphism()


@pytest.mark.parametrize("total", range(0, 7))
def test_union_iso_all_splits(total):
    for base in (ProductFp(2, 1), ProductFp(2, 2)):
        for a in range(total + 1):
            S = IndexSet([f"s{j}" for j in range(a)])
            T = IndexSet([f"t{j}" for j in range(total - a)])
            iso = disjoint_union_iso(base, S, T)
            assert iso.verify()
            x = iso.source.one() + iso.source.singleton(S.labels[0]) if a else iso.source.one()
            assert iso.inverse(iso(x)) == x


@pytest.mark.parametrize("a,b", [(0, 2), (1, 1), (2, 1), (1, 3)])
def test_union_iso_dense_oracle(a, b):
    assert _dense_union_check(ProductFp(2, 2), a, b)


def test_union_iso_rejects_overlap():
    with pytest.raises(ValueError):
        disjoint_union_iso(ProductFp(2, 1), IndexSet("ab"), IndexSet("bc"))


def test_universe_cap():
    with pytest.raises(CapExceeded):
        GroupRing(ProductFp(2, 1), IndexSet(range(17)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_union_iso_multiplicative_on_random_elements(seed):
    rng = np.random.default_rng(seed)
    base = ProductFp(3, 1)
    iso = disjoint_union_iso(base, IndexSet("ab"), IndexSet("c"))
    G = iso.source

    def rand():
        return G.sparse(G.structure_ring.random_element(rng))

    x, y = rand(), rand()
    assert iso(x * y) == iso(x) * iso(y)
