from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffdescent.errors import CapExceeded, MixedRings
from ffdescent.modules import (
    FinVec,
    IndexSet,
    LinMap,
    check_cap,
    coker_presentation,
    degeneracy,
    is_injective,
    kernel,
    proj,
    psi_map,
    psi_n_map,
)
from ffdescent.polynomials import PolyRing
from ffdescent.retraction import has_left_inverse, left_inverse, tensor_two_term
from ffdescent.rings import ProductFp


def random_map(R, n_src, n_tgt, rng, density=0.6):
    src = IndexSet(range(n_src))
    tgt = IndexSet([f"b{j}" for j in range(n_tgt)])
    cols = {}
    for a in src:
        cols[a] = FinVec(tgt, R, {b: R.random_element(rng) for b in tgt if rng.random() < density})
    return LinMap(src, tgt, R, cols)


def test_projection_and_degeneracy_are_inverse():
    s = ("a", "b", "c")
    for i in range(1, 4):
        assert degeneracy(i, proj(s, i), s[i - 1]) == s
    with pytest.raises(ValueError):
        proj(s, 4)


def test_product_and_union_labels():
    S, T = IndexSet("ab"), IndexSet([1, 2, 3])
    P = IndexSet.product([S, T])
    assert len(P) == 6 and P.labels[0] == ("a", 1)
    U = IndexSet.disjoint_union([S, S])
    assert (1, "a") in U and (2, "a") in U and len(U) == 4
    assert IndexSet.product([]).labels == ((),)


def test_finvec_stores_no_zeros():
    R = ProductFp(3, 2)
    I = IndexSet("xyz")
    v = FinVec(I, R, {"x": R.one(), "y": R.zero()})
    assert v.support() == ["x"]
    assert (v - v).is_zero()
    assert v["z"].is_zero()
    with pytest.raises(MixedRings):
        v + FinVec(I, ProductFp(3, 1))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_kernel_against_enumeration(seed):
    rng = np.random.default_rng(seed)
    R = ProductFp(2, 2)
    f = random_map(R, 2, 2, rng)
    ker = kernel(f)
    # oracle: enumerate every vector of (+)_2 R (|R|^2 = 16 of them)
    elems = list(R.elements())
    zeros = 0
    for xs in itertools.product(elems, repeat=len(f.source)):
        v = FinVec(f.source, R, dict(zip(f.source, xs)))
        zeros += f(v).is_zero()
    # the kernel is an F_p-space; its size is p^(F_p-dimension)
    assert zeros == R.p ** len(ker)
    for v in ker:
        assert f(v).is_zero()
    assert is_injective(f) == (zeros == 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_left_inverse_existence_against_enumeration(seed):
    rng = np.random.default_rng(seed)
    R = ProductFp(2, 1)
    f = random_map(R, 2, 3, rng)
    elems = list(R.elements())
    found = False
    for entries in itertools.product(elems, repeat=2 * 3):
        cols = {b: FinVec(f.source, R, {a: entries[2 * jb + ja] for ja, a in enumerate(f.source)})
                for jb, b in enumerate(f.target)}
        r = LinMap(f.target, f.source, R, cols)
        if r.compose(f) == LinMap.identity(R, f.source):
            found = True
            break
    assert has_left_inverse(f) == found
    if found:
        r = left_inverse(f, rng=rng)
        assert r.compose(f) == LinMap.identity(R, f.source)


def test_psi_map_shape_and_columns():
    R = ProductFp(2, 3)
    S = IndexSet([1, 2, 3])
    f = psi_map(R, S, {s: R.one() - R.idempotent(s) for s in S})
    assert f.target.labels == ("*", 1, 2, 3)
    assert f.entry("*", 2) == R.one()
    assert f.entry(2, 2) == R.one() - R.idempotent(2)
    assert f.entry(1, 2).is_zero()


@pytest.mark.parametrize("m", [1, 2, 3])
def test_psi_n_map_with_one_factor_is_psi_map(m):
    R = ProductFp(3, m)
    S = IndexSet(range(1, m + 1))
    psi = {s: R.one() - R.idempotent(s) for s in S}
    single = psi_n_map(R, [S], [psi], 1)
    plain = psi_map(R, S, psi)
    rename = {("f", 1, ()): "*", **{("g", 1, (s,)): s for s in S}}
    relabelled = single.relabel(lambda t: t[0], lambda b: rename[b])
    assert relabelled == plain


def test_psi_n_map_columns():
    R = ProductFp(2, 2)
    S1, S2 = IndexSet([1, 2]), IndexSet("ab")
    psis = [{1: R.idempotent(1), 2: R.idempotent(2)}, {"a": R.one(), "b": R.zero() + R.idempotent(1)}]
    f = psi_n_map(R, [S1, S2], psis, 2)
    col = f.columns[(2, "b")]
    assert col[("f", 2, (2,))] == R.one()
    assert col[("g", 2, (2, "b"))] == R.idempotent(1)


def test_tensor_two_term_preserves_split_injections():
    # u (x) v -> (d1 u (x) v, u (x) d2 v) has a left inverse when d1 and d2 do
    R = ProductFp(3, 2)
    S = IndexSet([1, 2])
    d1 = psi_map(R, S, {s: R.one() - R.idempotent(s) for s in S})
    d2 = psi_map(R, IndexSet(["x"]), {"x": R.idempotent(1)})
    assert has_left_inverse(d1) and has_left_inverse(d2)
    T = tensor_two_term(d1, d2)
    assert has_left_inverse(T)
    assert len(T.source) == 2 * 1


def test_tensor_two_term_without_split():
    R = ProductFp(2, 1)
    zero = psi_map(R, IndexSet(["y"]), {"y": R.one()})
    assert has_left_inverse(zero)
    ker = LinMap(IndexSet(["u"]), IndexSet(["c"]), R, {})
    assert not has_left_inverse(ker)
    assert not has_left_inverse(tensor_two_term(ker, ker))


def test_coker_presentation_rank():
    R = ProductFp(2, 2)
    f = psi_map(R, IndexSet([1, 2]), {1: R.idempotent(2), 2: R.idempotent(1)})
    pres = coker_presentation(f)
    # rank_Fp coker = dim target - dim source when f is injective
    assert pres.fp_rank == (3 - 2) * R.dim


def test_polynomial_kernel_is_truncated():
    P = PolyRing(2, ["x"])
    x = P.var("x")
    f = psi_map(P, IndexSet(["a"]), {"a": x})
    assert is_injective(f, degree=3)
    assert has_left_inverse(f, degree=1)


def test_cap():
    with pytest.raises(CapExceeded):
        check_cap(10, 5, "thing")
