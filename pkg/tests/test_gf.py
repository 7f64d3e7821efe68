from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mrdcodes.errors import DegreeMismatch, DivisionByZero, FieldMismatch, NotASubfieldOrder, NotPrime, ReducibleModulus
from mrdcodes.gf import (
    fq_add,
    fq_inv,
    fq_make,
    fq_mul,
    fq_neg,
    fq_pow,
    frobenius_power,
    gf,
    least_irreducible,
    primitive_element,
    trace,
)

from oracles import field_mul, is_irreducible_bruteforce

SMALL_ORDERS = [2, 3, 4, 5, 7, 8, 9, 11, 16, 25, 27, 32, 49, 64, 81]


def test_prime_field_gf2():
    F = fq_make(2, 1)
    assert F.q == 2 and F.modulus == (0, 1)


def test_gf16_given_modulus():
    F = fq_make(2, 4, (1, 1, 0, 0, 1))
    assert F.q == 16
    assert F == gf(16)


def test_gf27_default_modulus_is_least_irreducible():
    # enumerate monic cubics over GF(3) in index order, keep the first irreducible
    first = next(
        list(low) + [1]
        for low in (tuple((i // 3**k) % 3 for k in range(3)) for i in range(27))
        if is_irreducible_bruteforce(list(low) + [1], 3)
    )
    assert list(gf(27).modulus) == first == [1, 2, 0, 1]


@pytest.mark.parametrize("p,e", [(2, 2), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3), (5, 2), (7, 2)])
def test_least_irreducible_matches_bruteforce(p, e):
    mod = least_irreducible(p, e)
    assert is_irreducible_bruteforce(list(mod), p)
    idx = sum(c * p**i for i, c in enumerate(mod[:-1]))
    for j in range(idx):
        low = [(j // p**i) % p for i in range(e)]
        assert not is_irreducible_bruteforce(low + [1], p)


def test_construction_errors():
    with pytest.raises(NotPrime):
        fq_make(4, 1)
    with pytest.raises(ReducibleModulus):
        fq_make(2, 2, (1, 0, 1))  # x^2 + 1 = (x + 1)^2
    with pytest.raises(DegreeMismatch):
        fq_make(2, 3, (1, 1, 1))
    with pytest.raises(DegreeMismatch):
        fq_make(3, 2, (1, 0, 2))  # not monic


def test_basic_arithmetic_examples():
    F2 = gf(2)
    assert fq_add(F2(1), F2(1)) == F2(0)
    F16 = gf(16)
    x = F16([0, 1])
    assert fq_mul(x, fq_pow(x, 3)) == F16([1, 1])  # x^4 = x + 1
    F11 = gf(11)
    assert fq_inv(F11(4)) == F11(3)
    with pytest.raises(DivisionByZero):
        fq_inv(F11(0))
    with pytest.raises(FieldMismatch):
        fq_add(F11(1), F16(1))


@pytest.mark.parametrize("q", SMALL_ORDERS)
def test_tables_match_polynomial_oracle(q):
    F = gf(q)
    idx = np.arange(q)
    for a in range(q):
        expect = [field_mul(a, b, F.p, F.modulus) for b in range(q)]
        assert F.mul_table[a].tolist() == expect
    # addition is digitwise mod p
    D = F.digits
    add = ((D[:, None, :] + D[None, :, :]) % F.p) @ (F.p ** np.arange(F.e))
    assert np.array_equal(F.add_table, add)
    assert (F.mul_table[idx, F.inv_table[idx]][1:] == 1).all()


@pytest.mark.parametrize("q", SMALL_ORDERS)
def test_field_axioms_exhaustive(q):
    F = gf(q)
    A, M = F.add_table, F.mul_table
    a, b, c = np.meshgrid(np.arange(q), np.arange(q), np.arange(q), indexing="ij")
    assert np.array_equal(A, A.T) and np.array_equal(M, M.T)
    assert np.array_equal(A[A[a, b], c], A[a, A[b, c]])
    assert np.array_equal(M[M[a, b], c], M[a, M[b, c]])
    assert np.array_equal(M[a, A[b, c]], A[M[a, b], M[a, c]])
    assert (A[0] == np.arange(q)).all() and (M[1] == np.arange(q)).all()
    assert (A[np.arange(q), F.neg_table] == 0).all()
    nz = np.arange(1, q)
    assert (M[nz, F.inv_table[nz]] == 1).all()


@pytest.mark.parametrize("q", SMALL_ORDERS)
def test_frobenius_is_additive(q):
    F = gf(q)
    for x, y in itertools.product(range(q), repeat=2):
        lhs = frobenius_power(F(x) + F(y), F.p, 1)
        assert lhs == frobenius_power(F(x), F.p, 1) + frobenius_power(F(y), F.p, 1)


def test_frobenius_examples():
    F4 = gf(4)
    x = F4([0, 1])
    assert frobenius_power(x, 2, 1) == F4([1, 1])
    F16 = gf(16)
    for v in range(16):
        y = F16(v)
        assert frobenius_power(y, 2, 0) == y
        sq = y
        for _ in range(4):
            sq = sq * sq
        assert frobenius_power(y, 2, 4) == sq == y
    with pytest.raises(NotASubfieldOrder):
        frobenius_power(x, 8, 1)


def test_trace_examples():
    F4, F2 = gf(4), gf(2)
    assert trace(F4([0, 1]), F2) == F2(1)
    assert trace(F4(0), F2) == F2(0)
    F27, F3 = gf(27), gf(3)
    counts = np.bincount([trace(F27(v), F3).index for v in range(27)], minlength=3)
    assert counts.tolist() == [9, 9, 9]
    with pytest.raises(NotASubfieldOrder):
        trace(F27(1), gf(9))


@pytest.mark.parametrize("E,K", [(16, 2), (16, 4), (27, 3), (64, 8), (81, 9), (81, 3), (25, 5)])
def test_trace_is_linear_over_subfield(E, K):
    E, K = gf(E), gf(K)
    from mrdcodes.gf import lift

    tr = [trace(E(x), K) for x in range(E.q)]
    for x in range(E.q):
        for k in range(K.q):
            assert trace(E(x) * lift(K(k), E), K) == tr[x] * K(k)
    assert {t.index for t in tr} == set(range(K.q))


def test_primitive_element_examples():
    assert primitive_element(gf(2)) == gf(2)(1)
    F16 = gf(16)
    x = primitive_element(F16)
    assert x == F16([0, 1])
    assert x**5 != F16(1) and x**3 != F16(1)
    F9 = gf(9)
    g = primitive_element(F9)
    assert {(g**i).index for i in range(8)} == set(range(1, 9))
    assert primitive_element(F9) == g  # deterministic


@pytest.mark.parametrize("q", SMALL_ORDERS)
def test_primitive_element_is_least_of_full_order(q):
    F = gf(q)
    g = primitive_element(F)
    for v in range(1, g.index):
        assert F.mult_order(v) < q - 1
    assert F.mult_order(g.index) == q - 1


@given(st.sampled_from(SMALL_ORDERS), st.data())
def test_negation_and_inverse_roundtrip(q, data):
    F = gf(q)
    v = data.draw(st.integers(0, q - 1))
    x = F(v)
    assert fq_neg(fq_neg(x)) == x
    if v:
        assert fq_inv(fq_inv(x)) == x
        assert fq_pow(x, q - 1) == F(1)


def test_descriptor_roundtrip():
    from mrdcodes.gf import field_from_descriptor

    for q in SMALL_ORDERS:
        F = gf(q)
        assert field_from_descriptor(F.descriptor()) == F
