from __future__ import annotations

from collections import Counter

import numpy as np
import pytest

from mrdcodes.algebra import automorphisms, check_quasifield, frobenius_type_automorphism, is_field, is_nearfield, is_semifield
from mrdcodes.classify import are_equivalent
from mrdcodes.code import is_additively_closed, is_mrd, min_distance
from mrdcodes.constructions import (
    FIXTURE_NAMES,
    close_group,
    dickson_conditions,
    dickson_exponents,
    dickson_nearfield,
    fixture,
    fixture_code,
    is_abelian,
    semifields_order_27,
    sl2_5,
)
from mrdcodes.errors import ConditionsViolated, UnknownFixture
from mrdcodes.gf import gf

from oracles import matmul_mod_p


def plain_order(A, p):
    I = [[int(i == j) for j in range(len(A))] for i in range(len(A))]
    M, k = [list(r) for r in A], 1
    while M != I:
        M, k = matmul_mod_p(M, A, p), k + 1
    return k


def test_fixture_names_and_unknown():
    for name in FIXTURE_NAMES:
        assert fixture(name) is not None
    with pytest.raises(UnknownFixture):
        fixture("code4")
    with pytest.raises(UnknownFixture):
        fixture_code("nope")


def test_code2_is_mrd(code2):
    assert len(code2) == 16 and min_distance(code2) == 4
    assert is_additively_closed(code2)


def test_code3_raw_transcription_defect():
    raw = fixture("code3", raw=True)
    fixed = fixture("code3")
    assert len(raw) == len(fixed) == 16
    # exactly one codeword differs, in a single entry
    (only_raw,) = raw.elements[~np.isin(raw.keys, fixed.keys)]
    (only_fixed,) = fixed.elements[~np.isin(fixed.keys, raw.keys)]
    assert (only_raw != only_fixed).sum() == 1
    assert min_distance(raw) == 3 and not is_additively_closed(raw)
    assert min_distance(fixed) == 4 and is_additively_closed(fixed)


def test_sec6_bases():
    G, C = fixture("sec6_G_basis"), fixture("sec6_C_basis")
    assert len(G) == len(C) == 6
    assert all(m.field == gf(3) and m.a.shape == (3, 3) for m in G + C)
    for name in ("sec6_G_basis", "sec6_C_basis"):
        code = fixture_code(name)
        assert len(code) == 729 and is_mrd(code).d == 2


def test_sl25_generators_reduced_mod_11():
    A, B = fixture("sl25_generators")
    assert A.field == gf(11)
    assert ((A.a >= 0) & (A.a < 11)).all() and ((B.a >= 0) & (B.a < 11)).all()


def test_dickson_conditions():
    assert dickson_conditions(3, 2) == []
    assert dickson_conditions(5, 2) == []
    assert dickson_conditions(2, 2)  # 2 does not divide 1
    assert dickson_conditions(3, 4)  # q = 3 mod 4 and 4 | n
    with pytest.raises(ConditionsViolated):
        dickson_nearfield(3, 4)
    with pytest.raises(ConditionsViolated):
        dickson_nearfield(2, 3)


def test_dickson_exponents_cover_residues():
    for q, n in [(3, 2), (5, 2), (7, 3), (5, 4)]:
        js = dickson_exponents(q, n)
        assert sorted({((q**j - 1) // (q - 1)) % n for j in js}) == list(range(n))


@pytest.mark.parametrize("q,n", [(3, 2), (5, 2), (7, 2), (4, 3), (7, 3)])
def test_dickson_nearfields_are_proper(q, n):
    N = dickson_nearfield(q, n)
    assert check_quasifield(N)
    assert is_nearfield(N) and not is_semifield(N) and not is_field(N)


def test_dickson_n1_is_field():
    assert is_field(dickson_nearfield(5, 1))


def test_exceptional_nearfield(nearfield11):
    ng = nearfield11
    F = gf(11)
    assert len(ng.group) == 120
    assert set(ng.order_counts) == {1, 2, 3, 4, 5, 6, 10}
    # element orders recomputed by plain repeated multiplication
    plain = Counter(plain_order(g.tolist(), 11) for g in ng.group)
    assert dict(plain) == ng.order_counts
    assert ng.order_counts == {1: 1, 2: 1, 3: 20, 4: 30, 5: 24, 6: 20, 10: 24}
    assert not is_abelian(F, ng.group)
    assert not is_additively_closed(ng.code)
    assert is_mrd(ng.code).d == 2
    first_rows = {tuple(r) for r in ng.group[:, 0, :].tolist()}
    assert len(first_rows) == 120


def test_sl25_and_closure():
    S = sl2_5()
    assert len(S) == 120
    assert Counter(plain_order(g.tolist(), 5) for g in S) == Counter({1: 1, 2: 1, 3: 20, 4: 30, 5: 24, 6: 20, 10: 24})
    F = gf(5)
    gens = [S[7], S[50]]
    H = close_group(F, gens)
    assert len(H) in (1, 2, 3, 4, 5, 6, 8, 10, 12, 20, 24, 120)


def test_semifields_order_27():
    Fd, Q = semifields_order_27()
    assert is_field(Fd) and Fd.order == 27
    assert is_semifield(Q) and not is_field(Q)
    phi = frobenius_type_automorphism(Q)
    assert phi is not None
    assert any(np.array_equal(phi, a) for a in automorphisms(Q))
    # a matrix of order 3 acting on coordinates, as the field Frobenius does
    I = np.eye(3, dtype=np.int64)
    assert not np.array_equal(phi, I)
    assert np.array_equal(matmul_mod_p(matmul_mod_p(phi.tolist(), phi.tolist(), 3), phi.tolist(), 3), I.tolist())


def test_code2_and_code3_not_equivalent_to_field(code2, code3):
    from mrdcodes.gabidulin import singer_code

    S = singer_code(2, 4)
    assert are_equivalent(code2, S) is None
    assert are_equivalent(code3, S) is None
