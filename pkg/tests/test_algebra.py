from __future__ import annotations

import numpy as np
import pytest

from mrdcodes.algebra import (
    Quasifield,
    SpreadSet,
    automorphisms,
    center,
    check_quasifield,
    is_commutative,
    is_division_algebra_over,
    is_field,
    is_nearfield,
    is_semifield,
    kernel,
    kernel_subfield,
    left_distributivity_witness,
    nucleus_left,
    nucleus_middle,
    nucleus_right,
    quasifield_from_code,
    quasifield_from_spreadset,
    right_representation,
    spreadset_from_code,
    subfields,
    transpose_quasifield,
    verify_t2_t3,
)
from mrdcodes.classify import are_isomorphic
from mrdcodes.code import RankCode, is_additively_closed, is_mrd
from mrdcodes.constructions import dickson_nearfield
from mrdcodes.errors import KNotInKernel, NotASemifield, NotMRD, NotNormalized, ValidationError
from mrdcodes.gabidulin import singer_code
from mrdcodes.gf import gf
from mrdcodes.matgf import MatGF


def field_q(q):
    return Quasifield.from_field(gf(q))


def assert_kernel_structure(Q):
    """Kernel is a field and Q is a vector space of integral dimension over it."""
    ker = kernel(Q)
    assert ker.field is not None
    d = round(np.log(Q.order) / np.log(ker.order))
    assert ker.order**d == Q.order


def test_field_tables_pass():
    for q in (2, 4, 9, 16, 27, 25):
        Q = field_q(q)
        assert check_quasifield(Q)
        assert is_field(Q) and is_semifield(Q) and is_nearfield(Q)


def test_check_detects_broken_right_division():
    T = np.array(gf(4).mul_table)
    T[2, 3] = T[2, 2]  # row 2 is no longer a permutation
    v = check_quasifield(Quasifield(2, 2, T, identity=1))
    assert not v and v.axiom == "iii" and v.witness[0] == 2


def test_check_detects_other_axioms():
    T = np.array(gf(4).mul_table)
    T[0, 1] = 1
    assert check_quasifield(Quasifield(2, 2, T, identity=1)).axiom == "i"
    T = np.array(gf(4).mul_table)
    assert check_quasifield(Quasifield(2, 2, T, identity=2)).axiom == "ii"


def test_dickson_nearfield_passes():
    N = dickson_nearfield(3, 2)
    assert check_quasifield(N)
    assert is_nearfield(N) and not is_semifield(N) and not is_field(N)
    assert left_distributivity_witness(N) is not None


def test_substructures_of_field():
    Q = field_q(16)
    everything = tuple(range(16))
    for sub in (kernel(Q), nucleus_left(Q), nucleus_middle(Q), nucleus_right(Q), center(Q)):
        assert sub.indices == everything and sub.field.q == 16


def test_substructures_of_proper_semifield(census16):
    for cls in census16.proper:
        Q = cls.quasifield
        assert is_semifield(Q) and not is_nearfield(Q)
        assert center(Q).order == 2
        assert nucleus_left(Q).indices == kernel(Q).indices
        assert_kernel_structure(Q)


def test_nearfield_center_and_kernel():
    N = dickson_nearfield(3, 2)
    assert kernel(N).order >= 3
    assert center(N).order == 3


def andre_quasifield(norms):
    """x o y = x^5 y if N(y) = y^6 lies in ``norms``, else x y, on GF(25)."""
    E = gf(25)
    T = np.zeros((25, 25), dtype=np.int64)
    for x in range(25):
        for y in range(25):
            j = 5 if y and E.pow(y, 6) in norms else 1
            T[x, y] = E.mul(E.pow(x, j), y)
    return Quasifield(5, 2, T, identity=1)


def test_quasifield_that_is_neither():
    Q = andre_quasifield({2})
    assert check_quasifield(Q)
    assert not is_semifield(Q) and not is_nearfield(Q)
    assert_kernel_structure(Q)
    with pytest.raises(NotASemifield):
        center(Q)
    # the norm set {2, 3} is a coset union compatible with the twist: a nearfield
    assert is_nearfield(andre_quasifield({2, 3}))


def test_spreadset_from_code_examples(code2):
    S = spreadset_from_code(singer_code(2, 4))
    assert S.is_spread()
    S2 = spreadset_from_code(code2)
    Q2 = quasifield_from_spreadset(S2)
    assert is_semifield(Q2) and not is_field(Q2)
    # translate by I, then swap two rows: distances survive but I is gone
    shifted = code2.translate(MatGF.identity(code2.field, 4)).left_multiply(MatGF(code2.field, [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]))
    assert MatGF.identity(code2.field, 4) not in shifted
    with pytest.raises(NotNormalized):
        spreadset_from_code(shifted)
    with pytest.raises(NotMRD):
        spreadset_from_code(RankCode(gf(2), 2, 2, elements=[np.zeros((2, 2)), np.eye(2)]))


def test_spreadset_validation():
    K = gf(2)
    mats = np.zeros((4, 2, 2), dtype=np.int64)
    with pytest.raises(ValidationError):
        SpreadSet(K, 2, mats)


def test_singer_quasifield_is_gf16():
    Q = quasifield_from_code(singer_code(2, 4))
    assert is_field(Q)
    assert are_isomorphic(Q, field_q(16)) is not None


def test_code3_quasifield_is_semifield(code3):
    Q = quasifield_from_code(code3)
    assert check_quasifield(Q) and is_semifield(Q)
    assert is_additively_closed(code3)


def test_nearfield_quasifield(nearfield11):
    Q = nearfield11.quasifield
    assert is_nearfield(Q) and not is_semifield(Q)


@pytest.mark.parametrize("name", ["code2", "code3", "singer", "sl25"])
def test_code_roundtrip_through_quasifield(name, code2, code3, nearfield11):
    C = {"code2": code2, "code3": code3, "singer": singer_code(3, 3), "sl25": nearfield11.code}[name]
    Q = quasifield_from_code(C)
    rep = right_representation(Q, C.field)
    assert rep.basis[0] == Q.identity
    assert rep.code() == C


def test_right_representation_of_fields():
    Q = field_q(16)
    C = right_representation(Q, gf(2)).code()
    assert is_mrd(C) and is_additively_closed(C)
    Q2 = quasifield_from_spreadset(right_representation(Q, gf(2)).spreadset)
    assert are_isomorphic(Q, Q2) is not None
    C4 = right_representation(Q, gf(4)).code()
    assert C4.field.q == 4 and C4.n == 2 and is_mrd(C4)


def test_right_representation_rejects_non_kernel_subfield(census16):
    Q = next(c.quasifield for c in census16.proper if kernel(c.quasifield).order == 2)
    with pytest.raises(KNotInKernel):
        right_representation(Q, gf(4))


def test_proper_semifield_representation_is_additive_mrd(census16):
    Q = census16.proper[0].quasifield
    C = right_representation(Q, gf(2)).code()
    v = is_mrd(C)
    assert v and v.d == 4 and is_additively_closed(C)


def test_verify_t2_t3_examples(code3, nearfield11):
    rep = verify_t2_t3(nearfield11.code)
    assert not rep.additively_closed and not rep.left_distributive and rep.holds
    rep = verify_t2_t3(code3)
    assert rep.additively_closed and rep.left_distributive and rep.holds
    assert rep.k_linear and rep.k_central


def test_division_algebra_over_center_and_subfields():
    for q in (16, 27):
        Q = field_q(q)
        for sub in subfields(Q):
            assert is_division_algebra_over(Q, sub)


@pytest.mark.parametrize("census", ["census16", "census27"])
def test_division_algebra_iff_central(census, request):
    cen = request.getfixturevalue(census)
    for cls in cen.classes:
        Q = cls.quasifield
        Z = set(center(Q).indices)
        for sub in subfields(Q):
            if not set(sub.indices) <= set(kernel(Q).indices):
                continue
            assert is_division_algebra_over(Q, sub) == (set(sub.indices) <= Z)


def test_kernel_subfield_identification():
    Q = field_q(16)
    K4 = kernel_subfield(Q, gf(4))
    assert K4.order == 4 and K4.field == gf(4)
    assert kernel_subfield(Q).order == 2


def test_automorphisms_of_gf8_are_frobenius_powers():
    Q = field_q(8)
    auts = automorphisms(Q)
    assert len(auts) == 3


def test_commutativity_flags():
    assert is_commutative(field_q(9))
    assert not is_commutative(dickson_nearfield(3, 2))


def test_transpose_quasifield_of_field_is_field():
    Q = transpose_quasifield(field_q(16))
    assert is_field(Q)


def test_transpose_quasifield_of_proper_semifield(census16):
    for cls in census16.proper[:4]:
        Qt = transpose_quasifield(cls.quasifield)
        assert check_quasifield(Qt) and is_semifield(Qt) and not is_field(Qt)


@pytest.mark.parametrize("census", ["census16", "census27"])
def test_kernel_structure_on_census(census, request):
    for cls in request.getfixturevalue(census).classes:
        assert_kernel_structure(cls.quasifield)
