from __future__ import annotations

import numpy as np
import pytest

from mrdcodes import _batch
from mrdcodes.algebra import Quasifield, kernel, quasifield_from_code
from mrdcodes.classify import are_equivalent
from mrdcodes.code import is_linear_over, is_mrd
from mrdcodes.errors import DimensionMismatch, NotASubfield, NotInvariant, ZeroScalar
from mrdcodes.gabidulin import singer_code
from mrdcodes.gf import FqElem, gf, trace
from mrdcodes.symmetric import (
    BilinearForm,
    congruence_representatives,
    dual_basis_matrix,
    find_invariant_form,
    has_symmetric_equivalent,
    invariance_witness,
    invariant_form_search,
    is_invariant_form,
    is_invariant_matrix_criterion,
    knarr_subgroup,
    quasifield_forms,
    scaled_family_code,
    scaled_form_family,
    symmetric_code,
    symmetric_spreadset_codes,
    trace_form,
)

F2 = gf(2)


def all_symmetric(F, n):
    iu = np.triu_indices(n)
    out = []
    for idx in range(F.q ** len(iu[0])):
        G = np.zeros((n, n), dtype=np.int64)
        G[iu] = [(idx // F.q**i) % F.q for i in range(len(iu[0]))]
        G.T[iu] = G[iu]
        out.append(G)
    return out


def test_trace_form_examples():
    form = trace_form(gf(4), F2)
    assert form.is_symmetric() and form.is_nondegenerate()
    E, K = gf(16), F2
    basis = [1, 2, 4, 8]
    T = trace_form(E, K, basis).gram
    for i, x in enumerate(basis):
        for j, y in enumerate(basis):
            assert T[i, j] == trace(FqElem(E, E.mul(x, y)), K).index


def test_scaled_form_errors():
    with pytest.raises(ZeroScalar):
        scaled_form_family(gf(16), F2, 0)
    with pytest.raises(NotASubfield):
        trace_form(gf(8), gf(4))
    with pytest.raises(DimensionMismatch):
        BilinearForm(F2, np.zeros((2, 3)))


def test_dual_basis_matrix():
    for E, K in [(gf(16), F2), (gf(27), gf(3)), (gf(16), gf(4))]:
        T = trace_form(E, K).gram
        B = dual_basis_matrix(E, K)
        assert np.array_equal(_batch.matmul(K, B, T), np.eye(len(T), dtype=np.int64))


@pytest.mark.parametrize("q,n", [(2, 3), (2, 4), (3, 2), (3, 3), (5, 2)])
def test_scaled_family_is_symmetric_mrd(q, n):
    E, K = gf(q**n), gf(q)
    C = scaled_family_code(E, K)
    assert len(C) == q**n
    assert all(np.array_equal(A, A.T) for A in C.elements)
    v = is_mrd(C)
    assert v and v.d == n and is_linear_over(C, K)
    assert are_equivalent(C, singer_code(q, n)) is not None


def test_form_evaluation_matches_gram():
    form = trace_form(gf(16), F2)
    x, y = np.array([1, 0, 1, 1]), np.array([0, 1, 1, 0])
    assert int(form(x, y)) == int(x @ form.gram @ y) % 2
    assert int(form(x, y)) == int(form(y, x))


def test_field_has_invariant_form():
    Q = Quasifield.from_field(gf(16))
    form = find_invariant_form(Q, F2)
    assert form is not None and form.is_symmetric() and form.is_nondegenerate()
    assert is_invariant_form(Q, form, F2) and is_invariant_matrix_criterion(Q, form, F2)
    C = symmetric_code(Q, form, F2)
    assert all(np.array_equal(A, A.T) for A in C.elements)
    assert is_mrd(C).d == 4
    assert len(quasifield_forms(Q, form, F2)) == 16


def test_invariance_checks_agree_on_all_forms(census16):
    # the triple-wise definition and R(a) G = G R(a)^t agree for every symmetric Gram matrix
    for Q in (Quasifield.from_field(gf(16)), census16.proper[0].quasifield):
        for G in all_symmetric(F2, 4):
            form = BilinearForm(F2, G)
            assert is_invariant_form(Q, form, F2) == is_invariant_matrix_criterion(Q, form, F2)


def test_non_invariant_form_is_rejected():
    Q = Quasifield.from_field(gf(16))
    form = BilinearForm(F2, np.eye(4, dtype=np.int64))
    w = invariance_witness(Q, form, F2)
    assert w is not None
    with pytest.raises(NotInvariant):
        quasifield_forms(Q, form, F2)
    with pytest.raises(NotInvariant):
        quasifield_forms(Q, BilinearForm(F2, np.zeros((4, 4), dtype=np.int64)), F2)
    with pytest.raises(DimensionMismatch):
        invariance_witness(Q, BilinearForm(F2, np.eye(3, dtype=np.int64)), F2)


def test_knarr_on_fields_and_nearfield(nearfield11):
    r = knarr_subgroup(Quasifield.from_field(gf(27)))
    assert r.proper and r.size == 1
    Q = nearfield11.quasifield
    r = knarr_subgroup(Q)
    has_form = find_invariant_form(Q, kernel(Q)) is not None
    assert r.proper == has_form


def test_form_search_reports_dimension():
    Q = Quasifield.from_field(gf(9))
    res = invariant_form_search(Q, gf(3))
    assert res.exhaustive and res.form is not None and res.solution_dim == 2


def test_has_symmetric_equivalent(code2):
    S = has_symmetric_equivalent(singer_code(2, 4))
    assert S is not None and all(np.array_equal(A, A.T) for A in S.elements)
    assert are_equivalent(S, singer_code(2, 4)) is not None
    assert has_symmetric_equivalent(code2) is None


def test_congruence_representatives_gf2():
    reps = congruence_representatives(F2, 3)
    # alternating and non-alternating classes of invertible symmetric 3x3 matrices; n odd has no alternating one
    assert len(reps) == 1
    assert len(congruence_representatives(F2, 4)) == 2


def test_symmetric_codes_only_in_field_class(code2, code3):
    codes = symmetric_spreadset_codes(F2, 4)
    assert len(codes) == 12
    S = singer_code(2, 4)
    for C in codes:
        assert all(np.array_equal(A, A.T) for A in C.elements)
        assert is_mrd(C).d == 4 and is_linear_over(C, F2)
        assert are_equivalent(C, S) is not None
        assert are_equivalent(C, code2) is None and are_equivalent(C, code3) is None


def test_quasifield_of_symmetric_code_has_form():
    C = scaled_family_code(gf(27), gf(3))
    from mrdcodes.code import normalize

    Q = quasifield_from_code(normalize(C))
    assert find_invariant_form(Q, gf(3)) is not None
