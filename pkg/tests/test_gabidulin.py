from __future__ import annotations

import numpy as np
import pytest

from mrdcodes import _batch
from mrdcodes.classify import are_equivalent
from mrdcodes.code import is_additively_closed, is_linear_over, is_mrd, min_distance, rank_distribution
from mrdcodes.errors import BasisNotIndependent, DimensionMismatch
from mrdcodes.gabidulin import GabidulinSpec, gabidulin_code, generator_matrix, singer_code, singer_cycle
from mrdcodes.gf import frobenius_power, gf
from mrdcodes.matgf import mat_order

SINGER_CASES = [(2, n) for n in range(1, 9)] + [(3, n) for n in range(1, 6)] + [(4, 2), (4, 3), (4, 4), (5, 2), (5, 3), (7, 2), (11, 2), (13, 2)]


def test_spec_validation():
    with pytest.raises(DimensionMismatch):
        GabidulinSpec(2, 3, 4, 1)
    with pytest.raises(DimensionMismatch):
        GabidulinSpec(2, 3, 3, 0)
    with pytest.raises(BasisNotIndependent):
        GabidulinSpec(2, 3, 2, 1, points=(1, 1))
    with pytest.raises(BasisNotIndependent):
        GabidulinSpec(2, 3, 3, 1, basis=(1, 2, 3))  # 3 = 1 + x


def test_generator_matrix_rows_are_frobenius_powers():
    spec = GabidulinSpec(3, 3, 3, 2)
    G = generator_matrix(spec)
    E = spec.E
    assert G.shape == (2, 3)
    assert G[0].tolist() == list(spec.points)
    assert G[1].tolist() == [frobenius_power(E(a), 3, 1).index for a in spec.points]
    spec = GabidulinSpec(2, 4, 3, 3)
    G = generator_matrix(spec)
    for j in range(3):
        assert G[j].tolist() == [spec.E.pow(int(a), 2**j) for a in G[0]]
    assert generator_matrix(GabidulinSpec(2, 4, 4, 1)).shape == (1, 4)


def test_gabidulin_examples():
    C = gabidulin_code(GabidulinSpec(2, 4, 4, 1))
    assert len(C) == 16 and min_distance(C) == 4
    assert are_equivalent(C, singer_code(2, 4)) is not None
    full = gabidulin_code(GabidulinSpec(2, 3, 3, 3))
    assert len(full) == 2**9 and min_distance(full) == 1
    C = gabidulin_code(GabidulinSpec(3, 3, 3, 2))
    assert len(C) == 729 and min_distance(C) == 2
    assert rank_distribution(C) == {0: 1, 2: 338, 3: 390}


@pytest.mark.parametrize(
    "q,m,n,k",
    [(q, m, n, k) for q in (2, 3, 4) for m in range(1, 5) for n in range(1, m + 1) for k in range(1, n + 1) if q ** (m * n) <= 2**24 and q ** (k * m) <= 2**20]
    + [(5, 2, 2, 1), (7, 2, 2, 1), (11, 2, 2, 1), (3, 4, 4, 3), (2, 5, 5, 2)],
)
def test_gabidulin_is_mrd(q, m, n, k):
    C = gabidulin_code(GabidulinSpec(q, m, n, k))
    v = is_mrd(C)
    assert v and v.k == k and v.d == n - k + 1
    assert is_linear_over(C, gf(q))


def test_gabidulin_basis_independence_up_to_equivalence():
    E = gf(8)
    other_basis = (3, 6, 7)  # 1 + x, x + x^2, 1 + x + x^2
    A = gabidulin_code(GabidulinSpec(2, 3, 3, 2))
    B = gabidulin_code(GabidulinSpec(2, 3, 3, 2, basis=other_basis))
    assert A != B or E.q == 8
    assert are_equivalent(A, B) is not None
    A = gabidulin_code(GabidulinSpec(3, 2, 2, 1))
    B = gabidulin_code(GabidulinSpec(3, 2, 2, 1, basis=(2, 5), points=(5, 2)))
    assert are_equivalent(A, B) is not None


def test_singer_examples():
    assert len(singer_code(2, 1)) == 2
    C = singer_code(2, 4)
    assert len(C) == 16
    assert mat_order(singer_cycle(2, 4)) == 15
    C = singer_code(11, 2)
    assert len(C) == 121
    nz = C.elements[1:]
    assert (_batch.matmul(C.field, nz[:, None], nz[None]) == _batch.matmul(C.field, nz[None], nz[:, None])).all()


@pytest.mark.parametrize("q,n", SINGER_CASES)
def test_singer_code_is_a_field(q, n):
    C = singer_code(q, n)
    F = C.field
    E = C.elements
    assert len(C) == q**n
    assert is_additively_closed(C) and is_linear_over(C, F)
    S = singer_cycle(q, n)
    assert mat_order(S) == q**n - 1
    if q**n <= 256:
        prods = _batch.matmul(F, E[:, None], E[None])
        assert C.contains_keys(_batch.pack(F, prods.reshape(-1, n, n))).all()
        assert np.array_equal(prods, np.swapaxes(prods, 0, 1))
        ranks = _batch.ranks(F, E)
        assert (ranks[1:] == n).all()
    v = is_mrd(C)
    assert v and v.d == n
