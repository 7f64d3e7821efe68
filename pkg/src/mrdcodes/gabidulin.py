"""Delsarte-Gabidulin codes and Singer-cycle codes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _batch
from .code import RankCode, _coords_table, default_extension_basis, expand_symbols
from .errors import BasisNotIndependent, DimensionMismatch
from .gf import FieldSpec, gf, primitive_element
from .matgf import MatGF


@dataclass(frozen=True)
class GabidulinSpec:
    """Parameters of a Gabidulin code; points and basis are indices into GF(q^m)."""

    q: int
    m: int
    n: int
    k: int
    points: tuple[int, ...] | None = None
    basis: tuple[int, ...] | None = None

    def __post_init__(self):
        if not (1 <= self.k <= self.n <= self.m):
            raise DimensionMismatch(f"need 1 <= k <= n <= m, got k={self.k} n={self.n} m={self.m}")
        E, default = default_extension_basis(self.K, self.m)
        if self.basis is None:
            object.__setattr__(self, "basis", tuple(default))
        if self.points is None:
            object.__setattr__(self, "points", tuple(default[: self.n]))
        if len(self.points) != self.n:
            raise DimensionMismatch(f"need {self.n} points, got {len(self.points)}")
        if len(self.basis) != self.m:
            raise DimensionMismatch(f"need {self.m} basis elements, got {len(self.basis)}")
        _coords_table(E, self.K, self.basis)
        coords = _coords_table(E, self.K, self.basis)[list(self.points)]
        if _batch.rank(self.K, coords) != self.n:
            raise BasisNotIndependent("points are not linearly independent over GF(q)")

    @property
    def K(self) -> FieldSpec:
        return gf(self.q)

    @property
    def E(self) -> FieldSpec:
        return default_extension_basis(self.K, self.m)[0]


def generator_matrix(spec: GabidulinSpec) -> np.ndarray:
    """k x n array over GF(q^m); row i is (a_1^(q^i), ..., a_n^(q^i))."""
    E = spec.E
    return np.array(
        [[E.pow(a, spec.q**i) for a in spec.points] for i in range(spec.k)], dtype=np.int64
    )


def gabidulin_code(spec: GabidulinSpec) -> RankCode:
    """Expand the GF(q^m)-row space of the generator matrix to m x n matrices over GF(q).

    Codeword symbol j becomes column j, written in the expansion basis.
    """
    E, K = spec.E, spec.K
    G = generator_matrix(spec)
    # a GF(q)-basis of the code: beta_t * row_i for every expansion basis element
    words = np.array([[E.mul(b, int(x)) for x in row] for row in G for b in spec.basis], dtype=np.int64)
    mats = expand_symbols(K, E, spec.basis, words)
    return RankCode(K, spec.m, spec.n, basis=mats)


def multiplication_matrices(E: FieldSpec, K: FieldSpec, basis: Sequence[int]) -> np.ndarray:
    """R(a) for every a in E (indexed by a): row i holds the coordinates of basis[i] * a."""
    table = _coords_table(E, K, basis)
    b = np.array(basis, dtype=np.int64)
    prods = E.mul_table[b[None, :], np.arange(E.q)[:, None]]  # (q^n, n)
    return table[prods]


def singer_cycle(q: int, n: int) -> MatGF:
    """Right multiplication by the primitive element of GF(q^n) in the polynomial basis."""
    K = gf(q)
    E, basis = default_extension_basis(K, n)
    w = primitive_element(E).index
    return MatGF._wrap(K, multiplication_matrices(E, K, basis)[w])


def singer_code(q: int, n: int) -> RankCode:
    """The cyclic group generated by a Singer cycle, together with 0."""
    K = gf(q)
    E, basis = default_extension_basis(K, n)
    return RankCode(K, n, n, elements=multiplication_matrices(E, K, basis))
