"""Dense matrices over finite fields.

Orientation rule used throughout the package: vectors are rows and matrices
act on the right, x -> xA.
"""

from __future__ import annotations

from typing import Iterator, Sequence

import numpy as np

from . import _batch
from .errors import DimensionMismatch, FieldMismatch, Singular, TooLarge
from .gf import ENUMERATION_CEILING, FieldSpec, FqElem, fq_make


class MatGF:
    """An m x n matrix of element indices over ``field`` (immutable)."""

    __slots__ = ("field", "a")

    def __init__(self, field: FieldSpec, entries):
        a = np.array(entries, dtype=np.int64)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise DimensionMismatch(f"expected a non-empty 2-d grid, got shape {a.shape}")
        if a.min() < 0 or a.max() >= field.q:
            raise ValueError(f"entries outside 0..{field.q - 1}")
        a.setflags(write=False)
        self.field = field
        self.a = a

    @classmethod
    def _wrap(cls, field: FieldSpec, a: np.ndarray) -> MatGF:
        obj = cls.__new__(cls)
        a = np.ascontiguousarray(a, dtype=np.int64)
        a.setflags(write=False)
        obj.field = field
        obj.a = a
        return obj

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> MatGF:
        return cls._wrap(field, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, field: FieldSpec, m: int, n: int) -> MatGF:
        return cls._wrap(field, np.zeros((m, n), dtype=np.int64))

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def n(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    def __getitem__(self, ij) -> FqElem:
        i, j = ij
        return FqElem(self.field, int(self.a[i, j]))

    def tolist(self) -> list[list[int]]:
        return self.a.tolist()

    def key(self) -> int:
        return int(_batch.pack(self.field, self.a))

    def _same(self, other: MatGF, shape=True):
        if not isinstance(other, MatGF):
            raise TypeError(f"expected MatGF, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        if shape and other.shape != self.shape:
            raise DimensionMismatch(f"{self.shape} vs {other.shape}")

    def __add__(self, other: MatGF) -> MatGF:
        self._same(other)
        return MatGF._wrap(self.field, _batch.add(self.field, self.a, other.a))

    def __sub__(self, other: MatGF) -> MatGF:
        self._same(other)
        return MatGF._wrap(self.field, _batch.sub(self.field, self.a, other.a))

    def __neg__(self) -> MatGF:
        return MatGF._wrap(self.field, _batch.neg(self.field, self.a))

    def __matmul__(self, other: MatGF) -> MatGF:
        self._same(other, shape=False)
        if self.n != other.m:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        return MatGF._wrap(self.field, _batch.matmul(self.field, self.a, other.a))

    def __mul__(self, c) -> MatGF:
        if isinstance(c, FqElem):
            if c.field != self.field:
                raise FieldMismatch(f"{self.field} vs {c.field}")
            c = c.index
        return MatGF._wrap(self.field, _batch.mul(self.field, np.int64(int(c) % self.field.q), self.a))

    __rmul__ = __mul__

    @property
    def T(self) -> MatGF:
        return MatGF._wrap(self.field, self.a.T)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MatGF)
            and other.field == self.field
            and other.shape == self.shape
            and bool((other.a == self.a).all())
        )

    def __hash__(self) -> int:
        return hash((self.field, self.shape, self.a.tobytes()))

    def __repr__(self) -> str:
        rows = "; ".join(" ".join(str(x) for x in row) for row in self.a.tolist())
        return f"MatGF({self.field}, [{rows}])"

    def rank(self) -> int:
        return mat_rank(self)

    def det(self) -> FqElem:
        return mat_det(self)

    def inv(self) -> MatGF:
        return mat_inv(self)

    def frobenius(self, k: int) -> MatGF:
        """Entries raised to p^k (the field automorphism sigma^k)."""
        return MatGF._wrap(self.field, _batch.frobenius(self.field, self.a, k))

    def __pow__(self, t: int) -> MatGF:
        if self.m != self.n:
            raise DimensionMismatch("power of a non-square matrix")
        if t < 0:
            return mat_inv(self) ** (-t)
        result = MatGF.identity(self.field, self.n)
        base = self
        while t:
            if t & 1:
                result = result @ base
            base = base @ base
            t >>= 1
        return result


# ---------------------------------------------------------------------------
# spec-level operations


def mat_add(A: MatGF, B: MatGF) -> MatGF:
    return A + B


def mat_sub(A: MatGF, B: MatGF) -> MatGF:
    return A - B


def mat_mul(A: MatGF, B: MatGF) -> MatGF:
    return A @ B


def mat_transpose(A: MatGF) -> MatGF:
    return A.T


def mat_scale(c, A: MatGF) -> MatGF:
    return A * c


def gf2_rank_packed(rows: Sequence[int], n_cols: int) -> int:
    """Rank over GF(2) of rows given as int bitsets."""
    work = list(rows)
    r = 0
    for col in range(n_cols):
        bit = 1 << col
        pivot = next((i for i in range(r, len(work)) if work[i] & bit), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        for i in range(len(work)):
            if i != r and work[i] & bit:
                work[i] ^= work[r]
        r += 1
        if r == len(work):
            break
    return r


def gf2_pack_rows(A: MatGF) -> list[int]:
    return [int(sum(int(x) << j for j, x in enumerate(row))) for row in A.a]


def gf2_matmul_packed(A: Sequence[int], B: Sequence[int]) -> list[int]:
    """Row-bitset product over GF(2): row i of AB is the XOR of rows j of B with A[i] bit j."""
    out = []
    for row in A:
        acc = 0
        j = 0
        while row:
            if row & 1:
                acc ^= B[j]
            row >>= 1
            j += 1
        out.append(acc)
    return out


def _rank_generic(A: MatGF) -> int:
    F = A.field
    rows = [list(map(int, r)) for r in A.a]
    r = 0
    for c in range(A.n):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = F.inv(rows[r][c])
        rows[r] = [F.mul(inv, x) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


def mat_rank(A: MatGF) -> int:
    """Rank by Gaussian elimination with first-nonzero pivoting."""
    if A.field.p == 2 and A.field.e == 1:
        return gf2_rank_packed(gf2_pack_rows(A), A.n)
    return _rank_generic(A)


def mat_det(A: MatGF) -> FqElem:
    F = A.field
    if A.m != A.n:
        raise DimensionMismatch("determinant of a non-square matrix")
    rows = [list(map(int, r)) for r in A.a]
    n = A.n
    det = 1
    for c in range(n):
        pivot = next((i for i in range(c, n) if rows[i][c]), None)
        if pivot is None:
            return F.zero
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            det = F.neg(det)
        det = F.mul(det, rows[c][c])
        inv = F.inv(rows[c][c])
        for i in range(c + 1, n):
            if rows[i][c]:
                f = F.mul(rows[i][c], inv)
                rows[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(rows[i], rows[c])]
    return FqElem(F, det)


def mat_inv(A: MatGF) -> MatGF:
    if A.m != A.n:
        raise DimensionMismatch("inverse of a non-square matrix")
    if mat_rank(A) < A.n:
        raise Singular("matrix is not invertible")
    return MatGF._wrap(A.field, _batch.inverse(A.field, A.a))


def gl_count(n: int, q: int) -> int:
    out = 1
    for i in range(n):
        out *= q**n - q**i
    return out


def gl_enumerate(n: int, F: FieldSpec, start: int = 0) -> Iterator[MatGF]:
    """Every invertible n x n matrix once, in key order of the entry grid.

    ``start`` is a grid key; the stream resumes from the first invertible grid
    with key >= start, so GL can be split into contiguous key ranges.
    """
    total = F.q ** (n * n)
    if total > ENUMERATION_CEILING:
        raise TooLarge(f"GL({n},{F.q}) enumeration exceeds the ceiling")
    step = 1 << 15
    s = start
    while s < total:
        keys = np.arange(s, min(total, s + step), dtype=np.uint64)
        M = _batch.unpack(F, keys, n, n)
        for a in M[_batch.ranks(F, M) == n]:
            yield MatGF._wrap(F, a)
        s += step


def mat_order(A: MatGF) -> int:
    """Least t >= 1 with A^t = I."""
    if A.m != A.n:
        raise DimensionMismatch("order of a non-square matrix")
    if mat_rank(A) < A.n:
        raise Singular("only invertible matrices have an order")
    I = MatGF.identity(A.field, A.n)
    bound = gl_count(A.n, A.field.q)
    X = A
    t = 1
    while X != I:
        X = X @ A
        t += 1
        if t > bound:  # pragma: no cover
            raise AssertionError("order exceeds |GL|")
    return t


def trace_pairing(A: MatGF, B: MatGF, K: FieldSpec | None = None) -> FqElem:
    """<A, B> = tr(A B^t), pushed down to K by the field trace.

    K defaults to the prime field; pass K = A.field for the plain matrix trace.
    """
    A._same(B)
    F = A.field
    s = 0
    for x, y in zip(A.a.ravel().tolist(), B.a.ravel().tolist()):
        s = F.add(s, F.mul(x, y))
    if K is None:
        K = fq_make(F.p)
    if K == F:
        return FqElem(F, s)
    from .gf import trace

    return trace(FqElem(F, s), K)


# ---------------------------------------------------------------------------
# linear systems over a field, row-vector convention


def rref(F: FieldSpec, rows) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form (zero rows dropped) and pivot columns."""
    M = [list(map(int, r)) for r in np.asarray(rows, dtype=np.int64).reshape(len(rows), -1)] if len(rows) else []
    pivots: list[int] = []
    r = 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(M)) if M[i][c]), None)
        if pivot is None:
            continue
        M[r], M[pivot] = M[pivot], M[r]
        inv = F.inv(M[r][c])
        M[r] = [F.mul(inv, x) for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return np.array(M[:r], dtype=np.int64).reshape(r, ncols), pivots


def nullspace(F: FieldSpec, A, ncols: int | None = None) -> np.ndarray:
    """Basis (as rows) of {y : A y^t = 0}."""
    A = np.asarray(A, dtype=np.int64)
    if ncols is None:
        ncols = A.shape[1]
    if A.size == 0:
        return np.eye(ncols, dtype=np.int64)
    R, piv = rref(F, A)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for i, pc in enumerate(piv):
            v[pc] = F.neg(int(R[i, f]))
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(len(basis), ncols)


def span_enumerate(F: FieldSpec, basis) -> np.ndarray:
    """All F-linear combinations of the given rows, ordered by coefficient index."""
    basis = np.asarray(basis, dtype=np.int64)
    k = basis.shape[0]
    shape = basis.shape[1:]
    if F.q**k > ENUMERATION_CEILING:
        raise TooLarge("span too large to enumerate")
    out = np.zeros((1,) + shape, dtype=np.int64)
    for i in range(k):
        # combos over basis[:i] are already in out; extend by c * basis[i]
        layers = [out]
        for c in range(1, F.q):
            layers.append(_batch.add(F, out, _batch.mul(F, np.int64(c), basis[i])[None]))
        out = np.concatenate(layers)
    return out


def solve_coords(F: FieldSpec, basis, v) -> np.ndarray | None:
    """Coefficients c with c @ basis = v, or None."""
    basis = np.asarray(basis, dtype=np.int64).reshape(len(basis), -1)
    v = np.asarray(v, dtype=np.int64).ravel()
    k = basis.shape[0]
    # solve basis^t c^t = v^t via nullspace of [basis^t | -v]
    aug = np.concatenate([basis.T, _batch.neg(F, v)[:, None]], axis=1)
    ns = nullspace(F, aug)
    for row in ns:
        if row[k]:
            s = F.inv(int(row[k]))
            return np.array([F.mul(int(x), s) for x in row[:k]], dtype=np.int64)
    return None
