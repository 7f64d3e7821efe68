"""Rank-metric codes: distance, MRD checks, rank distribution, normalization,
duality, closure predicates and flattening to Hamming-metric codes."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterator, Sequence

import numpy as np

from . import _batch
from .errors import (
    BadCardinality,
    BasisNotIndependent,
    DimensionMismatch,
    FieldMismatch,
    NoInvertibleElement,
    NotLinear,
    NotSquare,
    TooLarge,
    TooSmall,
    ValidationError,
    ZeroNotInCode,
)
from .gf import FieldSpec, embedding, fq_make
from .matgf import MatGF, nullspace, solve_coords, span_enumerate

ELEMENT_CEILING = 1 << 24


def _as_stack(field: FieldSpec, m: int, n: int, items) -> np.ndarray:
    if isinstance(items, np.ndarray):
        arr = items.astype(np.int64, copy=False)
    else:
        items = list(items)
        if not items:
            return np.zeros((0, m, n), dtype=np.int64)
        mats = []
        for x in items:
            if isinstance(x, MatGF):
                if x.field != field:
                    raise FieldMismatch(f"{x.field} vs {field}")
                mats.append(x.a)
            else:
                mats.append(np.asarray(x, dtype=np.int64))
        arr = np.stack(mats)
    if arr.ndim != 3 or arr.shape[1:] != (m, n):
        raise DimensionMismatch(f"expected matrices of shape {(m, n)}, got {arr.shape[1:]}")
    if arr.size and (arr.min() < 0 or arr.max() >= field.q):
        raise ValueError(f"entries outside 0..{field.q - 1}")
    return arr


def subfield_scalars(F: FieldSpec, K: FieldSpec | None = None) -> list[int]:
    """Nonzero elements of K (default: prime field) as indices of F."""
    if K is None:
        return list(range(1, F.p))
    return list(embedding(K, F)[1:])


def span_closure(F: FieldSpec, stack: np.ndarray, scalars: Sequence[int], limit: int | None = None):
    """Span of a stack of matrices under + and the given scalars.

    Returns (span_stack, basis_indices) with the span sorted by key, or None as
    soon as the span grows past ``limit``.  Basis vectors are picked greedily in
    key order, so the result is deterministic.
    """
    m, n = stack.shape[1:]
    keys = _batch.pack(F, stack)
    order = np.argsort(keys, kind="stable")
    stack, keys = stack[order], keys[order]
    span = np.zeros((1, m, n), dtype=np.int64)
    span_keys = np.zeros(1, dtype=np.uint64)
    chosen = []
    outside = ~np.isin(keys, span_keys)
    while outside.any():
        i = int(np.argmax(outside))
        v = stack[i]
        layers = [span] + [_batch.add(F, span, _batch.mul(F, np.int64(c), v)[None]) for c in scalars]
        span = np.concatenate(layers)
        if limit is not None and len(span) > limit:
            return None
        span_keys = np.sort(_batch.pack(F, span))
        chosen.append(int(order[i]))
        outside &= ~np.isin(keys, span_keys)
    srt = np.argsort(_batch.pack(F, span), kind="stable")
    return span[srt], chosen


class RankDistribution(dict):
    """rank value -> number of codewords with that rank."""

    @property
    def total(self) -> int:
        return sum(self.values())

    def __repr__(self) -> str:
        return "RankDistribution(" + ", ".join(f"{k}: {v}" for k, v in sorted(self.items())) + ")"


class RankCode:
    """A set of m x n matrices over ``field``, stored sorted by key.

    If ``basis`` is given the code is its full F-linear span.
    """

    def __init__(self, field: FieldSpec, m: int, n: int, elements=None, basis=None):
        if m < 1 or n < 1:
            raise DimensionMismatch("m, n must be >= 1")
        self.field = field
        self.m = m
        self.n = n
        self.basis: np.ndarray | None = None
        if basis is not None:
            b = _as_stack(field, m, n, basis)
            if field.q ** len(b) > ELEMENT_CEILING:
                raise TooLarge("code too large to enumerate")
            elems = span_enumerate(field, b) if len(b) else np.zeros((1, m, n), dtype=np.int64)
            if len(np.unique(_batch.pack(field, elems))) != len(elems):
                raise BasisNotIndependent("basis matrices are linearly dependent")
            self.basis = b
            self.basis.setflags(write=False)
        else:
            elems = _as_stack(field, m, n, elements if elements is not None else [])
        keys = _batch.pack(field, elems) if len(elems) else np.zeros(0, dtype=np.uint64)
        order = np.argsort(keys, kind="stable")
        keys = keys[order]
        if len(keys) > 1 and (keys[1:] == keys[:-1]).any():
            raise ValidationError("duplicate matrix in code")
        self.elements = np.ascontiguousarray(elems[order])
        self.keys = keys
        self.elements.setflags(write=False)
        self.keys.setflags(write=False)
        self._cache: dict = {}

    # container protocol ---------------------------------------------------
    def __len__(self) -> int:
        return len(self.keys)

    @property
    def size(self) -> int:
        return len(self.keys)

    def __iter__(self) -> Iterator[MatGF]:
        for a in self.elements:
            yield MatGF._wrap(self.field, a)

    def matrices(self) -> list[MatGF]:
        return list(self)

    def contains_keys(self, keys) -> np.ndarray:
        keys = np.asarray(keys, dtype=np.uint64)
        pos = np.searchsorted(self.keys, keys)
        pos = np.minimum(pos, len(self.keys) - 1)
        return self.keys[pos] == keys if len(self.keys) else np.zeros(keys.shape, dtype=bool)

    def __contains__(self, A) -> bool:
        if isinstance(A, MatGF):
            if A.field != self.field or A.shape != (self.m, self.n):
                return False
            A = A.a
        return bool(self.contains_keys(_batch.pack(self.field, np.asarray(A)[None]))[0])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RankCode)
            and other.field == self.field
            and (other.m, other.n) == (self.m, self.n)
            and np.array_equal(other.keys, self.keys)
        )

    def __hash__(self) -> int:
        return hash((self.field, self.m, self.n, self.keys.tobytes()))

    def __repr__(self) -> str:
        return f"RankCode({self.field}, {self.m}x{self.n}, |C|={len(self)})"

    # derived codes --------------------------------------------------------
    def with_elements(self, stack: np.ndarray) -> RankCode:
        return RankCode(self.field, stack.shape[1], stack.shape[2], elements=stack)

    def transpose(self) -> RankCode:
        out = RankCode(self.field, self.n, self.m, elements=np.swapaxes(self.elements, 1, 2))
        if self.basis is not None:
            out.basis = np.ascontiguousarray(np.swapaxes(self.basis, 1, 2))
        return out

    def translate(self, B: MatGF) -> RankCode:
        """C - B."""
        return self.with_elements(_batch.sub(self.field, self.elements, B.a[None]))

    def left_multiply(self, X: MatGF) -> RankCode:
        return self.with_elements(_batch.matmul(self.field, X.a[None], self.elements))

    def union_zero(self) -> RankCode:
        if MatGF.zeros(self.field, self.m, self.n) in self:
            return self
        z = np.zeros((1, self.m, self.n), dtype=np.int64)
        return self.with_elements(np.concatenate([z, self.elements]))

    @property
    def ranks(self) -> np.ndarray:
        if "ranks" not in self._cache:
            self._cache["ranks"] = _batch.ranks(self.field, self.elements)
        return self._cache["ranks"]

    @property
    def dimension(self) -> float:
        """log_q |C|."""
        return float(np.log(len(self)) / np.log(self.field.q)) if len(self) else float("-inf")

    def linear_basis(self, K: FieldSpec | None = None) -> np.ndarray:
        """A K-basis (default K = field) of a K-linear code; NotLinear otherwise."""
        K = K or self.field
        if K == self.field and self.basis is not None:
            return self.basis
        res = span_closure(self.field, self.elements, subfield_scalars(self.field, K), limit=len(self))
        if res is None or len(res[0]) != len(self) or not (self.keys[0] == 0):
            raise NotLinear("code is not closed under the requested scalars")
        return self.elements[res[1]]


# ---------------------------------------------------------------------------
# closure predicates


def is_additively_closed(C: RankCode) -> bool:
    if "additive" not in C._cache:
        if len(C) == 0 or C.keys[0] != 0:
            C._cache["additive"] = False
        else:
            res = span_closure(C.field, C.elements, subfield_scalars(C.field), limit=len(C))
            C._cache["additive"] = res is not None and len(res[0]) == len(C)
    return C._cache["additive"]


def is_linear_over(C: RankCode, K: FieldSpec | None = None) -> bool:
    K = K or C.field
    ck = ("linear", K)
    if ck not in C._cache:
        if len(C) == 0 or C.keys[0] != 0:
            C._cache[ck] = False
        else:
            res = span_closure(C.field, C.elements, subfield_scalars(C.field, K), limit=len(C))
            C._cache[ck] = res is not None and len(res[0]) == len(C)
    return C._cache[ck]


# ---------------------------------------------------------------------------
# distances


def _pairwise_min_rank(C: RankCode) -> int:
    F = C.field
    E = C.elements
    best = min(C.m, C.n)
    for i in range(len(E) - 1):
        d = _batch.ranks(F, _batch.sub(F, E[i + 1 :], E[i][None]))
        best = min(best, int(d.min()))
        if best == 1:
            break
    return best


def min_distance(C: RankCode, pairwise: bool = False) -> int:
    """min rank(A - B) over distinct codewords.

    Additively closed codes use the minimum nonzero rank instead, which agrees
    by translation invariance; ``pairwise=True`` forces the pair loop.
    """
    if len(C) < 2:
        raise TooSmall("minimum distance needs at least two codewords")
    if not pairwise and is_additively_closed(C):
        r = C.ranks
        return int(r[r > 0].min())
    return _pairwise_min_rank(C)


@dataclass(frozen=True)
class MRDVerdict:
    is_mrd: bool
    k: int | None
    d: int | None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.is_mrd


def is_mrd(C: RankCode) -> MRDVerdict:
    """Conditions |C| = q^(km) and d(C) = n - k + 1, with m >= n (transposing if needed)."""
    if C.m < C.n:
        C = C.transpose()
    q, m, n = C.field.q, C.m, C.n
    size = len(C)
    k = None
    for cand in range(1, n + 1):
        if q ** (cand * m) == size:
            k = cand
            break
    if k is None:
        return MRDVerdict(False, None, None, f"|C| = {size} is not q^(km) for 1 <= k <= {n}")
    d = min_distance(C)
    if d != n - k + 1:
        return MRDVerdict(False, k, d, f"d = {d} but n - k + 1 = {n - k + 1}")
    return MRDVerdict(True, k, d)


def rank_distribution(C: RankCode) -> RankDistribution:
    if MatGF.zeros(C.field, C.m, C.n) not in C:
        raise ZeroNotInCode("normalize the code so that it contains 0")
    vals, counts = np.unique(C.ranks, return_counts=True)
    return RankDistribution({int(v): int(c) for v, c in zip(vals, counts)})


def normalize(C: RankCode, identity: bool | None = None) -> RankCode:
    """Translate so 0 is in C; for square d = n codes also scale so I is in C.

    ``identity=None`` applies the second step whenever it is possible.
    """
    F = C.field
    zero = MatGF.zeros(F, C.m, C.n)
    if zero not in C:
        C = C.translate(MatGF._wrap(F, C.elements[0]))
    if identity is False:
        return C
    square = C.m == C.n
    if not square:
        if identity:
            raise NotSquare("identity normalization needs square matrices")
        return C
    I = MatGF.identity(F, C.n)
    if I in C:
        return C
    full = C.ranks == C.n
    if identity is None and not (len(C) > 1 and full.sum() == len(C) - 1):
        return C
    if not full.any():
        raise NoInvertibleElement("no invertible codeword to scale by")
    B = MatGF._wrap(F, C.elements[int(np.argmax(full))])
    return C.left_multiply(B.inv())


def dual(C: RankCode) -> RankCode:
    """Orthogonal complement under <A, B> = tr(A B^t)."""
    F = C.field
    if not is_linear_over(C, F):
        raise NotLinear("dual needs an F-linear code")
    B = C.linear_basis(F) if len(C) > 1 else np.zeros((0, C.m, C.n), dtype=np.int64)
    mn = C.m * C.n
    ns = nullspace(F, B.reshape(len(B), mn), ncols=mn)
    return RankCode(F, C.m, C.n, basis=ns.reshape(-1, C.m, C.n))


# ---------------------------------------------------------------------------
# Hamming-metric view


@dataclass
class HammingCode:
    """Words of length n over E as an (N, n) array of element indices."""

    field: FieldSpec
    words: np.ndarray
    n: int = dc_field(init=False)

    def __post_init__(self):
        self.words = np.asarray(self.words, dtype=np.int64)
        self.n = self.words.shape[1]

    def __len__(self) -> int:
        return len(self.words)

    def keys(self) -> np.ndarray:
        return _batch.pack(self.field, self.words[:, None, :])


def default_extension_basis(K: FieldSpec, m: int) -> tuple[FieldSpec, list[int]]:
    """GF(q^m) with K embedded, and its basis 1, x, ..., x^(m-1) over K."""
    E = fq_make(K.p, K.e * m)
    return E, [E.pow(E.index([0, 1]) if E.e > 1 else 1, i) for i in range(m)]


def _coords_table(E: FieldSpec, K: FieldSpec, basis: Sequence[int]) -> np.ndarray:
    """(q^m, m) table: for each element of E its K-coordinates in ``basis``."""
    emb = np.array(embedding(K, E), dtype=np.int64)
    m = len(basis)
    combos = np.zeros((1,), dtype=np.int64)
    coords = np.zeros((1, 0), dtype=np.int64)
    for b in basis:
        terms = np.array([E.mul(int(k), b) for k in emb], dtype=np.int64)
        combos = E.add_table[combos[:, None], terms[None, :]].reshape(-1) if E.tables else np.array(
            [E.add(int(c), int(t)) for c in combos for t in terms]
        )
        coords = np.concatenate(
            [np.repeat(coords, K.q, axis=0), np.tile(np.arange(K.q), len(coords))[:, None]], axis=1
        )
    table = np.full((E.q, m), -1, dtype=np.int64)
    table[combos] = coords
    if len(np.unique(combos)) != E.q:
        raise BasisNotIndependent("expansion basis is not independent over the subfield")
    return table


def expand_symbols(K: FieldSpec, E: FieldSpec, basis: Sequence[int], words: np.ndarray) -> np.ndarray:
    """Each E-symbol becomes a length-m column over K; (N, n) -> (N, m, n)."""
    table = _coords_table(E, K, basis)
    return np.swapaxes(table[np.asarray(words)], -1, -2)


def flatten(C: RankCode, E: FieldSpec | None = None, basis: Sequence[int] | None = None) -> HammingCode:
    """Column j of each codeword, read in ``basis``, becomes symbol j over E = GF(q^m)."""
    K = C.field
    if E is None:
        E, default = default_extension_basis(K, C.m)
        basis = basis if basis is not None else default
    elif basis is None:
        basis = default_extension_basis(K, C.m)[1]
        if E.q != K.q**C.m:
            raise FieldMismatch(f"{E} is not GF(q^m)")
    if len(basis) != C.m:
        raise BasisNotIndependent(f"need {C.m} basis elements, got {len(basis)}")
    emb = np.array(embedding(K, E), dtype=np.int64)
    _coords_table(E, K, basis)  # independence check
    lifted = emb[C.elements]  # (N, m, n) entries in E
    words = np.zeros((len(C), C.n), dtype=np.int64)
    for i, b in enumerate(basis):
        words = _batch.add(E, words, _batch.mul(E, lifted[:, i, :], np.int64(b)))
    return HammingCode(E, words)


def hamming_min_distance(code: HammingCode) -> int:
    W = code.words
    best = code.n
    for i in range(len(W) - 1):
        d = (W[i + 1 :] != W[i][None]).sum(axis=1)
        best = min(best, int(d.min()))
    return best


def is_mds_hamming(code: HammingCode) -> bool:
    """|code| = |E|^k and minimum Hamming distance n - k + 1."""
    size, q, n = len(code), code.field.q, code.n
    k = 0
    while q**k < size:
        k += 1
    if q**k != size:
        raise BadCardinality(f"|code| = {size} is not a power of {q}")
    if size < 2:
        return True
    if hamming_is_additive(code):
        w = (code.words != 0).sum(axis=1)
        d = int(w[w > 0].min())
    else:
        d = hamming_min_distance(code)
    return d == n - k + 1


def _hamming_closure(code: HammingCode, scalars: Sequence[int]) -> bool:
    stack = code.words[:, None, :]
    keys = np.sort(code.keys())
    if keys[0] != 0:
        return False
    res = span_closure(code.field, stack, scalars, limit=len(code))
    return res is not None and len(res[0]) == len(code)


def hamming_is_additive(code: HammingCode) -> bool:
    return _hamming_closure(code, subfield_scalars(code.field))


def hamming_is_linear(code: HammingCode) -> bool:
    """Closed under + and scaling by every element of E."""
    return _hamming_closure(code, list(range(1, code.field.q)))


def left_idealiser(C: RankCode) -> np.ndarray:
    """Basis of {M : M C ⊆ C} for an F-linear code C (m x m matrices)."""
    F = C.field
    m, n = C.m, C.n
    B = C.linear_basis(F) if len(C) > 1 else np.zeros((0, m, n), dtype=np.int64)
    D = dual(C).linear_basis(F) if len(C) < F.q ** (m * n) else np.zeros((0, m, n), dtype=np.int64)
    if len(B) == 0 or len(D) == 0:
        return np.eye(m * m, dtype=np.int64).reshape(-1, m, m)
    # M B_i lies in C iff tr(M B_i D_j^t) = 0 for every dual basis matrix D_j
    P = _batch.matmul(F, B[:, None], np.swapaxes(D, 1, 2)[None])  # (i, j, m, m)
    rows = np.swapaxes(P, -1, -2).reshape(-1, m * m)
    return nullspace(F, rows, ncols=m * m).reshape(-1, m, m)


def linear_flattening_basis(C: RankCode, E: FieldSpec | None = None) -> list[int] | None:
    """A basis of E = GF(q^m) over the code's field under which ``flatten(C)``
    is E-linear, or None when no basis works.

    flatten(C, E, b) is E-linear exactly when multiplication by a generator of E,
    written in the basis b, is a matrix M with M C = C.  So the search runs over
    the left idealiser: an M whose powers span a field of order q^m yields a
    basis b as a left eigenvector of M over E.
    """
    K = C.field
    m = C.m
    if E is None:
        E = default_extension_basis(K, m)[0]
    if not is_linear_over(C, K):
        raise NotLinear("linear flattening needs an F-linear code")
    emb = np.array(embedding(K, E), dtype=np.int64)
    L = span_enumerate(K, left_idealiser(C).reshape(-1, m * m)).reshape(-1, m, m)
    I = np.eye(m, dtype=np.int64)
    for M in L:
        powers = [I]
        for _ in range(m):
            powers.append(_batch.matmul(K, powers[-1], M))
        span = span_enumerate(K, np.stack(powers[:m]).reshape(m, -1)).reshape(-1, m, m)
        if len(np.unique(_batch.pack(K, span))) != K.q**m or (_batch.ranks(K, span[1:]) < m).any():
            continue
        c = solve_coords(K, np.stack(powers[:m]).reshape(m, -1), powers[m].reshape(-1))
        # roots in E of x^m - sum c_i x^i
        lam = np.arange(E.q)
        val = np.array([E.pow(int(x), m) for x in lam], dtype=np.int64)
        for i, ci in enumerate(c):
            val = _batch.sub(E, val, _batch.mul(E, np.int64(emb[ci]), np.array([E.pow(int(x), i) for x in lam])))
        for root in lam[val == 0]:
            A = _batch.sub(E, emb[M], _batch.mul(E, np.int64(root), I))
            ns = nullspace(E, A.T)
            if len(ns) != 1:
                continue
            basis = [int(x) for x in ns[0]]
            try:
                words = flatten(C, E, basis)
            except BasisNotIndependent:
                continue
            if hamming_is_linear(words):
                return basis
    return None
