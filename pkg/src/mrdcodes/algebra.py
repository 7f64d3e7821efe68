"""Quasifields as multiplication tables, their substructures, and the
correspondence with normalized d = n MRD codes (spreadsets)."""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _batch
from .code import RankCode, is_additively_closed, is_linear_over, normalize
from .errors import (
    DimensionMismatch,
    KNotInKernel,
    NotASemifield,
    NotMRD,
    NotNormalized,
    NotSquare,
    TooLarge,
    ValidationError,
)
from .gf import FieldSpec, fq_make

MAX_ORDER = 1 << 10


def _digits(p: int, dim: int) -> np.ndarray:
    idx = np.arange(p**dim)
    return np.stack([(idx // p**i) % p for i in range(dim)], axis=1).astype(np.int64)


def _undigits(p: int, d: np.ndarray) -> np.ndarray:
    w = p ** np.arange(d.shape[-1], dtype=np.int64)
    return (d * w).sum(axis=-1)


class Quasifield:
    """Multiplication table on p^dim elements.

    Elements are indices whose base-p digits are the coordinates over GF(p);
    addition is digitwise mod p.  ``identity`` is detected when not given.
    """

    def __init__(self, p: int, dim: int, table, identity: int | None = None):
        N = p**dim
        if N > MAX_ORDER:
            raise TooLarge(f"order {N} exceeds the table limit {MAX_ORDER}")
        t = np.array(table, dtype=np.int64).reshape(N, N) if np.size(table) == N * N else None
        if t is None:
            raise DimensionMismatch(f"table must have {N}x{N} entries")
        if t.min() < 0 or t.max() >= N:
            raise ValidationError("table entries out of range")
        t.setflags(write=False)
        self.p, self.dim, self.table = p, dim, t
        if identity is None:
            ar = np.arange(N)
            hits = np.nonzero((t == ar[None, :]).all(axis=1) & (t == ar[:, None]).all(axis=0))[0]
            identity = int(hits[0]) if len(hits) else None
        self.identity = identity

    @classmethod
    def from_field(cls, E: FieldSpec) -> Quasifield:
        return cls(E.p, E.e, E.mul_table, identity=1)

    @property
    def order(self) -> int:
        return self.p**self.dim

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"Quasifield(order={self.order}, identity={self.identity})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Quasifield)
            and (self.p, self.dim, self.identity) == (other.p, other.dim, other.identity)
            and np.array_equal(self.table, other.table)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.dim, self.table.tobytes()))

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    @functools.cached_property
    def digits(self) -> np.ndarray:
        return _digits(self.p, self.dim)

    @functools.cached_property
    def add_table(self) -> np.ndarray:
        d = self.digits
        return _undigits(self.p, (d[:, None, :] + d[None, :, :]) % self.p)

    @functools.cached_property
    def neg_table(self) -> np.ndarray:
        return _undigits(self.p, (-self.digits) % self.p)

    def add(self, a, b):
        return self.add_table[a, b]

    def sub(self, a, b):
        return self.add_table[a, self.neg_table[b]]

    def scale(self, c: int, a):
        """Integer multiple c * a (the prime field acting additively)."""
        return _undigits(self.p, (c * self.digits[a]) % self.p)


# ---------------------------------------------------------------------------
# axioms


@dataclass(frozen=True)
class AxiomVerdict:
    ok: bool
    axiom: str | None = None
    witness: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_quasifield(Q: Quasifield) -> AxiomVerdict:
    """Exhaustive check of axioms (i)-(v); reports the first failure with a witness."""
    T, N = Q.table, Q.order
    A, S = Q.add_table, Q.sub
    ar = np.arange(N)
    # (i) zero annihilates on both sides
    bad = np.nonzero((T[0] != 0) | (T[:, 0] != 0))[0]
    if len(bad):
        return AxiomVerdict(False, "i", (int(bad[0]),))
    # (ii) two-sided identity
    if Q.identity is None:
        return AxiomVerdict(False, "ii", ())
    e = Q.identity
    bad = np.nonzero((T[e] != ar) | (T[:, e] != ar))[0]
    if len(bad):
        return AxiomVerdict(False, "ii", (int(bad[0]),))
    # (iii) a o x = b uniquely solvable for a != 0: each row is a permutation
    srt = np.sort(T[1:], axis=1)
    bad = np.nonzero((srt != ar[None, :]).any(axis=1))[0]
    if len(bad):
        a = int(bad[0]) + 1
        vals, counts = np.unique(T[a], return_counts=True)
        b = int(vals[counts > 1][0])
        return AxiomVerdict(False, "iii", (a, b))
    # (iv) x -> x o a - x o b is a bijection for a != b
    for a in range(N):
        diff = S(T[:, a][:, None], T[:, :])  # diff[x, b] = x o a - x o b
        diff = np.delete(diff, a, axis=1)
        bad = np.nonzero((np.sort(diff, axis=0) != ar[:, None]).any(axis=0))[0]
        if len(bad):
            b = int(bad[0]) + (1 if bad[0] >= a else 0)
            vals, counts = np.unique(S(T[:, a], T[:, b]), return_counts=True)
            c = int(vals[counts > 1][0])
            return AxiomVerdict(False, "iv", (a, b, c))
    # (v) right distributivity
    for c in range(N):
        lhs = T[A, c]
        rhs = A[T[:, c][:, None], T[:, c][None, :]]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            return AxiomVerdict(False, "v", (int(bad[0][0]), int(bad[0][1]), c))
    return AxiomVerdict(True)


def left_distributivity_witness(Q: Quasifield) -> tuple[int, int, int] | None:
    """(a, b, c) with a o (b + c) != a o b + a o c, or None."""
    T, A = Q.table, Q.add_table
    for a in range(Q.order):
        lhs = T[a][A]
        rhs = A[T[a][:, None], T[a][None, :]]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            return a, int(bad[0][0]), int(bad[0][1])
    return None


def associativity_witness(Q: Quasifield) -> tuple[int, int, int] | None:
    """(a, b, c) with (a o b) o c != a o (b o c), or None."""
    T = Q.table
    for a in range(Q.order):
        lhs = T[T[a]][:, :]  # (a o b) o c indexed [b, c]
        rhs = T[a][T]  # a o (b o c)
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            return a, int(bad[0][0]), int(bad[0][1])
    return None


def is_semifield(Q: Quasifield) -> bool:
    return left_distributivity_witness(Q) is None


def is_nearfield(Q: Quasifield) -> bool:
    return associativity_witness(Q) is None


def is_commutative(Q: Quasifield) -> bool:
    return bool(np.array_equal(Q.table, Q.table.T))


def is_field(Q: Quasifield) -> bool:
    return is_commutative(Q) and is_nearfield(Q) and is_semifield(Q)


# ---------------------------------------------------------------------------
# substructures


@dataclass(frozen=True)
class SubStructure:
    """An index set inside a quasifield; ``field``/``embed`` are set when it is a field.

    ``embed[k]`` is the quasifield element corresponding to element k of ``field``.
    """

    name: str
    indices: tuple[int, ...]
    field: FieldSpec | None = None
    embed: tuple[int, ...] | None = None

    @property
    def order(self) -> int:
        return len(self.indices)

    def __contains__(self, x) -> bool:
        return int(x) in set(self.indices)


def identify_field(Q: Quasifield, indices: Sequence[int]) -> tuple[FieldSpec, tuple[int, ...]] | None:
    """Isomorphism from GF(p^s) (default modulus) onto a subset that is a field, or None."""
    idx = np.array(sorted(int(i) for i in indices), dtype=np.int64)
    n = len(idx)
    s = 0
    while Q.p**s < n:
        s += 1
    if Q.p**s != n or Q.identity is None:
        return None
    K = fq_make(Q.p, s)
    T = Q.table
    e = Q.identity

    def power(x: int, k: int) -> int:
        r = e
        for _ in range(k):
            r = int(T[r, x])
        return r

    def evaluate(coeffs, x: int) -> int:
        acc = 0
        for i, c in enumerate(coeffs):
            if c:
                acc = int(Q.add(acc, int(Q.scale(c, power(x, i)))))
        return acc

    for r in idx:
        if evaluate(K.modulus, int(r)) != 0:
            continue
        embed = tuple(evaluate(K.coeffs(k), int(r)) if s > 1 else int(Q.scale(k, e)) for k in range(K.q))
        emb = np.array(embed)
        if sorted(embed) != idx.tolist():
            continue
        ks = np.arange(K.q)
        mul_ok = np.array_equal(emb[K.mul_table[ks[:, None], ks[None, :]]], T[emb[:, None], emb[None, :]])
        add_ok = np.array_equal(emb[K.add_table[ks[:, None], ks[None, :]]], Q.add_table[emb[:, None], emb[None, :]])
        if mul_ok and add_ok:
            return K, embed
    return None


def _substructure(Q: Quasifield, name: str, mask: np.ndarray) -> SubStructure:
    ind = tuple(int(i) for i in np.nonzero(mask)[0])
    ident = identify_field(Q, ind)
    if ident is None:
        return SubStructure(name, ind)
    return SubStructure(name, ind, ident[0], ident[1])


def _left_assoc_mask(Q: Quasifield) -> np.ndarray:
    T = Q.table
    # x o (a o b) == (x o a) o b
    return np.array([np.array_equal(T[x][T], T[T[x]]) for x in range(Q.order)])


def kernel(Q: Quasifield) -> SubStructure:
    T, A = Q.table, Q.add_table
    dist = np.array(
        [np.array_equal(T[c][A], A[T[c][:, None], T[c][None, :]]) for c in range(Q.order)]
    )
    return _substructure(Q, "kernel", dist & _left_assoc_mask(Q))


def _require_semifield_like(Q: Quasifield):
    if not (is_semifield(Q) or is_nearfield(Q)):
        raise NotASemifield("nuclei and center are defined here for semifields and nearfields")


def nucleus_left(Q: Quasifield) -> SubStructure:
    _require_semifield_like(Q)
    return _substructure(Q, "left nucleus", _left_assoc_mask(Q))


def _middle_mask(Q: Quasifield) -> np.ndarray:
    T = Q.table
    # a o (x o b) == (a o x) o b
    return np.array([np.array_equal(T[:, T[x]], T[T[:, x]]) for x in range(Q.order)])


def _right_mask(Q: Quasifield) -> np.ndarray:
    T = Q.table
    # a o (b o x) == (a o b) o x
    return np.array([np.array_equal(T[:, T[:, x]], T[T, x]) for x in range(Q.order)])


def nucleus_middle(Q: Quasifield) -> SubStructure:
    _require_semifield_like(Q)
    return _substructure(Q, "middle nucleus", _middle_mask(Q))


def nucleus_right(Q: Quasifield) -> SubStructure:
    _require_semifield_like(Q)
    return _substructure(Q, "right nucleus", _right_mask(Q))


def center(Q: Quasifield) -> SubStructure:
    _require_semifield_like(Q)
    comm = (Q.table == Q.table.T).all(axis=0)
    mask = _left_assoc_mask(Q) & _middle_mask(Q) & _right_mask(Q) & comm
    return _substructure(Q, "center", mask)


def prime_subfield(Q: Quasifield) -> SubStructure:
    K = fq_make(Q.p, 1)
    embed = tuple(int(Q.scale(k, Q.identity)) for k in range(Q.p))
    return SubStructure("prime field", tuple(sorted(embed)), K, embed)


def generated_substructure(Q: Quasifield, gens: Sequence[int]) -> tuple[int, ...]:
    """Closure of {e} and gens under + and o."""
    S = {0, Q.identity, *map(int, gens)}
    while True:
        arr = np.array(sorted(S))
        new = set(Q.add_table[arr[:, None], arr[None, :]].ravel().tolist())
        new |= set(Q.table[arr[:, None], arr[None, :]].ravel().tolist())
        if new <= S:
            return tuple(sorted(S))
        S |= new


def subfields(Q: Quasifield) -> list[SubStructure]:
    """All subsets closed under + and o that are fields (each generated by one element)."""
    seen: dict[tuple, SubStructure] = {}
    for x in range(Q.order):
        ind = generated_substructure(Q, [x])
        if ind in seen:
            continue
        ident = identify_field(Q, ind)
        if ident is not None:
            seen[ind] = SubStructure(f"subfield of order {len(ind)}", ind, ident[0], ident[1])
    return sorted(seen.values(), key=lambda s: (s.order, s.indices))


def kernel_subfield(Q: Quasifield, K: FieldSpec | SubStructure | None = None) -> SubStructure:
    """The subfield of Ker Q of order |K|, identified with K (prime field if None)."""
    if K is None:
        return prime_subfield(Q)
    if isinstance(K, SubStructure):
        ker = set(kernel(Q).indices)
        if not set(K.indices) <= ker:
            raise KNotInKernel(f"{K.name} is not contained in the kernel")
        return K
    ker = kernel(Q)
    if ker.field is None or ker.field.e % K.e or ker.field.p != K.p:
        raise KNotInKernel(f"{K} does not embed in the kernel")
    sub = []
    for x in ker.indices:
        r = x
        for _ in range(K.e):
            r = _qpow(Q, r, K.p)
        if r == x:
            sub.append(x)
    ident = identify_field(Q, sub)
    if ident is None or ident[0] != K:
        raise KNotInKernel(f"could not identify {K} inside the kernel")
    return SubStructure(f"GF({K.q}) in kernel", tuple(sorted(sub)), ident[0], ident[1])


def _qpow(Q: Quasifield, x: int, k: int) -> int:
    r = Q.identity
    for _ in range(k):
        r = int(Q.table[r, x])
    return r


def is_division_algebra_over(Q: Quasifield, K: SubStructure) -> bool:
    """(k o a) o b = k o (a o b) = a o (k o b) for all k in K, a, b in Q."""
    T = Q.table
    for k in K.indices:
        lhs = T[T[k]]  # (k o a) o b
        mid = T[k][T]  # k o (a o b)
        rhs = T[:, T[k]]  # a o (k o b)
        if not (np.array_equal(lhs, mid) and np.array_equal(mid, rhs)):
            return False
    return True


# ---------------------------------------------------------------------------
# spreadsets


def vector_digits(K: FieldSpec, n: int) -> np.ndarray:
    """(q^n, n) K-coordinates of vector indices sum w_i q^i."""
    idx = np.arange(K.q**n)
    return np.stack([(idx // K.q**i) % K.q for i in range(n)], axis=1).astype(np.int64)


def vector_index(K: FieldSpec, w) -> np.ndarray:
    w = np.asarray(w, dtype=np.int64)
    return (w * (K.q ** np.arange(w.shape[-1], dtype=np.int64))).sum(axis=-1)


class SpreadSet:
    """Matrices A(w) indexed by w (vector index), with first row of A(w) equal to w."""

    def __init__(self, field: FieldSpec, n: int, mats: np.ndarray, check: bool = True):
        mats = np.asarray(mats, dtype=np.int64)
        if mats.shape != (field.q**n, n, n):
            raise DimensionMismatch(f"expected {(field.q**n, n, n)}, got {mats.shape}")
        self.field, self.n, self.mats = field, n, mats
        mats.setflags(write=False)
        if check:
            if not np.array_equal(vector_index(field, mats[:, 0, :]), np.arange(field.q**n)):
                raise ValidationError("first row of A(w) must equal w")
            if mats[0].any() or not np.array_equal(mats[1], np.eye(n, dtype=np.int64)):
                raise ValidationError("A(0) must be 0 and A(e1) must be I")

    def __len__(self) -> int:
        return len(self.mats)

    def A(self, w) -> np.ndarray:
        if not np.isscalar(w):
            w = int(vector_index(self.field, w))
        return self.mats[w]

    def code(self) -> RankCode:
        return RankCode(self.field, self.n, self.n, elements=self.mats)

    def is_spread(self) -> bool:
        """All pairwise differences invertible."""
        F, M = self.field, self.mats
        for i in range(len(M) - 1):
            if (_batch.ranks(F, _batch.sub(F, M[i + 1 :], M[i][None])) < self.n).any():
                return False
        return True


def spreadset_from_code(C: RankCode) -> SpreadSet:
    if C.m != C.n:
        raise NotSquare("spreadsets need square matrices")
    F, n = C.field, C.n
    from .matgf import MatGF

    if MatGF.zeros(F, n, n) not in C or MatGF.identity(F, n) not in C:
        raise NotNormalized("code must contain 0 and I")
    if len(C) != F.q**n or (C.ranks[C.keys != 0] < n).any():
        raise NotMRD("need q^n matrices with all nonzero ones invertible")
    idx = vector_index(F, C.elements[:, 0, :])
    mats = np.empty_like(C.elements)
    mats[idx] = C.elements
    return SpreadSet(F, n, mats)


def quasifield_from_spreadset(S: SpreadSet) -> Quasifield:
    """w o w' = w A(w')."""
    K, n = S.field, S.n
    V = vector_digits(K, n)
    prod = _batch.matmul(K, V[None, :, :], S.mats)  # [w', w, :]
    table = vector_index(K, prod).T
    return Quasifield(K.p, n * K.e, table, identity=1)


@dataclass
class Representation:
    """R(a) for every a, with respect to ``basis`` (e first) over the subfield ``K``."""

    spreadset: SpreadSet
    K: SubStructure
    basis: tuple[int, ...]
    coords: np.ndarray  # (|Q|, n) K-coordinates of each element
    to_vector: np.ndarray  # element index -> vector index

    def code(self) -> RankCode:
        return self.spreadset.code()


def right_representation(Q: Quasifield, K: FieldSpec | SubStructure | None = None) -> Representation:
    """Right multiplications x -> x o a as matrices over K <= Ker Q.

    The basis starts with the identity and is extended greedily by the least
    element index outside the K-span so far.
    """
    Ks = kernel_subfield(Q, K)
    F = Ks.field
    emb = np.array(Ks.embed, dtype=np.int64)
    T = Q.table
    span = np.zeros(1, dtype=np.int64)
    span_coords = np.zeros((1, 0), dtype=np.int64)
    basis = []
    while len(span) < Q.order:
        inside = np.zeros(Q.order, dtype=bool)
        inside[span] = True
        b = Q.identity if not basis else int(np.argmax(~inside))
        basis.append(b)
        mults = T[emb, b]  # k o b
        span_new = Q.add_table[span[:, None], mults[None, :]].reshape(-1)
        span_coords = np.concatenate(
            [np.repeat(span_coords, F.q, axis=0), np.tile(np.arange(F.q), len(span))[:, None]], axis=1
        )
        span = span_new
    n = len(basis)
    coords = np.empty((Q.order, n), dtype=np.int64)
    coords[span] = span_coords
    b = np.array(basis)
    mats = coords[T[b][:, :]]  # [i, a, :] -> coords(b_i o a)
    mats = np.transpose(mats, (1, 0, 2))  # R(a)[i, :]
    to_vec = vector_index(F, coords)
    ordered = np.empty_like(mats)
    ordered[to_vec] = mats
    return Representation(SpreadSet(F, n, ordered), Ks, tuple(basis), coords, to_vec)


def quasifield_from_code(C: RankCode) -> Quasifield:
    return quasifield_from_spreadset(spreadset_from_code(C))


def transpose_quasifield(Q: Quasifield, K: FieldSpec | SubStructure | None = None) -> Quasifield:
    """Quasifield of the transposed code {R(a)^t}, re-indexed by first rows.

    This is isotopic (F = H = id) to the structure w1 o w2 = w1 R(w2)^t.
    """
    C = right_representation(Q, K).code()
    return quasifield_from_code(C.transpose())


# ---------------------------------------------------------------------------
# correspondence cross-checks


def automorphisms(Q: Quasifield) -> np.ndarray:
    """Matrices P over GF(p) (acting on digit vectors) that respect the multiplication.

    Automorphisms are additive, hence GF(p)-linear, so scanning GL(dim, p) is exhaustive.
    """
    F = fq_make(Q.p)
    G = _batch.gl_array(F, Q.dim)
    weights = Q.p ** np.arange(Q.dim)
    T = Q.table
    keep = []
    for s in range(0, len(G), 4096):
        perms = (_batch.matmul(F, Q.digits[None], G[s : s + 4096]) * weights).sum(-1)
        for i, pm in enumerate(perms):
            if np.array_equal(pm[T], T[pm[:, None], pm[None, :]]):
                keep.append(s + i)
    return G[keep]


def frobenius_type_automorphism(Q: Quasifield) -> np.ndarray | None:
    """An automorphism conjugate in GL(dim, p) to x -> x^p on GF(p^dim), or None.

    Such an automorphism is the field Frobenius after identifying (Q, +) with
    (GF(p^dim), +) by a suitable linear bijection.
    """
    F = fq_make(Q.p)
    n = Q.dim
    E = fq_make(Q.p, n)
    # row j: coordinates of (x^j)^p, so v -> v @ frob is the Frobenius on coordinates
    frob = np.array([E.coeffs(E.pow(Q.p**j, Q.p)) for j in range(n)], dtype=np.int64)
    G = _batch.gl_array(F, n)
    Gi = _batch.inverse(F, G)
    conj_keys = set(_batch.pack(F, _batch.matmul(F, _batch.matmul(F, Gi, frob[None]), G)).tolist())
    for P in automorphisms(Q):
        if int(_batch.pack(F, P)) in conj_keys:
            return P
    return None


@dataclass
class CorrespondenceReport:
    additively_closed: bool
    left_distributive: bool
    k_linear: bool
    k_central: bool
    division_algebra: bool

    @property
    def t2(self) -> bool:
        return self.additively_closed == self.left_distributive

    @property
    def t3(self) -> bool:
        return self.k_linear == (self.left_distributive and self.k_central)

    @property
    def proposition(self) -> bool:
        return (not self.left_distributive) or (self.division_algebra == self.k_central)

    @property
    def holds(self) -> bool:
        return self.t2 and self.t3 and self.proposition


def verify_t2_t3(obj: RankCode | Quasifield, K: FieldSpec | None = None) -> CorrespondenceReport:
    """Cross-check additive closure <-> left distributivity and K-linearity <-> K central."""
    if isinstance(obj, RankCode):
        C = normalize(obj)
        Q = quasifield_from_code(C)
        Kf = K or C.field
        Ks = kernel_subfield(Q, Kf)
    else:
        Q = obj
        Ks = kernel_subfield(Q, K)
        C = right_representation(Q, Ks).code()
        Kf = Ks.field
    semi = is_semifield(Q)
    central = semi and set(Ks.indices) <= set(center(Q).indices)
    return CorrespondenceReport(
        additively_closed=is_additively_closed(C),
        left_distributive=semi,
        k_linear=is_linear_over(C, C.field if Kf == C.field else Kf),
        k_central=central,
        division_algebra=semi and is_division_algebra_over(Q, Ks),
    )
