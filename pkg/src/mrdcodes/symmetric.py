"""Bilinear forms on quasifields, invariant forms and symmetric MRD codes.

Vectors are rows and <x, y> = x G y^t.  Forms on a quasifield Q over K are
written in the basis of ``right_representation(Q, K)``, where x o a = x R(a).
Then <x o a, y> has Gram matrix R(a) G, and invariance
<x o a, y> = <x, y o a> reads R(a) G = G R(a)^t.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _batch
from .algebra import (
    Quasifield,
    quasifield_from_code,
    right_representation,
    spreadset_from_code,
)
from .code import RankCode, _coords_table, default_extension_basis
from .errors import DimensionMismatch, NotASubfield, NotInvariant, TooLarge, ZeroScalar
from .gf import FieldSpec, FqElem, trace
from .matgf import nullspace, span_enumerate

# solution spaces up to this size are searched exhaustively
FORM_SEARCH_LIMIT = 1 << 20


@dataclass
class BilinearForm:
    field: FieldSpec
    gram: np.ndarray

    def __post_init__(self):
        self.gram = np.asarray(self.gram, dtype=np.int64)
        if self.gram.ndim != 2 or self.gram.shape[0] != self.gram.shape[1]:
            raise DimensionMismatch("Gram matrix must be square")

    @property
    def n(self) -> int:
        return self.gram.shape[0]

    def __call__(self, x, y) -> np.ndarray:
        """<x, y> for row vectors (broadcasting over leading axes)."""
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        xg = _batch.matmul(self.field, x[..., None, :], self.gram)[..., 0, :]
        return _batch.matmul(self.field, xg[..., None, :], y[..., :, None])[..., 0, 0]

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.gram, self.gram.T))

    def is_nondegenerate(self) -> bool:
        return int(_batch.rank(self.field, self.gram)) == self.n

    def to_json(self) -> dict:
        return {"field": self.field.descriptor(), "gram": self.gram.tolist()}


def _check_subfield(E: FieldSpec, K: FieldSpec):
    if E.p != K.p or E.e % K.e:
        raise NotASubfield(f"GF({K.q}) is not a subfield of GF({E.q})")


def trace_form(E: FieldSpec, K: FieldSpec, basis: Sequence[int] | None = None) -> BilinearForm:
    """Gram matrix tr_{E/K}(x_i x_j); the default basis is 1, x, ..., x^(n-1)."""
    _check_subfield(E, K)
    n = E.e // K.e
    if basis is None:
        basis = _default_basis(E, K)
    gram = np.array(
        [[trace(FqElem(E, E.mul(a, b)), K).index for b in basis] for a in basis], dtype=np.int64
    )
    return BilinearForm(K, gram.reshape(n, n))


def _default_basis(E: FieldSpec, K: FieldSpec) -> list[int]:
    E2, basis = default_extension_basis(K, E.e // K.e)
    if E2 == E:
        return list(basis)
    # E is not the default extension: take powers of the least generator over K
    for g in range(1, E.q):
        pw = [1]
        for _ in range(E.e // K.e - 1):
            pw.append(E.mul(pw[-1], g))
        try:
            _coords_table(E, K, pw)
            return pw
        except Exception:
            continue
    raise NotASubfield("no power basis found")


def scaled_form_family(E: FieldSpec, K: FieldSpec, a: int, basis: Sequence[int] | None = None) -> BilinearForm:
    """Gram matrix of (x, y) -> tr(a x y)."""
    if a == 0:
        raise ZeroScalar("the scaled trace form needs a != 0")
    _check_subfield(E, K)
    if basis is None:
        basis = _default_basis(E, K)
    n = len(basis)
    gram = np.array(
        [[trace(FqElem(E, E.mul(a, E.mul(x, y))), K).index for y in basis] for x in basis], dtype=np.int64
    )
    return BilinearForm(K, gram.reshape(n, n))


def scaled_family_code(E: FieldSpec, K: FieldSpec, basis: Sequence[int] | None = None) -> RankCode:
    """The Gram matrices of all scaled trace forms, together with 0."""
    if basis is None:
        basis = _default_basis(E, K)
    n = len(basis)
    mats = [np.zeros((n, n), dtype=np.int64)]
    mats += [scaled_form_family(E, K, a, basis).gram for a in range(1, E.q)]
    return RankCode(K, n, n, elements=np.stack(mats))


def dual_basis_matrix(E: FieldSpec, K: FieldSpec, basis: Sequence[int] | None = None) -> np.ndarray:
    """B with y_i = sum_j B_ij x_j the trace-dual basis: tr(x_i y_j) = delta_ij."""
    T = trace_form(E, K, basis).gram
    return _batch.inverse(K, T[None])[0]


# ---------------------------------------------------------------------------
# forms on quasifields


def _rep(Q: Quasifield, K):
    R = right_representation(Q, K)
    Kf = R.K.field
    mats = R.spreadset.mats[R.to_vector]  # R(a) indexed by element
    vecs = R.coords
    return R, Kf, mats, vecs


def invariance_witness(Q: Quasifield, form: BilinearForm, K=None) -> tuple[int, int, int] | None:
    """First (a, x, y) in index order with <x o a, y> != <x, y o a>, or None."""
    R, Kf, mats, V = _rep(Q, K)
    if form.field != Kf or form.n != V.shape[1]:
        raise DimensionMismatch("form does not match the quasifield over K")
    P = _batch.matmul(Kf, _batch.matmul(Kf, V, form.gram), V.T)  # P[x, y] = <x, y>
    T = Q.table
    left = P[T.T[:, :, None], np.arange(Q.order)[None, None, :]]  # [a, x, y] = <x o a, y>
    right = P[np.arange(Q.order)[None, :, None], T.T[:, None, :]]  # [a, x, y] = <x, y o a>
    bad = np.argwhere(left != right)
    return tuple(int(v) for v in bad[0]) if len(bad) else None


def is_invariant_form(Q: Quasifield, form: BilinearForm, K=None) -> bool:
    """Exhaustive check of <x o a, y> = <x, y o a> over all triples."""
    return invariance_witness(Q, form, K) is None


def is_invariant_matrix_criterion(Q: Quasifield, form: BilinearForm, K=None) -> bool:
    """R(a) G = G R(a)^t for every a."""
    R, Kf, mats, _ = _rep(Q, K)
    G = form.gram
    lhs = _batch.matmul(Kf, mats, G[None])
    rhs = _batch.matmul(Kf, G[None], np.swapaxes(mats, 1, 2))
    return bool(np.array_equal(lhs, rhs))


def quasifield_forms(Q: Quasifield, form: BilinearForm, K=None) -> list[BilinearForm]:
    """The forms <x o a, y> for every a (indexed by element), Gram matrices R(a) G."""
    if not (form.is_symmetric() and form.is_nondegenerate()):
        raise NotInvariant("the form must be symmetric and non-degenerate")
    if not is_invariant_form(Q, form, K):
        raise NotInvariant("the form is not invariant")
    R, Kf, mats, _ = _rep(Q, K)
    grams = _batch.matmul(Kf, mats, form.gram[None])
    return [BilinearForm(Kf, g) for g in grams]


def symmetric_code(Q: Quasifield, form: BilinearForm, K=None) -> RankCode:
    forms = quasifield_forms(Q, form, K)
    n = form.n
    return RankCode(form.field, n, n, elements=np.stack([f.gram for f in forms]))


def _kron_system(Kf: FieldSpec, mats: np.ndarray) -> np.ndarray:
    """Rows of the linear system in vec(G) (row-major) for G = G^t and R G = G R^t."""
    n = mats.shape[-1]
    eye = np.eye(n, dtype=np.int64)
    rows = []
    for Rm in mats:
        # vec(R G) = (R kron I) vec(G), vec(G R^t) = (I kron R) vec(G)
        left = _batch.mul(Kf, Rm[:, None, :, None], eye[None, :, None, :]).reshape(n * n, n * n)
        right = _batch.mul(Kf, eye[:, None, :, None], Rm[None, :, None, :]).reshape(n * n, n * n)
        rows.append(_batch.sub(Kf, left, right))
    for i in range(n):
        for j in range(i + 1, n):
            r = np.zeros(n * n, dtype=np.int64)
            r[i * n + j] = 1
            r[j * n + i] = Kf.neg(1)
            rows.append(r[None])
    return np.concatenate(rows)


@dataclass
class FormSearch:
    """Result of the invariant-form search: solution space dimension and exhaustiveness."""

    form: BilinearForm | None
    solution_dim: int
    exhaustive: bool


def invariant_form_search(Q: Quasifield, K=None) -> FormSearch:
    """Solve G = G^t, R(a) G = G R(a)^t for all a, then scan the solutions in index order."""
    R, Kf, mats, _ = _rep(Q, K)
    n = mats.shape[-1]
    A = _kron_system(Kf, mats)
    ns = nullspace(Kf, A, ncols=n * n)
    dim = len(ns)
    if dim == 0:
        return FormSearch(None, 0, True)
    size = Kf.q**dim
    if size <= FORM_SEARCH_LIMIT:
        grams = span_enumerate(Kf, ns).reshape(-1, n, n)
        ok = np.nonzero(_batch.ranks(Kf, grams) == n)[0]
        form = BilinearForm(Kf, grams[ok[0]]) if len(ok) else None
        return FormSearch(form, dim, True)
    # too many to exhaust: deterministic strided sample of coefficient vectors
    stride = size // FORM_SEARCH_LIMIT + 1
    coeffs = np.arange(0, size, stride, dtype=np.int64)
    digits = (coeffs[:, None] // Kf.q ** np.arange(dim)[None, :]) % Kf.q
    grams = np.zeros((len(coeffs), n * n), dtype=np.int64)
    for t in range(dim):
        grams = _batch.add(Kf, grams, _batch.mul(Kf, digits[:, t, None], ns[t][None]))
    grams = grams.reshape(-1, n, n)
    ok = np.nonzero(_batch.ranks(Kf, grams) == n)[0]
    return FormSearch(BilinearForm(Kf, grams[ok[0]]) if len(ok) else None, dim, False)


def find_invariant_form(Q: Quasifield, K=None) -> BilinearForm | None:
    """An invariant non-degenerate symmetric K-bilinear form, or None if none exists.

    Raises TooLarge when the solution space could not be exhausted and the
    sample found nothing, so absence is only reported after a full scan.
    """
    res = invariant_form_search(Q, K)
    if res.form is None and not res.exhaustive:
        raise TooLarge(f"invariant form space of dimension {res.solution_dim} not exhausted")
    if res.form is not None:
        assert res.form.is_symmetric() and res.form.is_nondegenerate() and is_invariant_form(Q, res.form, K)
    return res.form


@dataclass
class KnarrReport:
    span: np.ndarray  # sorted element indices of the additive span
    proper: bool

    @property
    def size(self) -> int:
        return len(self.span)


def knarr_subgroup(Q: Quasifield) -> KnarrReport:
    """Additive span of all (x o y) o z - x o (z o y); proper iff it is not all of Q."""
    T = Q.table
    N = Q.order
    xy = T  # [x, y]
    lhs = T[xy[:, :, None], np.arange(N)[None, None, :]]  # (x o y) o z at [x, y, z]
    zy = T.T  # [y, z] -> z o y
    rhs = T[np.arange(N)[:, None, None], zy[None, :, :]]  # x o (z o y)
    gens = np.unique(Q.add_table[lhs, Q.neg_table[rhs]])
    span = np.zeros(1, dtype=np.int64)
    inside = np.zeros(N, dtype=bool)
    inside[0] = True
    for g in gens:
        if inside[g]:
            continue
        span = np.concatenate([Q.add_table[span, Q.scale(c, int(g))] for c in range(Q.p)])
        inside[span] = True
        if len(span) == N:
            break
    return KnarrReport(np.sort(span), len(span) < N)


# ---------------------------------------------------------------------------
# codes


def has_symmetric_equivalent(C: RankCode) -> RankCode | None:
    """A symmetric code equivalent to C, or None when none exists over C's field.

    C must be normalized (0, I in C, all differences invertible).  The code
    {R(a) G} for an invariant form G equals C Y with Y = G.
    """
    S = spreadset_from_code(C)
    Q = quasifield_from_code(C)
    K = C.field
    form = find_invariant_form(Q, K)
    if form is None:
        return None
    grams = _batch.matmul(K, S.mats, form.gram[None])
    out = RankCode(K, C.n, C.n, elements=grams)
    assert all(np.array_equal(g, g.T) for g in out.elements)
    return out


def congruence_representatives(F: FieldSpec, n: int) -> list[np.ndarray]:
    """One invertible symmetric matrix per congruence class S -> P S P^t."""
    G = _batch.gl_array(F, n)
    total = F.q ** (n * n)
    allm = _batch.unpack(F, np.arange(total, dtype=np.uint64), n, n)
    sym = allm[(allm == np.swapaxes(allm, 1, 2)).all(axis=(1, 2))]
    sym = sym[_batch.ranks(F, sym) == n]
    keys = _batch.pack(F, sym)
    left = np.ones(len(sym), dtype=bool)
    reps = []
    for i in range(len(sym)):
        if not left[i]:
            continue
        reps.append(sym[i])
        orbit = _batch.pack(F, _batch.matmul(F, _batch.matmul(F, G, sym[i][None]), np.swapaxes(G, 1, 2)))
        left[np.isin(keys, orbit)] = False
    return reps


def symmetric_spreadset_codes(F: FieldSpec, n: int) -> list[RankCode]:
    """Every F-linear symmetric code of n x n matrices with d = n and q^n elements
    that contains one of the congruence representatives (exhaustive DFS).

    Any symmetric linear code with d = n is congruent to one of these, so this
    list meets every equivalence class containing a symmetric code.
    """
    if F.q ** (n * (n + 1) // 2) > 1 << 16:
        raise TooLarge("symmetric matrix space too large")
    total = F.q ** (n * n)
    allm = _batch.unpack(F, np.arange(total, dtype=np.uint64), n, n)
    sym = allm[(allm == np.swapaxes(allm, 1, 2)).all(axis=(1, 2))]
    inv = sym[_batch.ranks(F, sym) == n]
    out: dict[bytes, RankCode] = {}

    def rec(span, cands):
        if len(span) == F.q**n:
            C = RankCode(F, n, n, elements=span)
            out.setdefault(C.keys.tobytes(), C)
            return
        for idx in range(len(cands)):
            N = cands[idx]
            new = np.concatenate([_batch.add(F, span, _batch.mul(F, np.int64(c), N)[None]) for c in range(1, F.q)])
            rest = cands[idx + 1 :]
            keep = np.ones(len(rest), dtype=bool)
            for S in new:
                alive = np.nonzero(keep)[0]
                keep[alive] = _batch.ranks(F, _batch.sub(F, rest[alive], S[None])) == n
            rec(np.concatenate([span, new]), rest[keep])

    for S0 in congruence_representatives(F, n):
        span = np.stack([_batch.mul(F, np.int64(c), S0) for c in range(F.q)])
        keep = np.ones(len(inv), dtype=bool)
        for S in span:
            keep &= _batch.ranks(F, _batch.sub(F, inv, S[None])) == n
        rec(span, inv[keep])
    return list(out.values())


__all__ = [
    "BilinearForm",
    "FormSearch",
    "KnarrReport",
    "trace_form",
    "scaled_form_family",
    "scaled_family_code",
    "dual_basis_matrix",
    "is_invariant_form",
    "invariance_witness",
    "is_invariant_matrix_criterion",
    "quasifield_forms",
    "symmetric_code",
    "invariant_form_search",
    "find_invariant_form",
    "knarr_subgroup",
    "has_symmetric_equivalent",
    "congruence_representatives",
    "symmetric_spreadset_codes",
]
