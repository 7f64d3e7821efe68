"""Code equivalence, semifield isotopy and isomorphism, canonical forms and the
small exhaustive classifications.

Search strategies:

* Square codes whose nonzero elements are all invertible (d = n) and contain 0:
  fix an invertible M0 in C.  Any X C Y = C' sends M0 to some M in C' \\ 0, so
  Y = M0^-1 X^-1 M.  The search is over X in GL(n) and M, with survivors
  filtered one codeword at a time.
* Other F-linear codes: for each X, the conditions X B_i Y in C' (B_i a basis
  of C) are the linear equations tr(X B_i Y D_j^t) = 0 in Y, with D_j a basis of
  the dual of C'.  Ranks are computed in one batch over all X and the few X with
  a nonzero solution space are enumerated.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field as dc_field
from typing import Iterator, Sequence

import numpy as np

from . import _batch
from .algebra import (
    Quasifield,
    SubStructure,
    is_field,
    kernel_subfield,
    quasifield_from_code,
    right_representation,
    vector_digits,
    vector_index,
)
from .code import (
    RankCode,
    dual,
    is_additively_closed,
    is_linear_over,
    rank_distribution,
)
from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    KNotInKernel,
    NoCommonKernel,
    NotLinear,
    ParameterMismatch,
    TooLarge,
)
from .gf import FieldSpec, gf, is_prime
from .matgf import MatGF, nullspace, span_enumerate

GL_LIMIT = 1 << 22


@functools.lru_cache(maxsize=16)
def _gl_pair(F: FieldSpec, n: int) -> tuple[np.ndarray, np.ndarray]:
    G = _batch.gl_array(F, n)
    Gi = _batch.inverse(F, G)
    Gi.setflags(write=False)
    return G, Gi


@functools.lru_cache(maxsize=16)
def stabilizer_e1(F: FieldSpec, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Invertible P with e1 P = e1 (first row e1), and their inverses."""
    G, Gi = _gl_pair(F, n)
    e1 = np.zeros(n, dtype=np.int64)
    e1[0] = 1
    mask = (G[:, 0, :] == e1).all(axis=1)
    return G[mask], Gi[mask]


# ---------------------------------------------------------------------------
# witnesses


@dataclass
class EquivalenceWitness:
    """A -> X (A^t if transposed)^sigma Y + Z, sigma = Frobenius exponent."""

    field: FieldSpec
    X: np.ndarray
    Y: np.ndarray
    sigma: int = 0
    transposed: bool = False
    Z: np.ndarray | None = None
    verified: bool = False

    def apply(self, A: np.ndarray) -> np.ndarray:
        F = self.field
        A = np.asarray(A)
        if self.transposed:
            A = np.swapaxes(A, -1, -2)
        A = _batch.frobenius(F, A, self.sigma)
        out = _batch.matmul(F, _batch.matmul(F, self.X, A), self.Y)
        if self.Z is not None:
            out = _batch.add(F, out, self.Z)
        return out

    def to_json(self) -> dict:
        out = {
            "X": self.X.tolist(),
            "Y": self.Y.tolist(),
            "sigma": self.sigma,
            "transposed": self.transposed,
            "Z": None if self.Z is None else self.Z.tolist(),
        }
        if self.verified:
            out["verified"] = True
        return out


def identity_witness(F: FieldSpec, m: int, n: int) -> EquivalenceWitness:
    return EquivalenceWitness(F, np.eye(m, dtype=np.int64), np.eye(n, dtype=np.int64))


def apply_isometry(w: EquivalenceWitness, C: RankCode) -> RankCode:
    if w.field != C.field:
        raise DimensionMismatch("witness and code live over different fields")
    m, n = (C.n, C.m) if w.transposed else (C.m, C.n)
    if w.X.shape != (m, m) or w.Y.shape != (n, n):
        raise DimensionMismatch(f"witness shapes {w.X.shape}, {w.Y.shape} do not fit {C.m}x{C.n}")
    return RankCode(C.field, m, n, elements=w.apply(C.elements))


def _verify(w: EquivalenceWitness, C: RankCode, C2: RankCode) -> EquivalenceWitness | None:
    if apply_isometry(w, C) == C2:
        w.verified = True
        return w
    return None


# ---------------------------------------------------------------------------
# core searches


def _is_dn(C: RankCode) -> bool:
    return C.m == C.n and len(C) > 1 and C.keys[0] == 0 and bool((C.ranks[1:] == C.n).all())


def dn_solutions(F: FieldSpec, elems: np.ndarray, C2: RankCode, targets=None) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """All (X, Y) with X C Y = C2, for square codes with 0 whose nonzero elements are invertible.

    ``elems`` are the elements of C (0 included).  ``targets`` optionally limits
    the images M of the first invertible element.
    """
    n = C2.n
    G, Gi = _gl_pair(F, n)
    keys = _batch.pack(F, elems)
    nz = elems[keys != 0]
    M0 = nz[0]
    M0i = _batch.inverse(F, M0[None])[0]
    rest = nz[1:]
    if targets is None:
        targets = C2.elements[C2.keys != 0]
    M0iGi = _batch.matmul(F, M0i[None], Gi)
    for M in targets:
        Y = _batch.matmul(F, M0iGi, M[None])
        alive = np.arange(len(G))
        for A in rest:
            img = _batch.matmul(F, _batch.matmul(F, G[alive], A[None]), Y[alive])
            alive = alive[C2.contains_keys(_batch.pack(F, img))]
            if not len(alive):
                break
        for i in alive:
            yield G[i], Y[i]


def _dual_basis(C: RankCode) -> np.ndarray:
    F = C.field
    B = C.linear_basis(F) if len(C) > 1 else np.zeros((0, C.m, C.n), dtype=np.int64)
    mn = C.m * C.n
    return nullspace(F, B.reshape(len(B), mn), ncols=mn).reshape(-1, C.m, C.n)


def linear_solutions(F: FieldSpec, B: np.ndarray, C2: RankCode, chunk: int = 4096) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """(X, Y) with X B_i Y in C2 for every basis matrix B_i and Y invertible."""
    m, n = C2.m, C2.n
    D = _dual_basis(C2)
    Gm = _batch.gl_array(F, m)
    Dt = np.swapaxes(D, 1, 2)  # (J, n, m)
    k, J = len(B), len(D)
    if J == 0:
        # C2 is the whole space: every pair works
        Y = np.eye(n, dtype=np.int64)
        for X in Gm:
            yield X, Y
        return
    for s in range(0, len(Gm), chunk):
        X = Gm[s : s + chunk]
        XB = _batch.matmul(F, X[:, None], B[None])  # (g, k, m, n)
        P = _batch.matmul(F, Dt[None, None], XB[:, :, None])  # (g, k, J, n, n)
        coeff = np.swapaxes(P, -1, -2).reshape(len(X), k * J, n * n)
        null = n * n - _batch.rank(F, coeff)
        for g in np.nonzero(null > 0)[0]:
            ns = nullspace(F, coeff[g])
            Ys = span_enumerate(F, ns).reshape(-1, n, n)
            Ys = Ys[_batch.ranks(F, Ys) == n]
            for Y in Ys:
                yield X[g], Y


def _branches(C: RankCode, C2: RankCode, sigmas: Sequence[int], transpose: bool):
    for t in ([False, True] if transpose and C.m == C.n else [False]):
        base = C.transpose() if t else C
        for s in sigmas:
            yield t, s, (base if s == 0 else RankCode(C.field, base.m, base.n, elements=_batch.frobenius(C.field, base.elements, s)))


def _search(C: RankCode, C2: RankCode, sigmas, transpose: bool) -> EquivalenceWitness | None:
    F = C.field
    for t, s, Cb in _branches(C, C2, sigmas, transpose):
        if _is_dn(Cb) and _is_dn(C2):
            sols = dn_solutions(F, Cb.elements, C2)
        elif is_linear_over(Cb, F) and is_linear_over(C2, F):
            sols = linear_solutions(F, Cb.linear_basis(F), C2)
        else:
            sols = _brute_solutions(F, Cb, C2)
        for X, Y in sols:
            w = _verify(EquivalenceWitness(F, X, Y, s, t), C, C2)
            if w is not None:
                return w
    return None


def _brute_solutions(F: FieldSpec, C: RankCode, C2: RankCode):
    Gm, Gn = _batch.gl_array(F, C.m), _batch.gl_array(F, C.n)
    if len(Gm) * len(Gn) * len(C) > 1 << 26:
        raise TooLarge("no structured search applies and brute force is too large")
    for X in Gm:
        XC = _batch.matmul(F, X[None], C.elements)
        imgs = _batch.matmul(F, XC[None], Gn[:, None])  # (|Gn|, |C|, m, n)
        ok = C2.contains_keys(_batch.pack(F, imgs)).all(axis=1)
        for j in np.nonzero(ok)[0]:
            yield X, Gn[j]


def automorphism_exponents(F: FieldSpec) -> list[int]:
    return list(range(F.e))


def are_equivalent(C: RankCode, C2: RankCode, mode: str = "linear", transpose: bool = True) -> EquivalenceWitness | None:
    """A verified isometry mapping C onto C2, or None when none exists.

    Modes: ``linear`` (sigma = id, Z = 0), ``semilinear`` (all sigma, Z = 0),
    ``additive`` (additively closed codes, all sigma, Z = 0) and ``general``
    (translations as well, for codes that are not additively closed).
    """
    F = C.field
    if F != C2.field or (C.m, C.n) != (C2.m, C2.n) and not (transpose and (C.m, C.n) == (C2.n, C2.m)):
        raise ParameterMismatch("codes live in different matrix spaces")
    if len(C) != len(C2):
        raise ParameterMismatch(f"|C| = {len(C)} but |C'| = {len(C2)}")
    if (C.m, C.n) != (C2.m, C2.n):
        w = are_equivalent(C.transpose(), C2, mode, transpose=False)
        if w is None:
            return None
        w.transposed = True
        return _verify(w, C, C2)
    if mode == "linear":
        if not (is_linear_over(C, F) and is_linear_over(C2, F)):
            raise NotLinear("linear mode needs F-linear codes")
        sigmas = [0]
    elif mode in ("semilinear", "additive"):
        if mode == "additive" and not (is_additively_closed(C) and is_additively_closed(C2)):
            raise NotLinear("additive mode needs additively closed codes")
        sigmas = automorphism_exponents(F)
    elif mode == "general":
        return _general_equivalence(C, C2, transpose)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if rank_distribution(C) != rank_distribution(C2):
        return None
    return _search(C, C2, sigmas, transpose)


def _general_equivalence(C: RankCode, C2: RankCode, transpose: bool) -> EquivalenceWitness | None:
    """Allow translations: fix B0 in C and try every image Z' in C2."""
    F = C.field
    B0 = MatGF._wrap(F, C.elements[0])
    C0 = C.translate(B0)
    for Zp in C2.elements:
        C2z = C2.translate(MatGF._wrap(F, Zp))
        if rank_distribution(C0) != rank_distribution(C2z):
            continue
        w = _search(C0, C2z, automorphism_exponents(F), transpose)
        if w is None:
            continue
        # A -> X (A - B0)' Y + Z'  ==  X A' Y + (Z' - X B0' Y)
        w.Z = _batch.sub(F, Zp, w.apply(B0.a))
        w.verified = False
        return _verify(w, C, C2)
    return None


# ---------------------------------------------------------------------------
# isotopy


@dataclass
class Isotopism:
    """aF o' bG = (a o b)H, maps given on element indices (and as matrices over K)."""

    F: np.ndarray
    G: np.ndarray
    H: np.ndarray
    matrices: tuple[np.ndarray, np.ndarray, np.ndarray]
    verified: bool = False


def check_isotopism(Q: Quasifield, Q2: Quasifield, F, G, H) -> bool:
    lhs = Q2.table[np.asarray(F)[:, None], np.asarray(G)[None, :]]
    rhs = np.asarray(H)[Q.table]
    return bool(np.array_equal(lhs, rhs))


def _common_field(Q: Quasifield, Q2: Quasifield, K) -> tuple[SubStructure, SubStructure]:
    try:
        return kernel_subfield(Q, K), kernel_subfield(Q2, K)
    except KNotInKernel as exc:
        raise NoCommonKernel(str(exc)) from None


def isotopisms(Q: Quasifield, Q2: Quasifield, K: FieldSpec | None = None) -> Iterator[Isotopism]:
    """All isotopisms over K, each verified exhaustively.

    They correspond to pairs (X, Y) with X C Y = C' (no transposition) whose
    induced map on first rows is K-linear: F = X^-1, H = Y.
    """
    if Q.order != Q2.order:
        return
    K1, K2 = _common_field(Q, Q2, K)
    R1, R2 = right_representation(Q, K1), right_representation(Q2, K2)
    Kf = K1.field
    C1, C2 = R1.code(), R2.code()
    if len(C1) != len(C2) or C1.n != C2.n:
        return
    n = C1.n
    V = vector_digits(Kf, n)
    vec_to_el1 = np.empty(len(V), dtype=np.int64)
    vec_to_el1[R1.to_vector] = np.arange(Q.order)
    vec_to_el2 = np.empty(len(V), dtype=np.int64)
    vec_to_el2[R2.to_vector] = np.arange(Q2.order)
    mats1 = R1.spreadset.mats
    for X, Y in dn_solutions(Kf, C1.elements, C2):
        imgs = _batch.matmul(Kf, _batch.matmul(Kf, X[None], mats1), Y[None])
        g_vec = vector_index(Kf, imgs[:, 0, :])  # w -> w~
        Gm = V[g_vec[vector_index(Kf, np.eye(n, dtype=np.int64))]]
        if not np.array_equal(vector_index(Kf, _batch.matmul(Kf, V, Gm)), g_vec):
            continue
        Xi = _batch.inverse(Kf, X[None])[0]
        f_vec = vector_index(Kf, _batch.matmul(Kf, V, Xi))
        h_vec = vector_index(Kf, _batch.matmul(Kf, V, Y))
        Fm = vec_to_el2[f_vec[R1.to_vector]]
        Gm_el = vec_to_el2[g_vec[R1.to_vector]]
        Hm = vec_to_el2[h_vec[R1.to_vector]]
        if check_isotopism(Q, Q2, Fm, Gm_el, Hm):
            yield Isotopism(Fm, Gm_el, Hm, (Xi, Gm, Y), verified=True)


def are_isotopic(Q: Quasifield, Q2: Quasifield, K: FieldSpec | None = None) -> Isotopism | None:
    return next(isotopisms(Q, Q2, K), None)


# ---------------------------------------------------------------------------
# isomorphism


def _prime_basis(Q: Quasifield) -> list[int]:
    span = np.zeros(1, dtype=np.int64)
    basis = []
    while len(span) < Q.order:
        inside = np.zeros(Q.order, dtype=bool)
        inside[span] = True
        b = Q.identity if not basis else int(np.argmax(~inside))
        basis.append(b)
        span = np.concatenate([Q.add_table[span, Q.scale(c, b)] for c in range(Q.p)])
    return basis


def are_isomorphic(Q: Quasifield, Q2: Quasifield) -> np.ndarray | None:
    """A bijection phi (as an index array) with phi(a o b) = phi(a) o' phi(b), or None.

    Isomorphisms are additive, hence GF(p)-linear; the search fixes e -> e' and
    extends basis images one at a time, pruning with the products that already
    fall inside the current span.
    """
    if Q.order != Q2.order or Q.p != Q2.p or Q.identity is None or Q2.identity is None:
        return None
    basis = _prime_basis(Q)
    p = Q.p

    def extend(dom, img, b, y):
        dparts, iparts = [dom], [img]
        for c in range(1, p):
            dparts.append(Q.add_table[dom, Q.scale(c, b)])
            iparts.append(Q2.add_table[img, Q2.scale(c, y)])
        return np.concatenate(dparts), np.concatenate(iparts)

    def consistent(dom, img) -> bool:
        phi = np.full(Q.order, -1, dtype=np.int64)
        phi[dom] = img
        prod = Q.table[dom[:, None], dom[None, :]]
        mapped = phi[prod]
        target = Q2.table[img[:, None], img[None, :]]
        inside = mapped >= 0
        if not np.array_equal(mapped[inside], target[inside]):
            return False
        in_img = np.zeros(Q2.order, dtype=bool)
        in_img[img] = True
        return not in_img[target[~inside]].any()

    def rec(i, dom, img):
        if i == len(basis):
            phi = np.empty(Q.order, dtype=np.int64)
            phi[dom] = img
            return phi if np.array_equal(phi[Q.table], Q2.table[phi[:, None], phi[None, :]]) else None
        used = np.zeros(Q2.order, dtype=bool)
        used[img] = True
        for y in np.nonzero(~used)[0]:
            d2, i2 = extend(dom, img, basis[i], int(y))
            if consistent(d2, i2):
                out = rec(i + 1, d2, i2)
                if out is not None:
                    return out
        return None

    dom0, img0 = extend(np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64), Q.identity, Q2.identity)
    if not consistent(dom0, img0):
        return None
    return rec(1, dom0, img0)


# ---------------------------------------------------------------------------
# semifield enumeration


def _first_row_candidates(F: FieldSpec, n: int, i: int) -> np.ndarray:
    """All n x n matrices with first row e_i, in key order."""
    rest = _batch.unpack(F, np.arange(F.q ** (n * (n - 1)), dtype=np.uint64), n - 1, n)
    top = np.zeros((len(rest), 1, n), dtype=np.int64)
    top[:, 0, i] = 1
    return np.concatenate([top, rest], axis=1)


def _all_invertible_against(F: FieldSpec, cands: np.ndarray, span: np.ndarray) -> np.ndarray:
    """Mask of candidates M with M - S invertible for every S in span."""
    n = cands.shape[-1]
    ok = np.ones(len(cands), dtype=bool)
    for S in span:
        alive = np.nonzero(ok)[0]
        if not len(alive):
            break
        ok[alive] = _batch.ranks(F, _batch.sub(F, cands[alive], S[None])) == n
    return ok


@dataclass
class SpreadsetSearch:
    """Raw additive spreadsets (bases R(e_2), ..., R(e_n)) found by the DFS."""

    field: FieldSpec
    n: int
    bases: list[np.ndarray]
    nodes: int
    complete: bool = True
    resume_token: tuple[int, ...] | None = None


def search_additive_spreadsets(
    F: FieldSpec, n: int, budget: int | None = None, resume: Sequence[int] | None = None
) -> SpreadsetSearch:
    """DFS over R(e_2), ..., R(e_n) (R(e_1) = I) with every nonzero combination invertible.

    Forward checking: after each choice the candidate lists of the remaining
    levels are filtered against the new span elements.  ``budget`` caps the
    number of visited nodes; the resume token is the path of the first
    unvisited node.
    """
    if F.q ** (n * (n - 1)) > GL_LIMIT:
        raise TooLarge(f"{F.q ** (n * (n - 1))} candidates per level")
    I = np.eye(n, dtype=np.int64)
    span = np.stack([_batch.mul(F, np.int64(c), I) for c in range(F.q)])
    lists = []
    for i in range(1, n):
        c = _first_row_candidates(F, n, i)
        lists.append(c[_all_invertible_against(F, c, span)])
    out: list[np.ndarray] = []
    nodes = 0
    resume = list(resume) if resume else []

    class _Stop(Exception):
        def __init__(self, path):
            self.path = path

    def rec(level, span, lists, chosen, path):
        nonlocal nodes
        if level == n - 1:
            out.append(np.stack(chosen) if chosen else np.zeros((0, n, n), dtype=np.int64))
            return
        L = lists[0]
        start = resume.pop(0) if resume else 0
        for idx in range(start, len(L)):
            if budget is not None and nodes >= budget:
                raise _Stop(tuple(path + [idx]))
            nodes += 1
            N = L[idx]
            new = np.concatenate([_batch.add(F, span, _batch.mul(F, np.int64(c), N)[None]) for c in range(1, F.q)])
            nxt = []
            for M in lists[1:]:
                nxt.append(M[_all_invertible_against(F, M, new)])
                if not len(nxt[-1]):
                    break
            else:
                rec(level + 1, np.concatenate([span, new]), nxt, chosen + [N], path + [idx])

    try:
        rec(0, span, lists, [], [])
    except _Stop as stop:
        return SpreadsetSearch(F, n, out, nodes, complete=False, resume_token=stop.path)
    return SpreadsetSearch(F, n, out, nodes)


def code_from_basis(F: FieldSpec, basis: np.ndarray) -> RankCode:
    n = basis.shape[-1] if len(basis) else 1
    full = np.concatenate([np.eye(n, dtype=np.int64)[None], basis]) if len(basis) else np.eye(n, dtype=np.int64)[None]
    return RankCode(F, n, n, elements=span_enumerate(F, full))


@dataclass
class IsoClass:
    code: RankCode  # lexicographically least spreadset code in the orbit
    quasifield: Quasifield
    orbit_size: int
    aut_order: int
    is_field: bool
    isotopy_class: int = -1


@dataclass
class SemifieldCensus:
    p: int
    n: int
    raw_count: int
    classes: list[IsoClass]
    isotopy_classes: list[list[int]] = dc_field(default_factory=list)

    @property
    def proper(self) -> list[IsoClass]:
        return [c for c in self.classes if not c.is_field]

    def isotopy_representatives(self) -> list[IsoClass]:
        return [self.classes[g[0]] for g in self.isotopy_classes]

    @property
    def proper_isotopy_count(self) -> int:
        return sum(1 for g in self.isotopy_classes if not self.classes[g[0]].is_field)


def _sorted_keys(F: FieldSpec, stack: np.ndarray) -> np.ndarray:
    return np.sort(_batch.pack(F, stack), axis=-1)


def _lexmin_rows(rows: np.ndarray) -> np.ndarray:
    order = np.lexsort(rows.T[::-1])
    return rows[order[0]]


def conjugation_orbit(F: FieldSpec, elems: np.ndarray) -> np.ndarray:
    """Distinct sorted key rows of P^-1 C P for P fixing e1."""
    P, Pi = stabilizer_e1(F, elems.shape[-1])
    conj = _batch.matmul(F, _batch.matmul(F, Pi[:, None], elems[None]), P[:, None])
    return np.unique(_sorted_keys(F, conj), axis=0)


def enumerate_semifields(p: int, n: int, budget: int | None = None, resume=None, isotopy: bool = True) -> SemifieldCensus:
    """Semifields of order p^n with identity e1, grouped by isomorphism and isotopy.

    With a budget the search raises BudgetExceeded carrying the partial
    SpreadsetSearch; passing that object back as ``resume`` continues the run
    and gives the same census as an uninterrupted one.

    Isomorphisms between two such structures are the conjugations C -> P^-1 C P
    of their spreadset codes by P in GL(n, p) with e1 P = e1, so isomorphism
    classes are conjugation orbits.
    """
    if not is_prime(p):
        raise ParameterMismatch("p must be prime")
    if p**n > 128:
        raise TooLarge("orders above 128 are out of range")
    F = gf(p)
    prior: list[np.ndarray] = []
    if isinstance(resume, SpreadsetSearch):
        prior, resume = list(resume.bases), resume.resume_token
    res = search_additive_spreadsets(F, n, budget=budget, resume=resume)
    res.bases = prior + res.bases
    if not res.complete:
        raise BudgetExceeded("semifield search budget exhausted", partial=res, resume_token=res.resume_token)
    codes = [code_from_basis(F, b) for b in res.bases]
    index = {c.keys.tobytes(): i for i, c in enumerate(codes)}
    seen = np.zeros(len(codes), dtype=bool)
    stab = len(stabilizer_e1(F, n)[0])
    classes = []
    for i, C in enumerate(codes):
        if seen[i]:
            continue
        orbit = conjugation_orbit(F, C.elements)
        for row in orbit:
            j = index.get(row.astype(np.uint64).tobytes())
            if j is None:
                raise AssertionError("conjugate spreadset missing from the raw search")
            seen[j] = True
        rep_keys = _lexmin_rows(orbit)
        rep = codes[index[rep_keys.astype(np.uint64).tobytes()]]
        Q = quasifield_from_code(rep)
        classes.append(IsoClass(rep, Q, len(orbit), stab // len(orbit), is_field(Q)))
    classes.sort(key=lambda c: (not c.is_field, c.code.keys.tolist()))
    census = SemifieldCensus(p, n, len(codes), classes)
    if isotopy:
        census.isotopy_classes = group_by_isotopy([c.quasifield for c in classes])
        for g, members in enumerate(census.isotopy_classes):
            for i in members:
                classes[i].isotopy_class = g
    return census


def group_by_isotopy(structures: Sequence[Quasifield], K: FieldSpec | None = None) -> list[list[int]]:
    """Partition by isotopy, testing each structure against one member per class."""
    groups: list[list[int]] = []
    for i, Q in enumerate(structures):
        for g in groups:
            if are_isotopic(structures[g[0]], Q, K) is not None:
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


# ---------------------------------------------------------------------------
# code classification


@dataclass
class CodeClass:
    code: RankCode
    label: str
    members: list[str] = dc_field(default_factory=list)


def _merge_by_equivalence(reps: list[tuple[str, RankCode]], mode: str) -> list[CodeClass]:
    out: list[CodeClass] = []
    for label, C in reps:
        for cls in out:
            if are_equivalent(cls.code, C, mode) is not None:
                cls.members.append(label)
                break
        else:
            out.append(CodeClass(C, label, [label]))
    return out


def classify_codes(q: int, n: int, d: int, mode: str = "linear", budget: int | None = None, resume=None) -> list[CodeClass]:
    """Equivalence classes of MRD codes in (F_q)_{n,n} with minimum distance d.

    * d = n: codes normalized to contain I are spreadsets; for additively closed
      (or linear, q prime) codes these are semifield spreadsets, so the classes
      come from the semifield isotopy classes merged under equivalence with
      transposition.
    * d = 2, linear: Delsarte duality under tr(AB^t) is a bijection between
      linear MRD codes with d = 2 and with d = n, and it commutes with
      equivalence ((X C Y)^perp = X^-t C^perp Y^-t, (C^t)^perp = (C^perp)^t),
      so the classes are the duals of the d = n classes.
    * anything else small enough: direct augmentation (``augment_classify``).
    """
    if mode not in ("linear", "additive"):
        raise ParameterMismatch("classification supports linear and additive modes")
    F = gf(q)
    if d == n:
        if not is_prime(q):
            raise ParameterMismatch("d = n classification needs a prime field")
        census = enumerate_semifields(q, n, budget=budget, resume=resume)
        reps = []
        for g, members in enumerate(census.isotopy_classes):
            rep = census.classes[members[0]]
            tag = "field" if rep.is_field else f"semifield-isotopy-{g}"
            reps.append((tag, rep.code))
        return _merge_by_equivalence(reps, "linear")
    if d == 2 and n > 2 and mode == "linear":
        base = classify_codes(q, n, n, "linear", budget=budget, resume=resume)
        return [CodeClass(dual(c.code), f"dual of {c.label}", [f"dual of {m}" for m in c.members]) for c in base]
    return augment_classify(F, n, n, d)


AUGMENT_GROUP_LIMIT = 1 << 17


def _unique_rows(rows: np.ndarray) -> np.ndarray:
    rows = np.ascontiguousarray(rows)
    view = rows.view(np.dtype((np.void, rows.dtype.itemsize * rows.shape[1]))).ravel()
    _, idx = np.unique(view, return_index=True)
    return rows[np.sort(idx)]


def subspace_orbit(F: FieldSpec, elems: np.ndarray, transpose: bool = True, chunk_limit: int = 1 << 22) -> np.ndarray:
    """Distinct sorted key rows of X U Y (and X U^t Y) over GL(m) x GL(n)."""
    m, n = elems.shape[-2:]
    Gm, Gn = _batch.gl_array(F, m), _batch.gl_array(F, n)
    step = max(1, chunk_limit // (len(Gn) * len(elems) * m * n))
    rows = []
    for U in ([elems, np.swapaxes(elems, -1, -2)] if transpose and m == n else [elems]):
        XU = _batch.matmul(F, Gm[:, None], U[None])  # (|Gm|, |U|, m, n)
        for s in range(0, len(Gm), step):
            imgs = _batch.matmul(F, XU[s : s + step, None], Gn[None, :, None])
            rows.append(_unique_rows(_sorted_keys(F, imgs).reshape(-1, len(elems))))
    return _unique_rows(np.concatenate(rows))


def augment_classify(F: FieldSpec, m: int, n: int, d: int) -> list[CodeClass]:
    """Linear MRD codes with minimum distance d, built one basis matrix at a time.

    Each level keeps one representative per equivalence class of subspaces whose
    nonzero elements have rank >= d.  Extensions U + <W> of the representatives
    are tested against the orbits already found; a new extension becomes a
    representative and its whole GL x GL (and transpose) orbit is marked.
    """
    k_target = n - d + 1 if m >= n else m - d + 1
    dim_target = k_target * max(m, n)
    total = F.q ** (m * n)
    if total > 1 << 16:
        raise TooLarge("direct augmentation is limited to q^(mn) <= 2^16")
    if len(_batch.gl_array(F, m)) * len(_batch.gl_array(F, n)) > AUGMENT_GROUP_LIMIT:
        raise TooLarge("GL(m) x GL(n) too large for orbit marking")
    allm = _batch.unpack(F, np.arange(total, dtype=np.uint64), m, n)
    good = _batch.ranks(F, allm) >= d
    good[0] = True
    level = [np.zeros((0, m, n), dtype=np.int64)]
    for _ in range(dim_target):
        seen: set[bytes] = set()
        reps: list[np.ndarray] = []
        for U in level:
            span = span_enumerate(F, U) if len(U) else np.zeros((1, m, n), dtype=np.int64)
            used = np.zeros(total, dtype=bool)
            used[_batch.pack(F, span).astype(np.int64)] = True
            for w in range(1, total):
                if used[w] or not good[w]:
                    continue
                W = allm[w]
                fam = np.concatenate([_batch.add(F, span, _batch.mul(F, np.int64(c), W)[None]) for c in range(1, F.q)])
                fk = _batch.pack(F, fam).astype(np.int64)
                used[fk] = True
                if not good[fk].all():
                    continue
                ext = np.concatenate([span, fam])
                key = np.sort(_batch.pack(F, ext)).tobytes()
                if key in seen:
                    continue
                seen.update(row.tobytes() for row in subspace_orbit(F, ext))
                reps.append(np.concatenate([U, W[None]]))
        level = reps
        if not level:
            return []
    return [CodeClass(RankCode(F, m, n, basis=b), f"class-{i}") for i, b in enumerate(level)]


# ---------------------------------------------------------------------------
# canonical forms


CANON_WORK_LIMIT = 1 << 27


def _least_invertible(F: FieldSpec, n: int) -> np.ndarray:
    J = np.zeros((n, n), dtype=np.int64)
    J[np.arange(n), n - 1 - np.arange(n)] = 1
    return J


def canonical_form(C: RankCode, transpose: bool = True, semilinear: bool = False) -> RankCode:
    """Lexicographically least code (sorted key order) in the equivalence orbit.

    For square codes with all nonzero elements invertible the least element after
    0 must be the anti-diagonal J, so only X = J Y^-1 M^-1 (M in C \\ 0, Y in GL)
    need to be tried.  Translations are included when C is not additively closed.
    Other codes are handled by brute force over GL x GL when that is small.
    """
    F = C.field
    additive = is_additively_closed(C)
    translates = [C] if additive else [C.translate(MatGF._wrap(F, B)) for B in C.elements]
    sigmas = automorphism_exponents(F) if semilinear else [0]
    best = None
    for T in translates:
        for t, s, Cb in _branches(T, T, sigmas, transpose):
            rows = _canonical_candidates(F, Cb)
            cand = _lexmin_rows(rows)
            if best is None or _lex_less(cand, best):
                best = cand
    return RankCode(F, C.m, C.n, elements=_batch.unpack(F, best, C.m, C.n))


def _lex_less(a: np.ndarray, b: np.ndarray) -> bool:
    diff = np.nonzero(a != b)[0]
    return bool(len(diff) and a[diff[0]] < b[diff[0]])


def _canonical_candidates(F: FieldSpec, C: RankCode) -> np.ndarray:
    m, n = C.m, C.n
    if _is_dn(C):
        G, Gi = _gl_pair(F, n)
        if len(G) * len(C) * (len(C) - 1) > CANON_WORK_LIMIT:
            raise TooLarge("orbit enumeration too large for a canonical form")
        J = _least_invertible(F, n)
        nz = C.elements[C.keys != 0]
        nzi = _batch.inverse(F, nz)
        best_rows = []
        for Mi in nzi:
            X = _batch.matmul(F, _batch.matmul(F, J[None], Gi), Mi[None])  # J Y^-1 M^-1
            imgs = _batch.matmul(F, _batch.matmul(F, X[:, None], C.elements[None]), G[:, None])
            rows = _sorted_keys(F, imgs)
            best_rows.append(_lexmin_rows(rows))
        return np.stack(best_rows)
    Gm, Gn = _batch.gl_array(F, m), _batch.gl_array(F, n)
    if len(Gm) * len(Gn) * len(C) > CANON_WORK_LIMIT:
        raise TooLarge("orbit enumeration too large for a canonical form")
    best_rows = []
    for X in Gm:
        imgs = _batch.matmul(F, _batch.matmul(F, X[None, None], C.elements[None]), Gn[:, None])
        best_rows.append(_lexmin_rows(_sorted_keys(F, imgs)))
    return np.stack(best_rows)


def random_witness(F: FieldSpec, m: int, n: int, rng: np.random.Generator, transposed=False, sigma=0, translate=False) -> EquivalenceWitness:
    def rand_gl(k):
        while True:
            A = rng.integers(0, F.q, size=(k, k))
            if _batch.rank(F, A) == k:
                return A.astype(np.int64)

    mm, nn = (n, m) if transposed else (m, n)
    Z = rng.integers(0, F.q, size=(mm, nn)).astype(np.int64) if translate else None
    return EquivalenceWitness(F, rand_gl(mm), rand_gl(nn), sigma, transposed, Z)


__all__ = [
    "EquivalenceWitness",
    "Isotopism",
    "SemifieldCensus",
    "IsoClass",
    "CodeClass",
    "apply_isometry",
    "are_equivalent",
    "are_isotopic",
    "are_isomorphic",
    "isotopisms",
    "enumerate_semifields",
    "classify_codes",
    "augment_classify",
    "canonical_form",
    "search_additive_spreadsets",
    "random_witness",
    "group_by_isotopy",
]

