"""Concrete structures: Dickson nearfields, the SL(2,5) nearfield over GF(11),
the semifields of order 27, and the embedded fixture matrices."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import _batch
from .algebra import (
    Quasifield,
    check_quasifield,
    frobenius_type_automorphism,
    is_nearfield,
    quasifield_from_code,
)
from .code import RankCode, is_mrd
from .errors import ConditionsViolated, UnknownFixture
from .gf import fq_make, gf, prime_factors, primitive_element
from .matgf import MatGF, mat_order

FIXTURE_VERSION = 1

_CODE2 = [
    [[1, 1, 1, 0], [0, 1, 0, 1], [1, 1, 0, 1], [0, 1, 0, 0]],
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
    [[1, 0, 1, 0], [1, 0, 0, 1], [1, 1, 0, 0], [0, 1, 1, 1]],
    [[0, 1, 1, 0], [0, 0, 0, 1], [1, 1, 1, 1], [0, 1, 0, 1]],
    [[1, 1, 0, 1], [1, 1, 1, 1], [0, 1, 1, 0], [1, 0, 0, 0]],
    [[1, 0, 0, 1], [0, 0, 1, 1], [0, 1, 1, 1], [1, 0, 1, 1]],
    [[0, 0, 1, 1], [1, 0, 1, 0], [1, 0, 1, 1], [1, 1, 0, 0]],
    [[0, 0, 1, 0], [1, 1, 0, 1], [1, 1, 1, 0], [0, 1, 1, 0]],
    [[0, 1, 0, 1], [1, 0, 1, 1], [0, 1, 0, 0], [1, 0, 0, 1]],
    [[1, 1, 1, 1], [0, 0, 1, 0], [1, 0, 0, 0], [1, 1, 1, 0]],
    [[1, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 1], [0, 0, 1, 0]],
    [[0, 1, 0, 0], [1, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 1]],
    [[1, 0, 1, 1], [1, 1, 1, 0], [1, 0, 0, 1], [1, 1, 0, 1]],
    [[0, 0, 0, 1], [0, 1, 1, 1], [0, 1, 0, 1], [1, 0, 1, 0]],
    [[0, 1, 1, 1], [0, 1, 1, 0], [1, 0, 1, 0], [1, 1, 1, 1]],
]

_CODE3 = [
    [[0, 1, 1, 1], [1, 1, 0, 0], [0, 1, 1, 0], [0, 1, 0, 0]],
    [[1, 1, 1, 0], [1, 1, 0, 1], [1, 1, 0, 0], [1, 0, 1, 0]],
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
    [[1, 0, 0, 1], [0, 0, 0, 1], [1, 0, 1, 0], [1, 1, 1, 0]],
    [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 1, 0, 0]],
    [[1, 1, 0, 1], [0, 0, 1, 1], [1, 0, 1, 1], [0, 0, 1, 0]],
    [[0, 1, 1, 0], [1, 0, 0, 1], [1, 1, 1, 0], [1, 0, 1, 1]],
    [[0, 0, 1, 0], [1, 0, 1, 1], [1, 1, 1, 1], [0, 1, 1, 1]],
    [[1, 0, 1, 0], [1, 1, 1, 1], [1, 1, 0, 1], [0, 1, 1, 0]],
    [[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 1], [1, 1, 0, 1]],
    [[1, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 0, 1]],
    [[0, 0, 0, 1], [0, 1, 0, 1], [1, 0, 0, 0], [1, 1, 1, 1]],
    [[0, 1, 0, 1], [0, 1, 1, 1], [1, 0, 0, 1], [0, 0, 1, 1]],
    [[1, 1, 1, 1], [1, 0, 0, 0], [0, 1, 0, 0], [0, 1, 0, 1]],
    [[0, 0, 1, 0], [1, 1, 1, 0], [0, 1, 1, 1], [1, 0, 0, 0]],
]

# Entry (0, 3) of the last matrix above is 0 in the source listing, which repeats
# the first row of another codeword.  Seven different pair sums of the other
# codewords all produce the same matrix with that entry equal to 1, so the
# corrected value is used unless raw=True.
_CODE3_CORRECTION = (14, 0, 3, 1)

# Gabidulin-class basis over GF(3)
_G_BASIS = [
    [[1, 0, 0], [0, 0, 0], [0, 1, 0]],
    [[0, 1, 0], [0, 0, 0], [1, 2, 1]],
    [[0, 0, 1], [0, 0, 0], [0, 1, 2]],
    [[0, 0, 0], [1, 0, 0], [0, 0, 2]],
    [[0, 0, 0], [0, 1, 0], [0, 2, 1]],
    [[0, 0, 0], [0, 0, 1], [2, 1, 0]],
]

# basis of the second class over GF(3)
_C_BASIS = [
    [[1, 0, 0], [0, 0, 0], [1, 1, 0]],
    [[0, 1, 0], [0, 0, 0], [0, 0, 2]],
    [[0, 0, 1], [0, 0, 0], [2, 0, 2]],
    [[0, 0, 0], [1, 0, 0], [1, 2, 1]],
    [[0, 0, 0], [0, 1, 0], [2, 2, 1]],
    [[0, 0, 0], [0, 0, 1], [1, 2, 2]],
]

# generators of the SL(2,5) nearfield group, as printed (signed) and reduced mod 11
_SL25_SIGNED = [[[0, -1], [1, 0]], [[2, 4], [1, -3]]]

FIXTURE_NAMES = ("code2", "code3", "sec6_G_basis", "sec6_C_basis", "sl25_generators")


def fixture(name: str, raw: bool = False):
    """Embedded matrices: RankCode for code2/code3 (zero matrix added),
    list of MatGF for the bases and generators.

    ``raw=True`` returns code3 without the single-entry correction.
    """
    if name in ("code2", "code3"):
        F = gf(2)
        mats = np.array(_CODE2 if name == "code2" else _CODE3, dtype=np.int64)
        if name == "code3" and not raw:
            k, i, j, v = _CODE3_CORRECTION
            mats[k, i, j] = v
        return RankCode(F, 4, 4, elements=np.concatenate([np.zeros((1, 4, 4), dtype=np.int64), mats]))
    if name in ("sec6_G_basis", "sec6_C_basis"):
        F = gf(3)
        return [MatGF(F, m) for m in (_G_BASIS if name == "sec6_G_basis" else _C_BASIS)]
    if name == "sl25_generators":
        F = gf(11)
        return [MatGF(F, (np.array(m) % 11).tolist()) for m in _SL25_SIGNED]
    raise UnknownFixture(name)


def fixture_code(name: str) -> RankCode:
    """Fixture as a code; the bases are spanned, the generators closed to Q u {0}."""
    if name in ("code2", "code3"):
        return fixture(name)
    if name in ("sec6_G_basis", "sec6_C_basis"):
        mats = fixture(name)
        return RankCode(mats[0].field, 3, 3, basis=[m.a for m in mats])
    if name == "sl25_generators":
        return exceptional_nearfield_gl2_11().code
    raise UnknownFixture(name)


# ---------------------------------------------------------------------------
# Dickson nearfields


def dickson_conditions(q: int, n: int) -> list[str]:
    """Reasons why N(n, q) does not exist (empty when it does)."""
    bad = [f"prime {r} divides n={n} but not q-1={q - 1}" for r in prime_factors(n) if (q - 1) % r]
    if q % 4 == 3 and n % 4 == 0:
        bad.append(f"q = {q} is 3 mod 4 and 4 divides n = {n}")
    return bad


def dickson_exponents(q: int, n: int) -> list[int]:
    """For each residue i mod n, the j in 0..n-1 with (q^j - 1)/(q - 1) = i mod n."""
    out = [-1] * n
    for j in range(n):
        r = ((q**j - 1) // (q - 1)) % n
        if out[r] == -1:
            out[r] = j
    if -1 in out:
        raise ConditionsViolated(f"(q^j - 1)/(q - 1) mod {n} does not hit every residue for q={q}")
    return out


def dickson_nearfield(q: int, n: int) -> Quasifield:
    """N(n, q) on GF(q^n): for y = w^i (w primitive), x o y = x^(q^j) y where
    (q^j - 1)/(q - 1) = i (mod n)."""
    bad = dickson_conditions(q, n)
    if bad:
        raise ConditionsViolated("; ".join(bad))
    K = gf(q)
    E = fq_make(K.p, K.e * n)
    if n == 1:
        return Quasifield.from_field(E)
    js = dickson_exponents(q, n)
    w = primitive_element(E).index
    exp_of = np.zeros(E.q, dtype=np.int64)
    y = 1
    for i in range(E.q - 1):
        exp_of[y] = i
        y = E.mul(y, w)
    frob = [np.array([E.pow(x, q**j) for x in range(E.q)], dtype=np.int64) for j in range(n)]
    table = np.zeros((E.q, E.q), dtype=np.int64)
    for yv in range(1, E.q):
        j = js[exp_of[yv] % n]
        table[:, yv] = E.mul_table[frob[j], yv]
    return Quasifield(E.p, E.e, table, identity=1)


# ---------------------------------------------------------------------------
# the SL(2,5) nearfield over GF(11)


@dataclass
class NearfieldGroup:
    group: np.ndarray  # (120, 2, 2) sorted by key
    code: RankCode  # group with 0
    quasifield: Quasifield
    order_counts: dict[int, int]


def close_group(F, gens: list[np.ndarray]) -> np.ndarray:
    """All products of the generators (breadth-first closure), sorted by key."""
    n = gens[0].shape[0]
    ident = np.eye(n, dtype=np.int64)
    seen = {int(_batch.pack(F, ident)): ident}
    frontier = [ident]
    G = np.stack(gens)
    while frontier:
        fr = np.stack(frontier)
        prods = _batch.matmul(F, fr[:, None], G[None]).reshape(-1, n, n)
        keys = _batch.pack(F, prods)
        frontier = []
        for k, M in zip(keys.tolist(), prods):
            if k not in seen:
                seen[k] = M
                frontier.append(M)
    return np.stack([seen[k] for k in sorted(seen)])


def element_orders(F, group: np.ndarray) -> list[int]:
    return [mat_order(MatGF._wrap(F, g)) for g in group]


def sl2_5() -> np.ndarray:
    """SL(2,5) as 2x2 matrices over GF(5), sorted by key."""
    F = gf(5)
    M = _batch.unpack(F, np.arange(5**4, dtype=np.uint64), 2, 2)
    det = (M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0]) % 5
    return M[det == 1]


def find_group_isomorphism(F1, G1: np.ndarray, gens1: list[np.ndarray], F2, G2: np.ndarray):
    """Images (g1, g2) in G2 of gens1 extending to an isomorphism G1 -> G2, or None.

    Candidates are pairs with the same element orders; a pair is accepted when the
    word-map it induces is well defined and bijective.
    """
    ords1 = [mat_order(MatGF._wrap(F1, g)) for g in gens1]
    ords2 = np.array(element_orders(F2, G2))
    keys1 = {k: i for i, k in enumerate(_batch.pack(F1, G1).tolist())}
    keys2 = {k: i for i, k in enumerate(_batch.pack(F2, G2).tolist())}
    cand = [np.nonzero(ords2 == o)[0] for o in ords1]
    for i in cand[0]:
        for j in cand[1]:
            phi = _extend(F1, G1, gens1, keys1, F2, G2, [G2[i], G2[j]], keys2)
            if phi is not None:
                return phi
    return None


def _extend(F1, G1, gens1, keys1, F2, G2, imgs, keys2):
    n1, n2 = G1.shape[1], G2.shape[1]
    phi = {keys1[int(_batch.pack(F1, np.eye(n1, dtype=np.int64)))]: keys2[int(_batch.pack(F2, np.eye(n2, dtype=np.int64)))]}
    frontier = list(phi.items())
    while frontier:
        nxt = []
        for a, b in frontier:
            for g, h in zip(gens1, imgs):
                a2 = keys1[int(_batch.pack(F1, _batch.matmul(F1, G1[a], g)))]
                b2 = keys2.get(int(_batch.pack(F2, _batch.matmul(F2, G2[b], h))))
                if b2 is None:
                    return None
                if a2 in phi:
                    if phi[a2] != b2:
                        return None
                else:
                    phi[a2] = b2
                    nxt.append((a2, b2))
        frontier = nxt
    if len(phi) != len(G1) or len(set(phi.values())) != len(G2):
        return None
    # homomorphism on all pairs
    for a in range(len(G1)):
        prods = _batch.matmul(F1, G1[a][None], G1)
        pk = _batch.pack(F1, prods)
        img_prod = _batch.matmul(F2, G2[phi[a]][None], G2[[phi[b] for b in range(len(G1))]])
        ik = _batch.pack(F2, img_prod)
        for k1, k2 in zip(pk.tolist(), ik.tolist()):
            if phi[keys1[k1]] != keys2[k2]:
                return None
    return phi


def exceptional_nearfield_gl2_11(check_isomorphism: bool = True) -> NearfieldGroup:
    F = gf(11)
    A, B = (m.a for m in fixture("sl25_generators"))
    Q = close_group(F, [A, B])
    assert len(Q) == 120, len(Q)
    orders = Counter(element_orders(F, Q))
    assert set(orders) == {1, 2, 3, 4, 5, 6, 10}, orders
    # regular action on nonzero vectors: e1 Q hits each nonzero vector once
    images = Q[:, 0, :]
    assert len({tuple(r) for r in images.tolist()}) == 120 and not (images == 0).all(axis=1).any()
    if check_isomorphism:
        assert find_group_isomorphism(F, Q, [A, B], gf(5), sl2_5()) is not None
    code = RankCode(F, 2, 2, elements=np.concatenate([np.zeros((1, 2, 2), dtype=np.int64), Q]))
    assert is_mrd(code).is_mrd
    assert mat_order(MatGF._wrap(F, (A + np.eye(2, dtype=np.int64)) % 11)) == 40
    Qf = quasifield_from_code(code)
    assert is_nearfield(Qf) and check_quasifield(Qf)
    return NearfieldGroup(Q, code, Qf, dict(sorted(orders.items())))


def is_abelian(F, group: np.ndarray) -> bool:
    ab = _batch.matmul(F, group[:, None], group[None])
    ba = _batch.matmul(F, group[None], group[:, None])
    return bool((ab == ba).all())


# ---------------------------------------------------------------------------
# semifields of order 27


def semifields_order_27():
    """GF(27) and a proper semifield of order 27 with a Frobenius-type automorphism.

    All proper semifields of order 27 are isotopic; the representative is the
    first isomorphism class (in census order) admitting an automorphism that
    is the field Frobenius x -> x^3 under an additive identification with GF(27).
    """
    from .classify import enumerate_semifields

    census = enumerate_semifields(3, 3)
    fields = [c.quasifield for c in census.classes if c.is_field]
    proper = [c.quasifield for c in census.classes if not c.is_field]
    assert len(fields) == 1 and census.proper_isotopy_count == 1
    for Q in proper:
        if frobenius_type_automorphism(Q) is not None:
            return [fields[0], Q]
    raise AssertionError("no proper semifield of order 27 with a Frobenius-type automorphism")
