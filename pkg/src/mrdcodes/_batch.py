"""Vectorized kernels on stacks of matrices over a finite field.

Arrays hold element indices (int64) with shape (..., m, n).  Prime fields use
plain modular arithmetic; extension fields go through the field's tables.
"""

from __future__ import annotations

import functools

import numpy as np

from .errors import TooLarge
from .gf import FieldSpec

# rank lookup tables are built for shapes with at most this many matrices
RANK_TABLE_LIMIT = 1 << 17
KEY_LIMIT = 1 << 64


def add(F: FieldSpec, A, B):
    if F.e == 1:
        return (A + B) % F.p
    return F.add_table[A, B]


def sub(F: FieldSpec, A, B):
    if F.e == 1:
        return (A - B) % F.p
    return F.sub_table[A, B]


def neg(F: FieldSpec, A):
    if F.e == 1:
        return (-A) % F.p
    return F.neg_table[A]


def mul(F: FieldSpec, A, B):
    if F.e == 1:
        return (A * B) % F.p
    return F.mul_table[A, B]


def inv(F: FieldSpec, A):
    if F.e == 1:
        return _prime_inv(F.p)[A]
    return F.inv_table[A]


@functools.lru_cache(maxsize=None)
def _prime_inv(p: int) -> np.ndarray:
    out = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        out[a] = pow(a, -1, p)
    return out


def matmul(F: FieldSpec, A, B):
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if F.e == 1:
        return (A @ B) % F.p
    k = A.shape[-1]
    out = None
    for t in range(k):
        term = F.mul_table[A[..., :, t, None], B[..., None, t, :]]
        out = term if out is None else F.add_table[out, term]
    return out


def frobenius(F: FieldSpec, A, k: int):
    """Entrywise x -> x^(p^k)."""
    if F.e == 1 or k % F.e == 0:
        return np.asarray(A)
    perm = np.array([F.pow(x, F.p ** (k % F.e)) for x in range(F.q)], dtype=np.int64)
    return perm[A]


def rank(F: FieldSpec, A) -> np.ndarray:
    """Ranks of a stack of matrices via batched Gauss-Jordan elimination.

    Pivot rows are tracked with a mask instead of row swaps so every matrix in
    the stack follows the same instruction stream.
    """
    A = np.array(A, dtype=np.int64, copy=True)
    lead = A.shape[:-2]
    m, n = A.shape[-2:]
    A = A.reshape(-1, m, n)
    N = A.shape[0]
    ar = np.arange(N)
    used = np.zeros((N, m), dtype=bool)
    r = np.zeros(N, dtype=np.int64)
    for c in range(n):
        cand = (A[:, :, c] != 0) & ~used
        has = cand.any(axis=1)
        if not has.any():
            continue
        piv = cand.argmax(axis=1)
        prow = A[ar, piv]
        prow = mul(F, inv(F, prow[:, c])[:, None], prow)
        f = A[:, :, c].copy()
        f[ar, piv] = 0
        f[~has] = 0
        A = sub(F, A, mul(F, f[:, :, None], prow[:, None, :]))
        used[ar[has], piv[has]] = True
        r += has
    return r.reshape(lead)


def key_weights(F: FieldSpec, m: int, n: int) -> np.ndarray:
    if F.q ** (m * n) > KEY_LIMIT:
        raise TooLarge(f"{m}x{n} matrices over {F} do not fit 64-bit keys")
    return np.array([F.q ** (m * n - 1 - i) for i in range(m * n)], dtype=np.uint64)


def pack(F: FieldSpec, A) -> np.ndarray:
    """Row-major keys, first entry most significant (key order = lexicographic order)."""
    A = np.asarray(A)
    m, n = A.shape[-2:]
    w = key_weights(F, m, n)
    flat = A.reshape(A.shape[:-2] + (m * n,)).astype(np.uint64)
    return (flat * w).sum(axis=-1, dtype=np.uint64)


def unpack(F: FieldSpec, keys, m: int, n: int) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.uint64)
    q = np.uint64(F.q)
    out = np.empty(keys.shape + (m * n,), dtype=np.int64)
    k = keys.copy()
    for i in range(m * n - 1, -1, -1):
        out[..., i] = (k % q).astype(np.int64)
        k = k // q
    return out.reshape(keys.shape + (m, n))


@functools.lru_cache(maxsize=32)
def rank_table(F: FieldSpec, m: int, n: int) -> np.ndarray | None:
    """rank of every m x n matrix, indexed by key; None when too many matrices."""
    total = F.q ** (m * n)
    if total > RANK_TABLE_LIMIT:
        return None
    out = np.empty(total, dtype=np.int8)
    step = 1 << 14
    for s in range(0, total, step):
        keys = np.arange(s, min(total, s + step), dtype=np.uint64)
        out[s : s + len(keys)] = rank(F, unpack(F, keys, m, n))
    return out


def ranks(F: FieldSpec, A) -> np.ndarray:
    """rank() with the lookup table when one is available."""
    A = np.asarray(A)
    m, n = A.shape[-2:]
    tab = rank_table(F, m, n)
    if tab is not None:
        return tab[pack(F, A)].astype(np.int64)
    return rank(F, A)


@functools.lru_cache(maxsize=16)
def gl_array(F: FieldSpec, n: int) -> np.ndarray:
    """All of GL(n, F) as an (N, n, n) array in key order (cached)."""
    total = F.q ** (n * n)
    if total > 1 << 22:
        raise TooLarge(f"GL({n},{F.q}) is too large to materialize")
    chunks = []
    step = 1 << 16
    for s in range(0, total, step):
        keys = np.arange(s, min(total, s + step), dtype=np.uint64)
        M = unpack(F, keys, n, n)
        chunks.append(M[ranks(F, M) == n])
    out = np.concatenate(chunks)
    out.setflags(write=False)
    return out


def inverse(F: FieldSpec, A) -> np.ndarray:
    """Inverses of a stack of invertible square matrices (Gauss-Jordan on [A | I])."""
    A = np.asarray(A, dtype=np.int64)
    lead = A.shape[:-2]
    n = A.shape[-1]
    A = A.reshape(-1, n, n)
    N = A.shape[0]
    aug = np.concatenate([A, np.broadcast_to(np.eye(n, dtype=np.int64), (N, n, n))], axis=2).copy()
    ar = np.arange(N)
    for c in range(n):
        cand = aug[:, c:, c] != 0
        if not cand.any(axis=1).all():
            raise ValueError("singular matrix in inverse()")
        piv = cand.argmax(axis=1) + c
        rows_c = aug[ar, c].copy()
        aug[ar, c] = aug[ar, piv]
        aug[ar, piv] = rows_c
        prow = mul(F, inv(F, aug[:, c, c])[:, None], aug[:, c])
        aug[:, c] = prow
        f = aug[:, :, c].copy()
        f[:, c] = 0
        aug = sub(F, aug, mul(F, f[:, :, None], prow[:, None, :]))
    return aug[:, :, n:].reshape(lead + (n, n))


def nullspace_counts(F: FieldSpec, A) -> np.ndarray:
    """Nullity (number of columns minus rank) of each matrix in a stack."""
    A = np.asarray(A)
    return A.shape[-1] - rank(F, A)
