"""Slow, independent reference implementations used to cross-check the package.

Nothing here imports mrdcodes; everything works on plain Python ints and lists.
"""

from __future__ import annotations

import itertools


def poly_mulmod(a, b, modulus, p):
    """Product of coefficient lists (constant first) reduced mod a monic modulus."""
    e = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    for d in range(len(prod) - 1, e - 1, -1):
        c = prod[d]
        if c:
            for i in range(e + 1):
                prod[d - e + i] = (prod[d - e + i] - c * modulus[i]) % p
    return (prod + [0] * e)[:e]


def index_to_coeffs(x, p, e):
    return [(x // p**i) % p for i in range(e)]


def coeffs_to_index(c, p):
    return sum(v * p**i for i, v in enumerate(c))


def field_mul(x, y, p, modulus):
    e = len(modulus) - 1
    return coeffs_to_index(poly_mulmod(index_to_coeffs(x, p, e), index_to_coeffs(y, p, e), modulus, p), p)


def is_irreducible_bruteforce(coeffs, p):
    """No root-free factorization check: divide by every monic polynomial of lower degree."""
    e = len(coeffs) - 1
    for d in range(1, e // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            div = list(low) + [1]
            r = list(coeffs)
            for k in range(len(r) - 1, d - 1, -1):
                c = r[k]
                if c:
                    for i in range(d + 1):
                        r[k - d + i] = (r[k - d + i] - c * div[i]) % p
            if not any(r[:d]):
                return False
    return True


def rank_mod_p(rows, p):
    """Rank of an integer matrix over GF(p) by plain Gaussian elimination."""
    M = [[x % p for x in r] for r in rows]
    rank, col = 0, 0
    ncols = len(M[0]) if M else 0
    while rank < len(M) and col < ncols:
        piv = next((i for i in range(rank, len(M)) if M[i][col]), None)
        if piv is None:
            col += 1
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][col], p - 2, p)
        M[rank] = [x * inv % p for x in M[rank]]
        for i in range(len(M)):
            if i != rank and M[i][col]:
                f = M[i][col]
                M[i] = [(x - f * y) % p for x, y in zip(M[i], M[rank])]
        rank += 1
        col += 1
    return rank


def matmul_mod_p(A, B, p):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) % p for j in range(len(B[0]))] for i in range(len(A))]


def all_matrices(p, m, n):
    for flat in itertools.product(range(p), repeat=m * n):
        yield [list(flat[i * n : (i + 1) * n]) for i in range(m)]


def brute_min_rank_distance(mats, p):
    """Minimum rank(A - B) over distinct pairs, by brute force."""
    best = None
    for A, B in itertools.combinations(mats, 2):
        diff = [[(a - b) % p for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]
        r = rank_mod_p(diff, p)
        best = r if best is None else min(best, r)
    return best
