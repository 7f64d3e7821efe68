"""Finite fields GF(p^e) in a polynomial basis.

Elements are coefficient vectors over Z_p, constant term first.  Every element
also has an integer *index*, the base-p number whose digits are those
coefficients (constant term = least significant digit).  Indices are what the
rest of the package stores in matrices and tables; enumeration order and all
tie-breaking follow them.

Small fields (q <= MAX_TABLE_ORDER) carry precomputed numpy addition and
multiplication tables; larger ones fall back to polynomial arithmetic.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    DegreeMismatch,
    DivisionByZero,
    FieldMismatch,
    NotASubfieldOrder,
    NotPrime,
    ReducibleModulus,
    TooLarge,
)

MAX_TABLE_ORDER = 1 << 10
# element enumerations above this size are refused
ENUMERATION_CEILING = 1 << 32


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# polynomials over Z_p as coefficient lists, constant term first


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = _trim(list(a))
    b = _trim(list(b))
    inv_lead = pow(b[-1], -1, p)
    db = len(b) - 1
    while len(a) - 1 >= db:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - db
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        _trim(a)
    return a


def is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    f = _trim(list(coeffs))
    deg = len(f) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            g = list(low) + [1]
            if not _poly_mod(f, g, p):
                return False
    return True


def least_irreducible(p: int, e: int) -> tuple[int, ...]:
    """The monic irreducible of degree e with the smallest integer index."""
    if e == 1:
        return (0, 1)
    for idx in range(p**e):
        low = [(idx // p**i) % p for i in range(e)]
        cand = low + [1]
        if low[0] != 0 and is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    """GF(p^e) with a fixed monic irreducible modulus (constant term first)."""

    p: int
    e: int
    modulus: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p**self.e

    @property
    def order(self) -> int:
        return self.q

    @property
    def is_prime_field(self) -> bool:
        return self.e == 1

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.e})" if self.e > 1 else f"GF({self.p})"

    def descriptor(self) -> dict:
        return {"p": self.p, "e": self.e, "modulus": list(self.modulus)}

    # index <-> coefficients
    def coeffs(self, index: int) -> tuple[int, ...]:
        p = self.p
        return tuple((index // p**i) % p for i in range(self.e))

    def index(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) > self.e:
            raise DegreeMismatch(f"{len(coeffs)} coefficients for a degree-{self.e} field")
        return sum((c % self.p) * self.p**i for i, c in enumerate(coeffs))

    def __call__(self, value) -> FqElem:
        if isinstance(value, FqElem):
            if value.field != self:
                raise FieldMismatch(f"{value.field} vs {self}")
            return value
        if isinstance(value, (list, tuple)):
            return FqElem(self, self.index(value))
        value = int(value)
        if not 0 <= value < self.q:
            raise ValueError(f"index {value} out of range for {self}")
        return FqElem(self, value)

    @property
    def zero(self) -> FqElem:
        return FqElem(self, 0)

    @property
    def one(self) -> FqElem:
        return FqElem(self, 1)

    def elements(self) -> Iterator[FqElem]:
        for i in range(self.q):
            yield FqElem(self, i)

    # index-level arithmetic -------------------------------------------------
    def _poly_mul(self, a: int, b: int) -> int:
        p, e = self.p, self.e
        ca, cb = self.coeffs(a), self.coeffs(b)
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] += x * y
        return self.index(_poly_mod([c % p for c in prod], self.modulus, p) if e > 1 else [prod[0] % p])

    def _poly_add(self, a: int, b: int) -> int:
        p = self.p
        return self.index([(x + y) % p for x, y in zip(self.coeffs(a), self.coeffs(b))])

    @functools.cached_property
    def tables(self) -> bool:
        return self.q <= MAX_TABLE_ORDER

    @functools.cached_property
    def digits(self) -> np.ndarray:
        """(q, e) array of coefficient vectors."""
        idx = np.arange(self.q)
        return np.stack([(idx // self.p**i) % self.p for i in range(self.e)], axis=1)

    @functools.cached_property
    def add_table(self) -> np.ndarray:
        self._require_tables()
        d = self.digits
        s = (d[:, None, :] + d[None, :, :]) % self.p
        return (s * (self.p ** np.arange(self.e))).sum(axis=2).astype(np.int64)

    @functools.cached_property
    def neg_table(self) -> np.ndarray:
        self._require_tables()
        d = (-self.digits) % self.p
        return (d * (self.p ** np.arange(self.e))).sum(axis=1).astype(np.int64)

    @functools.cached_property
    def sub_table(self) -> np.ndarray:
        return self.add_table[:, self.neg_table]

    @functools.cached_property
    def _exp_log(self) -> tuple[np.ndarray, np.ndarray]:
        q = self.q
        g = self._primitive_index()
        exp = np.zeros(q - 1, dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        x = 1
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x = self._poly_mul(x, g)
        return exp, log

    @functools.cached_property
    def mul_table(self) -> np.ndarray:
        self._require_tables()
        q = self.q
        exp, log = self._exp_log
        la = log[:, None] + log[None, :]
        t = exp[la % (q - 1)] if q > 1 else np.zeros((1, 1), dtype=np.int64)
        t[0, :] = 0
        t[:, 0] = 0
        return t.astype(np.int64)

    @functools.cached_property
    def inv_table(self) -> np.ndarray:
        self._require_tables()
        q = self.q
        exp, log = self._exp_log
        inv = np.zeros(q, dtype=np.int64)
        inv[1:] = exp[(-log[1:]) % (q - 1)]
        return inv

    def _require_tables(self):
        if not self.tables:
            raise TooLarge(f"{self} exceeds the table ceiling {MAX_TABLE_ORDER}")

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        return int(self.add_table[a, b]) if self.tables else self._poly_add(a, b)

    def neg(self, a: int) -> int:
        if self.e == 1:
            return (-a) % self.p
        return int(self.neg_table[a]) if self.tables else self.index([-c for c in self.coeffs(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return a * b % self.p
        return int(self.mul_table[a, b]) if self.tables else self._poly_mul(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero(f"inverse of zero in {self}")
        if self.e == 1:
            return pow(a, -1, self.p)
        if self.tables:
            return int(self.inv_table[a])
        return self.pow(a, self.q - 2)

    def pow(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        if a == 0:
            return 1 if k == 0 else 0
        if self.e == 1:
            return pow(a, k, self.p)
        k %= self.q - 1
        result = 1
        base = a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def mult_order(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("zero has no multiplicative order")
        n = self.q - 1
        order = n
        for r in prime_factors(n):
            while order % r == 0 and self.pow(a, order // r) == 1:
                order //= r
        return order

    def _primitive_index(self) -> int:
        if self.q == 2:
            return 1
        n = self.q - 1
        rs = prime_factors(n)
        for a in range(1, self.q):
            if all(self.pow_nocache(a, n // r) != 1 for r in rs):
                return a
        raise AssertionError("field without primitive element")  # pragma: no cover

    def pow_nocache(self, a: int, k: int) -> int:
        # used while the tables themselves are being built
        result, base = 1, a
        while k:
            if k & 1:
                result = self._poly_mul(result, base) if self.e > 1 else result * base % self.p
            base = self._poly_mul(base, base) if self.e > 1 else base * base % self.p
            k >>= 1
        return result


@dataclass(frozen=True)
class FqElem:
    """A field element: owning field plus its integer index."""

    field: FieldSpec
    index: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.coeffs(self.index)

    def _other(self, other) -> int:
        if isinstance(other, FqElem):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other.index
        if isinstance(other, int) and self.field.e == 1:
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else FqElem(self.field, self.field.add(self.index, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else FqElem(self.field, self.field.sub(self.index, o))

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else FqElem(self.field, self.field.sub(o, self.index))

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else FqElem(self.field, self.field.mul(self.index, o))

    __rmul__ = __mul__

    def __neg__(self):
        return FqElem(self.field, self.field.neg(self.index))

    def __truediv__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self * FqElem(self.field, self.field.inv(o))

    def __pow__(self, k: int):
        return FqElem(self.field, self.field.pow(self.index, k))

    def __bool__(self) -> bool:
        return self.index != 0

    def __int__(self) -> int:
        return self.index

    def __repr__(self) -> str:
        if self.field.e == 1:
            return f"{self.index}"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mono = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
                terms.append(mono if c == 1 and i else f"{c}" + ("" if i == 0 else "*" + mono))
        return " + ".join(reversed(terms)) or "0"


# ---------------------------------------------------------------------------
# public operations


@functools.lru_cache(maxsize=None)
def fq_make(p: int, e: int = 1, modulus: tuple[int, ...] | None = None) -> FieldSpec:
    """Build and validate GF(p^e).

    Without a modulus the least monic irreducible (by integer index) is used.
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if e < 1:
        raise DegreeMismatch("extension degree must be >= 1")
    if p**e > ENUMERATION_CEILING:
        raise TooLarge(f"GF({p}^{e}) exceeds the enumeration ceiling")
    if modulus is None:
        modulus = least_irreducible(p, e)
    else:
        modulus = tuple(int(c) % p for c in modulus)
        while len(modulus) > 1 and modulus[-1] == 0:
            modulus = modulus[:-1]
        if len(modulus) - 1 != e:
            raise DegreeMismatch(f"modulus of degree {len(modulus) - 1}, expected {e}")
        if modulus[-1] != 1:
            raise DegreeMismatch("modulus must be monic")
        if not is_irreducible(modulus, p):
            raise ReducibleModulus(f"{modulus} is reducible over GF({p})")
    return FieldSpec(p, e, tuple(modulus))


def field_from_descriptor(d: dict) -> FieldSpec:
    return fq_make(int(d["p"]), int(d["e"]), tuple(d["modulus"]))


def gf(q: int) -> FieldSpec:
    """GF(q) with the default modulus, q a prime power."""
    for p in prime_factors(q)[:1]:
        e = 0
        r = q
        while r % p == 0:
            r //= p
            e += 1
        if r == 1:
            return fq_make(p, e)
    raise NotPrime(f"{q} is not a prime power")


def _check(x: FqElem, y: FqElem):
    if x.field != y.field:
        raise FieldMismatch(f"{x.field} vs {y.field}")


def fq_add(x: FqElem, y: FqElem) -> FqElem:
    _check(x, y)
    return x + y


def fq_sub(x: FqElem, y: FqElem) -> FqElem:
    _check(x, y)
    return x - y


def fq_mul(x: FqElem, y: FqElem) -> FqElem:
    _check(x, y)
    return x * y


def fq_neg(x: FqElem) -> FqElem:
    return -x


def fq_inv(x: FqElem) -> FqElem:
    return FqElem(x.field, x.field.inv(x.index))


def fq_pow(x: FqElem, k: int) -> FqElem:
    return x**k


def _subfield_degree(F: FieldSpec, order: int) -> int:
    s, r = 0, order
    while r > 1 and r % F.p == 0:
        r //= F.p
        s += 1
    if r != 1 or s == 0 or F.e % s:
        raise NotASubfieldOrder(f"{order} is not the order of a subfield of {F}")
    return s


def frobenius_power(x: FqElem, base_q: int, j: int) -> FqElem:
    """x ** (base_q ** j), base_q the order of a subfield of x's field."""
    F = x.field
    _subfield_degree(F, base_q)
    if x.index == 0:
        return x
    return FqElem(F, F.pow(x.index, pow(base_q, j, F.q - 1) if F.q > 2 else 1))


@functools.lru_cache(maxsize=None)
def embedding(K: FieldSpec, E: FieldSpec) -> tuple[int, ...]:
    """Index map K -> E sending x (mod K's modulus) to the least root of it in E."""
    if K == E:
        return tuple(range(K.q))
    if K.p != E.p or E.e % K.e:
        raise NotASubfieldOrder(f"{K} does not embed in {E}")
    if K.e == 1:
        return tuple(range(K.p))
    root = None
    for r in range(E.q):
        acc = 0
        for c in reversed(K.modulus):
            acc = E.add(E.mul(acc, r), c)
        if acc == 0:
            root = r
            break
    assert root is not None
    powers = [E.pow(root, i) for i in range(K.e)]
    out = []
    for k in range(K.q):
        acc = 0
        for c, pw in zip(K.coeffs(k), powers):
            for _ in range(c):
                acc = E.add(acc, pw)
        out.append(acc)
    return tuple(out)


@functools.lru_cache(maxsize=None)
def _restriction(K: FieldSpec, E: FieldSpec) -> dict[int, int]:
    return {e: k for k, e in enumerate(embedding(K, E))}


def to_subfield(x: FqElem, K: FieldSpec) -> FqElem:
    """Express an element of E lying in the image of K as an element of K."""
    try:
        return FqElem(K, _restriction(K, x.field)[x.index])
    except KeyError:
        raise NotASubfieldOrder(f"{x} does not lie in {K}") from None


def lift(k: FqElem, E: FieldSpec) -> FqElem:
    return FqElem(E, embedding(k.field, E)[k.index])


def trace(x: FqElem, K: FieldSpec) -> FqElem:
    """Trace of x over the subfield K; returned as an element of K."""
    E = x.field
    s = _subfield_degree(E, K.q)
    if s != K.e:
        raise NotASubfieldOrder(f"{K} is not a subfield of {E}")
    acc = 0
    y = x.index
    for _ in range(E.e // K.e):
        acc = E.add(acc, y)
        y = E.pow(y, K.q)
    return to_subfield(FqElem(E, acc), K)


def primitive_element(F: FieldSpec) -> FqElem:
    """Least element (by index) of multiplicative order q - 1."""
    return FqElem(F, F._primitive_index())
