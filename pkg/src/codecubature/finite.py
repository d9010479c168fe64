"""Finite fields GF(p^e) and the Galois ring GR(4, m).

Field elements are small integers: the element sum(c_i x^i) is stored as
sum(c_i p^i), so the prime subfield is {0, ..., p-1} and, for p = 2, addition
is XOR.  Multiplication goes through log/antilog tables built from a
primitive element.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_FIELD_SIZE = 2**20


class FieldError(ValueError):
    pass


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


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, e) with q = p**e, or raise FieldError."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    for p in prime_factors(q)[:1]:
        e = 0
        r = q
        while r % p == 0:
            r //= p
            e += 1
        if r == 1:
            return p, e
    raise FieldError(f"{q} is not a prime power")


def is_prime_power(q: int) -> bool:
    try:
        prime_power(q)
    except FieldError:
        return False
    return True


# Polynomials over GF(p) as coefficient lists, constant term first.

def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, b, p):
    a = [c % p for c in a]
    b = _poly_trim(b)
    inv_lead = pow(b[-1], p - 2, p)
    db = len(b) - 1
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] * inv_lead % p
        if c:
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % p
    return _poly_trim(a[:db])


def _poly_mulmod(a, b, mod, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _poly_mod(out, mod, p)


def _int_to_poly(v: int, p: int) -> list[int]:
    out = []
    while v:
        v, r = divmod(v, p)
        out.append(r)
    return out


def _poly_to_int(a, p: int) -> int:
    v = 0
    for c in reversed(a):
        v = v * p + c
    return v


def is_irreducible(poly: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = _poly_trim([c % p for c in poly])
    e = len(poly) - 1
    if e < 1:
        return False
    if e == 1:
        return True
    for d in range(1, e // 2 + 1):
        for low in range(p**d):
            divisor = _int_to_poly(low, p) + [0] * (d - len(_int_to_poly(low, p))) + [1]
            if not _poly_mod(poly, divisor, p):
                return False
    return True


def monic_irreducibles(p: int, e: int):
    """Monic irreducible polynomials of degree e in increasing integer order."""
    for low in range(p**e):
        poly = _int_to_poly(low, p)
        poly = poly + [0] * (e - len(poly)) + [1]
        if is_irreducible(poly, p):
            yield poly


def _poly_pow_mod(a, k, mod, p):
    result = [1]
    base = a
    while k:
        if k & 1:
            result = _poly_mulmod(result, base, mod, p)
        base = _poly_mulmod(base, base, mod, p)
        k >>= 1
    return result


def _element_order_is_full(g, mod, p, q):
    n = q - 1
    if _poly_pow_mod(g, n, mod, p) != [1]:
        return False
    return all(_poly_pow_mod(g, n // r, mod, p) != [1] for r in prime_factors(n))


@dataclass(frozen=True, eq=False)
class FieldTable:
    """Arithmetic tables for GF(p^e).

    ``exp[i]`` is g^i for the primitive element g and ``log`` is its inverse
    on nonzero elements (``log[0]`` is unused).  All vectorised operations
    accept numpy integer arrays or plain ints.
    """

    p: int
    e: int
    modulus: tuple[int, ...]
    primitive: int
    exp: np.ndarray = field(repr=False)
    log: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        return self.p**self.e

    @property
    def order(self) -> int:
        return self.q

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    # digit-wise addition; XOR when p == 2
    def add(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        scale = 1
        for _ in range(self.e):
            out += ((a // scale % self.p + b // scale % self.p) % self.p) * scale
            scale *= self.p
        return out

    def neg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a.copy()
        out = np.zeros_like(a)
        scale = 1
        for _ in range(self.e):
            out += ((-(a // scale % self.p)) % self.p) * scale
            scale *= self.p
        return out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        prod = self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, prod)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of 0 in GF(%d)" % self.q)
        return self.exp[(-self.log[a]) % (self.q - 1)]

    def power(self, a, k: int):
        a = np.asarray(a, dtype=np.int64)
        if k == 0:
            return np.ones_like(a)
        r = self.exp[(self.log[a] * (k % (self.q - 1))) % (self.q - 1)]
        return np.where(a == 0, 0, r)

    def frobenius(self, a, times: int = 1):
        return self.power(a, self.p**times)

    def scalar_mul(self, c: int, a):
        return self.mul(np.full(np.shape(a), c, dtype=np.int64), a)

    def self_check(self, samples: int = 1000, seed: int = 0) -> None:
        """Exercise the field axioms; raises AssertionError on a broken table."""
        q = self.q
        els = self.elements()
        nz = els[1:]
        assert np.all(self.mul(nz, self.inv(nz)) == 1), "bad inverse"
        rng = np.random.default_rng(seed)
        a, b, c = rng.integers(0, q, size=(3, samples))
        assert np.array_equal(self.mul(self.mul(a, b), c), self.mul(a, self.mul(b, c)))
        assert np.array_equal(self.mul(a, b), self.mul(b, a))
        assert np.array_equal(self.mul(a, self.add(b, c)), self.add(self.mul(a, b), self.mul(a, c)))
        assert np.all(self.mul(els, 1) == els)
        if q <= 256:
            x, y = np.meshgrid(els, els)
            lhs = self.frobenius(self.add(x, y))
            rhs = self.add(self.frobenius(x), self.frobenius(y))
        else:
            lhs = self.frobenius(self.add(a, b))
            rhs = self.add(self.frobenius(a), self.frobenius(b))
        assert np.array_equal(lhs, rhs), "Frobenius is not additive"


@lru_cache(maxsize=None)
def field_build(p: int, e: int) -> FieldTable:
    """Build GF(p^e) over the least monic irreducible polynomial of degree e.

    Polynomials are ordered by their integer encoding sum(c_i p^i), which is
    lexicographic order on (c_{e-1}, ..., c_0).
    """
    if not is_prime(p):
        raise FieldError(f"characteristic {p} is not prime")
    if e < 1:
        raise FieldError("extension degree must be positive")
    q = p**e
    if q > MAX_FIELD_SIZE:
        raise FieldError(f"GF({p}^{e}) exceeds the supported size {MAX_FIELD_SIZE}")
    modulus = next(monic_irreducibles(p, e))
    # least element of full multiplicative order
    g = next(c for c in range(1, q) if _element_order_is_full(_int_to_poly(c, p), modulus, p, q))
    assert g is not None
    exp = np.zeros(2 * (q - 1), dtype=np.int64)
    log = np.zeros(q, dtype=np.int64)
    gp = _int_to_poly(g, p)
    cur = [1]
    for i in range(q - 1):
        v = _poly_to_int(cur, p)
        exp[i] = v
        log[v] = i
        cur = _poly_mulmod(cur, gp, modulus, p)
    exp[q - 1:] = exp[: q - 1]
    exp.setflags(write=False)
    log.setflags(write=False)
    return FieldTable(p=p, e=e, modulus=tuple(modulus), primitive=g, exp=exp, log=log)


def field_of_order(q: int) -> FieldTable:
    p, e = prime_power(q)
    return field_build(p, e)


def trace_to_subfield(x, table: FieldTable, q: int):
    """Tr(x) = x + x^q + ... + x^(q^(m-1)) from GF(q^m) down to GF(q).

    The result is returned in the big field's encoding; it lies in the copy
    of GF(q) inside it (use :func:`subfield_labels` to relabel).
    """
    p, e_small = prime_power(q)
    if p != table.p or table.e % e_small:
        raise FieldError(f"GF({q}) is not a subfield of GF({table.q})")
    m = table.e // e_small
    x = np.asarray(x, dtype=np.int64)
    total = np.zeros_like(x)
    term = x
    for _ in range(m):
        total = table.add(total, term)
        term = table.power(term, q)
    return total


def poly_eval(coeffs, x, table: FieldTable):
    """Horner evaluation of sum(coeffs[i] x^i) at x (scalar or array)."""
    x = np.asarray(x, dtype=np.int64)
    acc = np.zeros_like(x)
    for c in reversed(list(coeffs)):
        acc = table.add(table.mul(acc, x), c)
    return acc


@lru_cache(maxsize=None)
def subfield_labels(big_p: int, big_e: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Isomorphism between GF(q) (as built by field_build) and its copy in GF(p^e).

    Returns ``(to_big, to_small)``: ``to_big[a]`` is the big-field image of
    small-field element a, and ``to_small`` maps big-field elements of the
    subfield back (other entries are -1).
    """
    big = field_build(big_p, big_e)
    small = field_of_order(q)
    if small.p != big.p or big.e % small.e:
        raise FieldError(f"GF({q}) is not a subfield of GF({big.q})")
    # subfield = fixed points of x -> x^q
    els = big.elements()
    sub = els[big.power(els, q) == els]
    if small.e == 1:
        to_big = np.arange(q, dtype=np.int64)
    else:
        mod = list(small.modulus)
        root = None
        for r in sub:
            if poly_eval(mod, int(r), big) == 0:
                root = int(r)
                break
        assert root is not None
        to_big = np.zeros(q, dtype=np.int64)
        for a in range(q):
            digits = _int_to_poly(a, small.p)
            to_big[a] = int(poly_eval(digits, root, big))
    to_small = np.full(big.q, -1, dtype=np.int64)
    to_small[to_big] = np.arange(q)
    assert sorted(to_big.tolist()) == sorted(sub.tolist())
    to_big.setflags(write=False)
    to_small.setflags(write=False)
    return to_big, to_small


# ---------------------------------------------------------------------------
# Galois ring GR(4, m)


class GaloisRingError(ValueError):
    pass


def _z4_polymul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % 4
    return out


def graeffe_lift(f: list[int]) -> list[int]:
    """Hensel lift of a binary polynomial to Z4 by root squaring.

    Writes f = e(x) + o(x) with even and odd parts; the lift h satisfies
    h(x^2) = +-(e(x)^2 - o(x)^2) mod 4 with the sign making h monic.
    """
    deg = len(f) - 1
    ev = [c if i % 2 == 0 else 0 for i, c in enumerate(f)]
    od = [c if i % 2 == 1 else 0 for i, c in enumerate(f)]
    sq = [(a - b) % 4 for a, b in zip(_z4_polymul(ev, ev), _z4_polymul(od, od))]
    if deg % 2:
        sq = [(-c) % 4 for c in sq]
    assert all(c == 0 for c in sq[1::2])
    h = sq[0::2]
    assert h[-1] == 1 and len(h) == deg + 1
    return h


@dataclass(frozen=True, eq=False)
class GaloisRingTable:
    """GR(4, m) = Z4[x]/(h) with h a basic primitive polynomial.

    Elements are length-m coefficient vectors mod 4, indexed by
    sum(c_i 4^i).  ``xi_powers[i]`` is xi^i for the root xi = x of h, which
    has multiplicative order 2^m - 1.
    """

    m: int
    modulus: tuple[int, ...]
    binary_modulus: tuple[int, ...]
    xi_powers: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return 4**self.m

    def mul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64) % 4
        b = np.asarray(b, dtype=np.int64) % 4
        m = self.m
        prod = np.zeros(2 * m - 1, dtype=np.int64)
        for i in range(m):
            prod[i: i + m] += a[i] * b
        prod %= 4
        h = self.modulus
        for i in range(2 * m - 2, m - 1, -1):
            c = prod[i]
            if c:
                for j in range(m + 1):
                    prod[i - m + j] = (prod[i - m + j] - c * h[j]) % 4
        return prod[:m].copy()

    def add(self, a, b) -> np.ndarray:
        return (np.asarray(a) + np.asarray(b)) % 4

    def power(self, a, k: int) -> np.ndarray:
        result = self.one()
        base = np.asarray(a, dtype=np.int64) % 4
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def one(self) -> np.ndarray:
        v = np.zeros(self.m, dtype=np.int64)
        v[0] = 1
        return v

    def zero(self) -> np.ndarray:
        return np.zeros(self.m, dtype=np.int64)

    def index(self, a) -> int:
        return int(sum(int(c) * 4**i for i, c in enumerate(np.asarray(a) % 4)))

    def element(self, idx: int) -> np.ndarray:
        return np.array([(idx // 4**i) % 4 for i in range(self.m)], dtype=np.int64)

    def teichmuller(self) -> list[np.ndarray]:
        """{0} together with xi^0, ..., xi^(2^m - 2)."""
        return [self.zero()] + [row.copy() for row in self.xi_powers]

    @property
    def teichmuller_indices(self) -> list[int]:
        return [self.index(t) for t in self.teichmuller()]

    def frobenius(self, a) -> np.ndarray:
        """Ring automorphism fixing Z4 and sending xi to xi^2."""
        a = np.asarray(a, dtype=np.int64) % 4
        out = self.zero()
        n = len(self.xi_powers)
        for j, c in enumerate(a):
            if c:
                out = (out + c * self.xi_powers[(2 * j) % n]) % 4
        return out

    def trace(self, a) -> int:
        total = self.zero()
        cur = np.asarray(a, dtype=np.int64) % 4
        for _ in range(self.m):
            total = (total + cur) % 4
            cur = self.frobenius(cur)
        if np.any(total[1:]):
            raise GaloisRingError("trace left Z4; modulus is not basic primitive")
        return int(total[0])

    def reduce_mod2(self, a) -> int:
        """Image in GF(2^m) under the binary encoding of field_build(2, m)."""
        bits = np.asarray(a) % 2
        return int(sum(int(b) << i for i, b in enumerate(bits)))


def _is_primitive_binary(f: list[int]) -> bool:
    m = len(f) - 1
    q = 2**m
    if m == 1:
        return True
    return _element_order_is_full([0, 1], f, 2, q)


@lru_cache(maxsize=None)
def galois_ring_build(m: int) -> GaloisRingTable:
    """GR(4, m) for odd m, over the Graeffe lift of the least primitive binary modulus."""
    if m < 1 or m % 2 == 0:
        raise GaloisRingError(f"GR(4, m) is only built for odd m, got {m}")
    tried = []
    for f in monic_irreducibles(2, m):
        if not _is_primitive_binary(f):
            tried.append(f)
            continue
        h = graeffe_lift(f)
        n = 2**m - 1
        powers = np.zeros((n, m), dtype=np.int64)
        xi = np.zeros(m, dtype=np.int64)
        if m == 1:
            xi[0] = (-h[0]) % 4
        else:
            xi[1] = 1
        ring = GaloisRingTable(m=m, modulus=tuple(h), binary_modulus=tuple(f),
                               xi_powers=np.zeros((0, m), dtype=np.int64))
        cur = ring.one()
        for i in range(n):
            powers[i] = cur
            cur = ring.mul(cur, xi)
        if not np.array_equal(cur, ring.one()):
            tried.append(f)
            continue
        powers.setflags(write=False)
        return GaloisRingTable(m=m, modulus=tuple(h), binary_modulus=tuple(f), xi_powers=powers)
    raise GaloisRingError(f"no basic primitive lift found for m={m} (tried {tried})")
