"""Orthogonal arrays used to thin convolution formulas.

An array is a multiset of rows over the symbols 0..q-1.  It has strength t
when every projection onto t columns hits each of the q^t patterns equally
often.  Linear arrays keep a generator matrix over GF(q) (symbols are the
element encoding of :func:`codecubature.finite.field_of_order`), which lets
strength be checked through ranks instead of row counts.
"""

from __future__ import annotations

import dataclasses
import itertools
import logging
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .finite import (
    FieldTable,
    field_build,
    field_of_order,
    galois_ring_build,
    is_prime_power,
    prime_power,
    subfield_labels,
    trace_to_subfield,
)

log = logging.getLogger(__name__)

DEFAULT_BUDGET = int(float(os.environ.get("CODECUBATURE_BUDGET", "1e9")))
MAX_BCH_POINTS = 2**16
GRAY = np.array([[0, 0], [0, 1], [1, 1], [1, 0]], dtype=np.uint8)


class OAError(ValueError):
    pass


class BudgetExceeded(OAError):
    """An exhaustive check would exceed the operation budget; sample instead."""


@dataclass(frozen=True, eq=False)
class OrthogonalArray:
    q: int
    rows: np.ndarray = field(repr=False)
    strength: int | None = None
    is_linear: bool = False
    provenance: str = "custom"
    generator: np.ndarray | None = field(default=None, repr=False)
    notes: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        rows = np.ascontiguousarray(self.rows, dtype=np.uint8)
        if rows.ndim != 2:
            raise OAError("rows must be a 2-d array")
        if rows.size and int(rows.max()) >= self.q:
            raise OAError(f"symbol out of range for q={self.q}")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        if self.generator is not None:
            g = np.ascontiguousarray(self.generator, dtype=np.int64)
            g.setflags(write=False)
            object.__setattr__(self, "generator", g)

    @property
    def length(self) -> int:
        return self.rows.shape[1]

    @property
    def size(self) -> int:
        return self.rows.shape[0]

    @property
    def field(self) -> FieldTable:
        return field_of_order(self.q)

    @property
    def contains_all_ones(self) -> bool:
        return bool(np.any(np.all(self.rows == 1, axis=1)))

    @property
    def contains_zero(self) -> bool:
        return bool(np.any(np.all(self.rows == 0, axis=1)))

    @property
    def dual_is_zero_sum(self) -> bool:
        # a linear array containing (1,...,1) is dual to a zero-sum code
        return self.is_linear and self.contains_all_ones

    def distinct(self) -> "OrthogonalArray":
        rows, _ = unique_rows(self.rows)
        return dataclasses.replace(self, rows=rows)

    def with_strength(self, t: int) -> "OrthogonalArray":
        return dataclasses.replace(self, strength=t)

    def closed_under_all_ones(self) -> bool:
        """True if adding (1,...,1) maps the row multiset onto itself."""
        f = self.field
        shifted = f.add(self.rows.astype(np.int64), 1).astype(np.uint8)
        a = np.sort(_row_keys(self.rows))
        b = np.sort(_row_keys(shifted))
        return bool(np.array_equal(a, b))

    def check_linear(self) -> bool:
        """Exhaustive closure check: rows + c*g stays in the row set for every generator g."""
        if self.generator is None:
            return False
        f = self.field
        keys = set(_row_keys(self.rows).tolist())
        rows = self.rows.astype(np.int64)
        for g in self.generator:
            if _row_key(g.astype(np.uint8)) not in keys:
                return False
            for c in range(1, self.q):
                moved = f.add(rows, f.mul(c, g)[None, :])
                if not set(_row_keys(moved.astype(np.uint8)).tolist()) <= keys:
                    return False
        return True


def _row_keys(rows: np.ndarray) -> np.ndarray:
    rows = np.ascontiguousarray(rows, dtype=np.uint8)
    return rows.view(np.dtype((np.void, rows.shape[1]))).ravel() if rows.shape[1] else np.zeros(len(rows), dtype="V1")


def _row_key(row: np.ndarray) -> bytes:
    return np.ascontiguousarray(row, dtype=np.uint8).tobytes()


def unique_rows(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Distinct rows in order of first appearance, with multiplicities."""
    rows = np.ascontiguousarray(rows)
    if len(rows) == 0:
        return rows, np.zeros(0, dtype=np.int64)
    _, first, inverse, counts = np.unique(
        _row_keys(rows.astype(np.uint8)), return_index=True, return_inverse=True, return_counts=True
    )
    order = np.argsort(first, kind="stable")
    return rows[first[order]], counts[order]


# ---------------------------------------------------------------------------
# linear algebra over GF(q) on symbol matrices

def row_reduce(mat: np.ndarray, f: FieldTable) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = np.array(mat, dtype=np.int64)
    if m.size == 0:
        return m.reshape(0, m.shape[1] if m.ndim == 2 else 0), []
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if len(nz) == 0:
            continue
        pr = r + nz[0]
        if pr != r:
            m[[r, pr]] = m[[pr, r]]
        m[r] = f.mul(f.inv(m[r, c]), m[r])
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] = f.sub(m[i], f.mul(m[i, c], m[r]))
        pivots.append(c)
        r += 1
    return m[:r], pivots


def span_rows(basis: np.ndarray, f: FieldTable) -> np.ndarray:
    """All q^d linear combinations of the basis rows, coefficient-major order."""
    basis = np.asarray(basis, dtype=np.int64)
    length = basis.shape[1]
    out = np.zeros((1, length), dtype=np.int64)
    for g in basis:
        blocks = [f.add(out, f.mul(c, g)[None, :]) for c in range(f.q)]
        out = np.concatenate(blocks, axis=0)
    return out.astype(np.uint8)


def nullspace(mat: np.ndarray, f: FieldTable) -> np.ndarray:
    """Basis (as rows) of {v : mat @ v = 0} over GF(q)."""
    rref, pivots = row_reduce(mat, f)
    cols = mat.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    out = np.zeros((len(free), cols), dtype=np.int64)
    for k, fc in enumerate(free):
        out[k, fc] = 1
        for i, pc in enumerate(pivots):
            out[k, pc] = f.neg(rref[i, fc])
    return out


# ---------------------------------------------------------------------------
# strength verification

@dataclass
class StrengthReport:
    passes: bool
    strength: int
    worst_deviation: float
    subsets_checked: int
    mode: str
    method: str
    failing: tuple | None = None  # (columns, pattern, count)

    def __bool__(self):
        return self.passes


def _count_batch(rows_t: np.ndarray, cols: np.ndarray, q: int) -> np.ndarray:
    """Pattern counts, shape (B, q^t), for a batch of column subsets."""
    b, t = cols.shape
    n = rows_t.shape[1]
    acc = np.zeros((b, n), dtype=np.int64)
    for j in range(t):
        acc *= q
        acc += rows_t[cols[:, j]]
    acc += (np.arange(b, dtype=np.int64) * q**t)[:, None]
    return np.bincount(acc.ravel(), minlength=b * q**t).reshape(b, q**t)


def _pack_columns(rows: np.ndarray) -> np.ndarray:
    """Binary columns as bit vectors: shape (length, words) of uint64."""
    bits = np.packbits(np.ascontiguousarray(rows.T), axis=1, bitorder="little")
    pad = (-bits.shape[1]) % 8
    if pad:
        bits = np.concatenate([bits, np.zeros((bits.shape[0], pad), dtype=np.uint8)], axis=1)
    return np.ascontiguousarray(bits).view(np.uint64)


def _count_batch_binary(packed: np.ndarray, cols: np.ndarray, n_rows: int) -> np.ndarray:
    """Same result as :func:`_count_batch` for q = 2, via parity correlations.

    The pattern distribution on t columns is recovered from the 2^t parity
    counts by an inverse Walsh-Hadamard transform.
    """
    b, t = cols.shape
    vals = packed[cols]  # (B, t, W)
    combos = np.zeros((b, 1, packed.shape[1]), dtype=np.uint64)
    for j in range(t - 1, -1, -1):  # mask bit (t-1-j) belongs to column j
        combos = np.concatenate([combos, combos ^ vals[:, j: j + 1, :]], axis=1)
    ones = np.bitwise_count(combos).sum(axis=2, dtype=np.int64)
    corr = n_rows - 2 * ones
    size = 1 << t
    masks = np.arange(size)
    signs = 1 - 2 * (np.bitwise_count((masks[:, None] & masks[None, :]).astype(np.uint64)) & 1).astype(np.int64)
    return corr @ signs // size


def _independent_batch(gen_t: np.ndarray, cols: np.ndarray, f: FieldTable) -> np.ndarray:
    """For each subset, whether the generator columns it picks are independent."""
    b, t = cols.shape
    if f.q == 2:
        vals = gen_t[cols]  # (B, t) packed column ints
        combos = np.zeros((b, 1), dtype=np.uint64)
        for j in range(t):
            combos = np.concatenate([combos, combos ^ vals[:, j: j + 1]], axis=1)
        return np.all(combos[:, 1:] != 0, axis=1)
    cvecs = gen_t[cols]  # (B, t, d)
    d = cvecs.shape[2]
    combos = np.zeros((b, 1, d), dtype=np.int64)
    for j in range(t):
        col = cvecs[:, j, :][:, None, :]
        blocks = [f.add(combos, f.mul(c, col)) for c in range(f.q)]
        combos = np.concatenate(blocks, axis=1)
    zero = np.all(combos == 0, axis=2).sum(axis=1)
    return zero == 1


def _iter_subsets(length: int, t: int, batch: int):
    it = itertools.combinations(range(length), t)
    while True:
        chunk = list(itertools.islice(it, batch))
        if not chunk:
            return
        yield np.array(chunk, dtype=np.int64).reshape(len(chunk), t)


def _random_subsets(length: int, t: int, count: int, rng: np.random.Generator, batch: int):
    done = 0
    while done < count:
        b = min(batch, count - done)
        keys = rng.random((b, length))
        cols = np.sort(np.argpartition(keys, t - 1, axis=1)[:, :t], axis=1) if t < length else np.tile(np.arange(length), (b, 1))
        done += b
        yield cols


def _packed_generator_columns(gen: np.ndarray) -> np.ndarray:
    d = gen.shape[0]
    if d > 64:
        raise OAError("generator too tall for packed rank checks")
    weights = (np.uint64(1) << np.arange(d, dtype=np.uint64))
    return (gen.astype(np.uint64) * weights[:, None]).sum(axis=0).astype(np.uint64)


def verify_strength(
    array: OrthogonalArray,
    t: int,
    mode: str = "exhaustive",
    count: int = 10_000,
    seed: int = 0,
    budget: int | None = None,
    method: str = "auto",
) -> StrengthReport:
    """Check that every t-column projection of ``array`` is constant-to-1.

    ``mode`` is ``"exhaustive"`` (all column subsets) or ``"sampled"``
    (``count`` uniformly random subsets, reproducible from ``seed``).
    ``method`` picks how a subset is checked: ``"count"`` tallies patterns
    over all rows; ``"rank"`` (linear arrays only) checks that the generator
    columns are independent, which is equivalent for a linear image.
    Raises :class:`BudgetExceeded` when an exhaustive check is too large.
    """
    budget = DEFAULT_BUDGET if budget is None else budget
    q, length, n_rows = array.q, array.length, array.size
    t_eff = min(t, length)
    if t_eff <= 0:
        return StrengthReport(True, t, 0.0, 0, mode, "trivial")
    if method == "auto":
        method = "rank" if (array.generator is not None and mode == "exhaustive") else "count"
    if method == "rank" and array.generator is None:
        raise OAError("rank method needs a generator matrix")

    n_subsets = math.comb(length, t_eff)
    if mode == "exhaustive":
        if method == "rank":
            cost = n_subsets * (q**t_eff if q > 2 else 2**t_eff) * max(1, array.generator.shape[0] if q > 2 else 1)
        else:
            cost = n_subsets * n_rows
        if cost > budget:
            raise BudgetExceeded(
                f"exhaustive strength-{t_eff} check costs {cost:.3g} > budget {budget:.3g}"
            )
        subsets = _iter_subsets(length, t_eff, _batch_size(method, n_rows, q, t_eff))
        total = n_subsets
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        subsets = _random_subsets(length, t_eff, count, rng, _batch_size(method, n_rows, q, t_eff))
        total = count
    else:
        raise OAError(f"unknown mode {mode!r}")

    expected = n_rows / q**t_eff
    worst = 0.0 if n_rows % q**t_eff == 0 else abs(round(expected) - expected)
    failing = None
    checked = 0
    if method == "count":
        if q == 2:
            packed = _pack_columns(array.rows)
            count_fn = lambda cols: _count_batch_binary(packed, cols, n_rows)  # noqa: E731
        else:
            rows_t = np.ascontiguousarray(array.rows.T)
            count_fn = lambda cols: _count_batch(rows_t, cols, q)  # noqa: E731
        for cols in subsets:
            counts = count_fn(cols)
            dev = np.abs(counts - expected).max(axis=1)
            checked += len(cols)
            bad = np.nonzero(dev > 0)[0]
            worst = max(worst, float(dev.max()))
            if len(bad) and failing is None:
                i = bad[0]
                pat = int(np.argmax(np.abs(counts[i] - expected)))
                digits = tuple(int(d) for d in np.base_repr(pat, base=q).zfill(t_eff)) if q <= 10 else pat
                failing = (tuple(int(c) for c in cols[i]), digits, int(counts[i, pat]))
            if failing is not None and mode == "exhaustive":
                break
    else:
        f = array.field
        gen = array.generator
        gen_t = _packed_generator_columns(gen) if q == 2 else np.ascontiguousarray(gen.T)
        for cols in subsets:
            ok = _independent_batch(gen_t, cols, f)
            checked += len(cols)
            if not ok.all():
                i = int(np.nonzero(~ok)[0][0])
                failing = (tuple(int(c) for c in cols[i]), None, None)
                # a dependent subset leaves some pattern unreached
                worst = max(worst, expected)
                break
    passes = failing is None and worst == 0.0
    return StrengthReport(passes, t, worst, checked, mode, method, failing)


def _batch_size(method, n_rows, q, t):
    if method == "count":
        return max(1, min(4096, 2_000_000 // max(1, n_rows * (2**t if q == 2 else 1) // 64)))
    return max(1, min(20000, 2_000_000 // max(1, q**t)))


def certify(array: OrthogonalArray, t: int, mode: str = "auto", count: int = 10_000, seed: int = 0) -> OrthogonalArray:
    """Verify strength t and return the array with its strength set.

    ``mode="auto"`` tries an exhaustive check and falls back to sampling
    when the budget would be exceeded.
    """
    if mode == "auto":
        try:
            report = verify_strength(array, t, "exhaustive")
        except BudgetExceeded:
            report = verify_strength(array, t, "sampled", count=count, seed=seed)
    else:
        report = verify_strength(array, t, mode, count=count, seed=seed)
    if not report.passes:
        raise OAError(f"{array.provenance} array fails strength {t}: {report.failing}")
    notes = dict(array.notes)
    notes["strength_check"] = f"{report.mode}/{report.method}/{report.subsets_checked}"
    return dataclasses.replace(array, strength=t, notes=notes)


# ---------------------------------------------------------------------------
# BCH duals

def bch_alpha(q: int, s: int) -> int:
    """Number of F_{q^m}-coordinates a degree-(s-1) trace polynomial really uses."""
    return s - 1 - (s - 1) // q


def bch_dual_array(q: int, m: int, s: int, verify: str = "auto") -> OrthogonalArray:
    """Rows Tr(P(x)) over x in GF(q^m) for every polynomial P of degree < s.

    Columns follow the antilog order: 0, g^0, g^1, ..., g^(q^m - 2).  The
    row set is the GF(q)-span of Tr(b x^j) for b in a basis of GF(q^m), so
    duplicate functions never appear.
    """
    p, e = prime_power(q)
    if s < 1 or m < 1:
        raise OAError("need s >= 1 and m >= 1")
    big_q = q**m
    if big_q > MAX_BCH_POINTS:
        raise OAError(f"q^m = {big_q} exceeds {MAX_BCH_POINTS}")
    return _bch_dual_cached(q, m, s, verify)


@lru_cache(maxsize=32)
def _bch_dual_cached(q, m, s, verify):
    p, e = prime_power(q)
    big = field_build(p, e * m)
    small = field_of_order(q)
    _, to_small = subfield_labels(p, e * m, q)
    xs = np.concatenate([[0], big.exp[: big.q - 1]])
    basis_elems = big.exp[:m]  # 1, g, ..., g^(m-1): a GF(q)-basis of GF(q^m)
    gens = []
    for j in range(s):
        xj = big.power(xs, j) if j else np.ones_like(xs)
        for b in basis_elems:
            tr = trace_to_subfield(big.mul(b, xj), big, q)
            gens.append(to_small[tr])
    gens = np.array(gens, dtype=np.int64)
    assert np.all(gens >= 0)
    basis, _ = row_reduce(gens, small)
    dim = basis.shape[0]
    bound = m * bch_alpha(q, s) + 1
    if dim > bound:
        raise OAError(f"BCH dual dimension {dim} exceeds m*alpha+1 = {bound}")
    rows = span_rows(basis, small)
    arr = OrthogonalArray(
        q=q, rows=rows, is_linear=True, provenance="bch", generator=basis,
        notes={"m": m, "s": s, "dimension": dim, "dimension_bound": bound},
    )
    if verify == "none":
        return arr
    return certify(arr, min(s, arr.length), mode=verify)


# ---------------------------------------------------------------------------
# projections

def project_array(array: OrthogonalArray, keep) -> OrthogonalArray:
    """Restrict to the given columns, keeping row multiplicities."""
    keep = [int(k) for k in keep]
    if len(set(keep)) != len(keep) or any(k < 0 or k >= array.length for k in keep):
        raise OAError(f"invalid column selection {keep}")
    gen = None if array.generator is None else array.generator[:, keep]
    strength = None if array.strength is None else min(array.strength, len(keep))
    notes = dict(array.notes)
    notes["parent"] = array.provenance
    return OrthogonalArray(
        q=array.q, rows=array.rows[:, keep], strength=strength, is_linear=array.is_linear,
        provenance="projected", generator=gen, notes=notes,
    )


def project_annihilating(array: OrthogonalArray, n: int, kill=()) -> OrthogonalArray:
    """Project to n columns on which every kill vector vanishes, merging duplicates.

    The kept columns are the first n of the common zero set, so the kill
    vectors map to zero and the image is a smaller linear array of the
    same strength.
    """
    if not array.is_linear or array.generator is None:
        raise OAError("annihilating projection needs a linear array")
    kill = [np.asarray(v, dtype=np.uint8) for v in kill]
    keys = set(_row_keys(array.rows).tolist())
    for v in kill:
        if v.shape != (array.length,) or _row_key(v) not in keys:
            raise OAError("kill vector is not a row of the array")
    zero_set = np.arange(array.length)
    for v in kill:
        zero_set = zero_set[v[zero_set] == 0]
    if len(zero_set) < n:
        raise OAError(f"common zero set has {len(zero_set)} < {n} columns")
    cols = zero_set[:n].tolist()
    proj = project_array(array, cols)
    rows, _ = unique_rows(proj.rows)
    f = array.field
    basis, _ = row_reduce(proj.generator, f)
    if len(rows) != f.q ** basis.shape[0]:
        raise OAError("projected rows do not form the expected subspace")
    if kill:
        rank = row_reduce(np.array(kill, dtype=np.int64), f)[0].shape[0]
        if array.size % len(rows) or len(rows) > array.size // f.q**rank:
            raise OAError("annihilation did not shrink the array as expected")
    notes = dict(proj.notes)
    notes["killed"] = len(kill)
    return OrthogonalArray(
        q=array.q, rows=rows, strength=proj.strength, is_linear=True, provenance="projected",
        generator=basis, notes=notes,
    )


# ---------------------------------------------------------------------------
# Hadamard matrices

def _legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def _quadratic_character(q: int) -> np.ndarray:
    """chi[a] for a in GF(q): 0 at zero, +1 on nonzero squares, -1 otherwise."""
    f = field_of_order(q)
    chi = np.where(f.log % 2 == 0, 1, -1).astype(np.int64)
    chi[0] = 0
    return chi


def _jacobsthal(q: int) -> np.ndarray:
    f = field_of_order(q)
    els = f.elements()
    return _quadratic_character(q)[f.sub(els[None, :], els[:, None])]


def paley_matrix(n: int) -> np.ndarray:
    """Paley Hadamard matrix of order n.

    Type I when n - 1 is a prime power = 3 mod 4; type II when n = 2(q + 1)
    with q a prime power = 1 mod 4.
    """
    if is_prime_power(n - 1) and (n - 1) % 4 == 3:
        q = n - 1
        s = np.zeros((n, n), dtype=np.int64)
        s[0, 1:] = 1
        s[1:, 0] = -1
        s[1:, 1:] = _jacobsthal(q)
        return np.eye(n, dtype=np.int64) + s
    q = n // 2 - 1
    if n % 2 == 0 and q > 1 and is_prime_power(q) and q % 4 == 1:
        c = np.zeros((q + 1, q + 1), dtype=np.int64)
        c[0, 1:] = 1
        c[1:, 0] = 1
        c[1:, 1:] = _jacobsthal(q)
        a = np.array([[1, -1], [-1, -1]], dtype=np.int64)
        b = np.array([[1, 1], [1, -1]], dtype=np.int64)
        return np.kron(c, a) + np.kron(np.eye(q + 1, dtype=np.int64), b)
    raise OAError(f"no Paley construction of order {n}")


def _paley_order(n: int) -> bool:
    if is_prime_power(n - 1) and (n - 1) % 4 == 3:
        return True
    q = n // 2 - 1
    return n % 2 == 0 and q > 1 and is_prime_power(q) and q % 4 == 1


@lru_cache(maxsize=None)
def _hadamard_recipe(n: int):
    if n == 1:
        return ("unit",)
    if n == 2:
        return ("sylvester", 1)
    if n % 4:
        return None
    if _paley_order(n):
        return ("paley",)
    if _hadamard_recipe(n // 2) is not None:
        return ("sylvester", n // 2)
    for a in range(2, int(math.isqrt(n)) + 1):
        if n % a == 0 and _hadamard_recipe(a) and _hadamard_recipe(n // a):
            return ("kron", a, n // a)
    return None


def hadamard_constructible(n: int) -> bool:
    return n >= 1 and _hadamard_recipe(n) is not None


def next_hadamard_order(n: int, window: int = 64) -> int:
    for k in range(max(n, 1), n + window + 1):
        if hadamard_constructible(k):
            return k
    raise OAError(f"no constructible Hadamard order in [{n}, {n + window}]")


def hadamard_matrix(n: int) -> np.ndarray:
    """Hadamard matrix of order n from Sylvester doubling, Paley I/II and Kronecker products."""
    recipe = _hadamard_recipe(n) if n >= 1 else None
    if recipe is None:
        near = [k for k in range(max(1, n - 16), n + 17) if hadamard_constructible(k)]
        raise OAError(f"order {n} is not constructible here; nearby orders: {near}")
    kind = recipe[0]
    if kind == "unit":
        h = np.ones((1, 1), dtype=np.int64)
    elif kind == "paley":
        h = paley_matrix(n)
    elif kind == "sylvester":
        half = hadamard_matrix(recipe[1])
        h = np.block([[half, half], [half, -half]])
    else:
        h = np.kron(hadamard_matrix(recipe[1]), hadamard_matrix(recipe[2]))
    if not np.array_equal(h @ h.T, n * np.eye(n, dtype=np.int64)):
        raise OAError(f"Hadamard construction for order {n} is not orthogonal")
    return h


def hadamard_to_oa(h: np.ndarray) -> OrthogonalArray:
    """OA(2n, n, 2, 3) from the rows of H and -H, first row normalised to +1."""
    h = np.asarray(h, dtype=np.int64)
    n = h.shape[0]
    if h.shape != (n, n) or not np.array_equal(h @ h.T, n * np.eye(n, dtype=np.int64)):
        raise OAError("not a Hadamard matrix")
    h = h * h[0][None, :]
    rows = np.concatenate([h, -h]).astype(np.int64)
    rows = ((1 - rows) // 2).astype(np.uint8)
    arr = OrthogonalArray(q=2, rows=rows, provenance="hadamard", notes={"order": n})
    t = min(3, n)
    while t > 0:
        rep = verify_strength(arr, t, "exhaustive", method="count")
        if rep.passes:
            return arr.with_strength(t)
        if n >= 4:
            raise OAError(f"Hadamard array of order {n} fails strength 3: {rep.failing}")
        t -= 1
    return arr


# ---------------------------------------------------------------------------
# Kerdock arrays

def kerdock_array(m: int, verify: str = "auto", samples: int = 100_000, seed: int = 0) -> OrthogonalArray:
    """Binary Kerdock OA(2^(2m), 2^m, 2, 5) for even m >= 4.

    Built as the Gray image of the quaternary Kerdock code over GR(4, m-1):
    codewords x -> T(lambda x) + eps on the Teichmuller set.  Strength 5 is
    checked before it is recorded (exhaustively when affordable).
    """
    if m % 2 or m < 4:
        raise OAError(f"Kerdock arrays need even m >= 4, got {m}")
    if m > 8:
        raise OAError("Kerdock arrays above m=8 exceed the row budget")
    return _kerdock_cached(m, verify, samples, seed)


def quaternary_kerdock(m_odd: int) -> np.ndarray:
    """All 4^(m+1) codewords of the Z4 Kerdock code of length 2^m (m odd)."""
    ring = galois_ring_build(m_odd)
    teich = ring.teichmuller()
    basis = np.array(
        [[ring.trace(ring.mul(ring.xi_powers[j], x)) for x in teich] for j in range(m_odd)],
        dtype=np.int64,
    )
    length = len(teich)
    words = np.zeros((1, length), dtype=np.int64)
    for g in list(basis) + [np.ones(length, dtype=np.int64)]:
        words = np.concatenate([(words + c * g) % 4 for c in range(4)], axis=0)
    return words


@lru_cache(maxsize=4)
def _kerdock_cached(m, verify, samples, seed):
    words = quaternary_kerdock(m - 1)
    rows = GRAY[words].reshape(len(words), -1)
    arr = OrthogonalArray(q=2, rows=rows, provenance="kerdock", notes={"m": m})
    if verify == "none":
        return arr
    return certify(arr, 5, mode=verify, count=samples, seed=seed)


# ---------------------------------------------------------------------------
# dual distance

def dual_distance(array: OrthogonalArray, budget: int = 2**24) -> int:
    """Minimum weight of the dual code, by enumerating it.

    The full space has dual {0}; its dual distance is taken as length + 1.
    """
    if array.generator is None:
        raise OAError("dual distance needs a linear array")
    f = array.field
    length = array.length
    dual = nullspace(array.generator, f)
    k = dual.shape[0]
    if k == 0:
        return length + 1
    if f.q**k > budget:
        raise BudgetExceeded(f"dual code has {f.q}^{k} words, over budget {budget}")
    if f.q == 2 and length <= 64:
        packed = _packed_generator_columns(dual.T)  # one int per dual basis row
        words = np.zeros(1, dtype=np.uint64)
        for g in packed:
            words = np.concatenate([words, words ^ g])
        return int(np.bitwise_count(words[1:]).min())
    words = span_rows(dual, f)
    return int((words[1:] != 0).sum(axis=1).min())
