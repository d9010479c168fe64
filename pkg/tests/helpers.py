"""Shared test utilities."""

from __future__ import annotations

import itertools

import numpy as np


def monomials(dim: int, t: int):
    """Exponent tuples of total degree <= t in dim variables."""
    out = []
    for d in range(t + 1):
        for combo in itertools.combinations_with_replacement(range(dim), d):
            k = [0] * dim
            for i in combo:
                k[i] += 1
            out.append(tuple(k))
    return out


def monomial_sums(points, weights, exps) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    w = np.asarray(weights, dtype=float)
    out = np.empty(len(exps))
    for j, k in enumerate(exps):
        vals = np.ones(len(pts))
        for i, e in enumerate(k):
            if e:
                vals = vals * pts[:, i] ** e
        out[j] = w @ vals
    return out


def full_product_rows(q: int, length: int) -> np.ndarray:
    return np.array(list(itertools.product(range(q), repeat=length)), dtype=np.uint8)


def oracle_array(q: int, length: int, t: int):
    """An array of strength >= t with the given length (full product when t >= length)."""
    from codecubature.arrays import OrthogonalArray, bch_dual_array, project_array, verify_strength

    if t >= length:
        return OrthogonalArray(q, full_product_rows(q, length), strength=length)
    m = 1
    while q**m < length or t >= q**m:
        m += 1
    arr = project_array(bch_dual_array(q, m, t), range(length))
    assert verify_strength(arr, t, "exhaustive").passes
    return arr


def thinning_oracle_deviation(q: int, length: int, t: int, seed: int, dim: int = 2) -> float:
    """Largest relative gap between thinned and full convolution over degree <= t monomials.

    Each factor is a random q-point equal-weight formula in R^dim.
    """
    from codecubature.thinning import FactorLabeling, thinned_points

    rng = np.random.default_rng(seed)
    factors = [FactorLabeling(i, tuple(range(dim)), rng.uniform(-1, 1, (q, dim))) for i in range(length)]
    arr = oracle_array(q, length, t)
    thin = thinned_points(factors, arr, dim)
    full = thinned_points(factors, type(arr)(q, full_product_rows(q, length), strength=length), dim)
    exps = monomials(dim, t)
    a = monomial_sums(thin, np.full(len(thin), 1.0 / len(thin)), exps)
    b = monomial_sums(full, np.full(len(full), 1.0 / len(full)), exps)
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))


ACCEPTANCE_LINES: list[str] = []


class criterion:
    """Context manager that records one PASS/FAIL line for an acceptance criterion."""

    def __init__(self, label: str):
        self.label = label
        self.detail = ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            line = f"PASS  {self.label}: {self.detail}"
        else:
            msg = str(exc).splitlines()[0] if str(exc) else exc_type.__name__
            line = f"FAIL  {self.label}: {self.detail} [{exc_type.__name__}: {msg[:200]}]"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return False
