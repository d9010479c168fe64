"""Certifying the degree of a cubature formula.

Three strategies:

exhaustive  every monomial of degree <= t against the exact moment
sampled     a seeded, degree-stratified random subset plus a fixed battery
structural  factor gates + array strength + symmetry preconditions
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass

import numpy as np

from .arrays import BudgetExceeded, verify_strength
from .formula import CubatureFormula
from .thinning import (
    ThinningError,
    check_preconditions,
    coordinate_rules_ok,
    thinned_points,
)

EXHAUSTIVE_TOL = 1e-10
SAMPLED_TOL = 1e-8
VERIFY_BUDGET = int(float(os.environ.get("CODECUBATURE_VERIFY_BUDGET", "1e10")))
STRUCTURAL_SAMPLES = 100_000

# 1-D measure tag and coordinate scale whose product gives each region
PRODUCT_MEASURES = {
    "cube": ("uniform", 1.0),
    "gaussian": ("gaussian", math.sqrt(0.5)),
    "exponential-orthant": ("exponential", 1.0),
}


class VerificationError(ValueError):
    pass


class StructuralRefused(VerificationError):
    pass


@dataclass(frozen=True)
class Certificate:
    strategy: str
    degree: int
    passes: bool
    max_deviation: float
    monomials: int
    tolerance: float
    count: int | None = None
    seed: int | None = None
    worst: tuple = ()
    detail: str = ""

    def __post_init__(self):
        if self.passes != (self.max_deviation <= self.tolerance):
            raise VerificationError("certificate pass flag disagrees with its deviation")

    @property
    def worst_monomial(self) -> str:
        return format_monomial(self.worst)

    def summary(self) -> str:
        parts = [
            self.strategy,
            f"degree={self.degree}",
            f"pass={'true' if self.passes else 'false'}",
            f"max-deviation={self.max_deviation!r}",
            f"monomials={self.monomials}",
            f"tolerance={self.tolerance!r}",
        ]
        if self.count is not None:
            parts.append(f"count={self.count}")
        if self.seed is not None:
            parts.append(f"seed={self.seed}")
        if self.worst:
            parts.append(f"worst={self.worst_monomial}")
        return " ".join(parts)


def format_monomial(worst) -> str:
    if not worst:
        return "1"
    return "*".join(f"x{i}^{e}" if e > 1 else f"x{i}" for i, e in worst)


def _sparse(indices) -> tuple:
    counts: dict[int, int] = {}
    for i in indices:
        counts[int(i)] = counts.get(int(i), 0) + 1
    return tuple(sorted(counts.items()))


class _Moments:
    """Exact moments as floats, keyed by the exponent partition (all measures are exchangeable)."""

    def __init__(self, measure):
        self.measure = measure
        self.cache: dict[tuple, float] = {}

    def __call__(self, partition: tuple) -> float:
        key = tuple(sorted(partition, reverse=True))
        v = self.cache.get(key)
        if v is None:
            v = float(self.measure.moment(key))
            self.cache[key] = v
        return v


def _exact_sum(formula: CubatureFormula, indices) -> float:
    prod = np.ones(formula.size)
    for i in indices:
        prod = prod * formula.points[:, i]
    return math.fsum(formula.weights * prod)


class _Tracker:
    def __init__(self, formula, moments, tol):
        self.formula, self.moments, self.tol = formula, moments, tol
        self.worst_dev, self.worst = 0.0, ()
        self.count = 0

    def add(self, indices, got: float, partition: tuple):
        self.count += 1
        exact = self.moments(partition)
        scale = max(1.0, abs(exact))
        dev = abs(got - exact) / scale
        if dev > self.tol / 4:
            # recheck with compensated summation before blaming the formula
            dev = abs(_exact_sum(self.formula, indices) - exact) / scale
        if dev > self.worst_dev:
            self.worst_dev, self.worst = dev, _sparse(indices)

    def add_many(self, prefix, got, exact, parts):
        """Siblings prefix + (j,) for j = 0..len(got)-1."""
        dev = np.abs(got - exact) / np.maximum(1.0, np.abs(exact))
        suspects = set(np.nonzero(dev > self.tol / 4)[0].tolist())
        j = int(np.argmax(dev))
        if dev[j] > self.worst_dev:
            suspects.add(j)
        self.count += len(got) - len(suspects)
        for j in sorted(suspects):
            self.add(prefix + (j,), float(got[j]), parts[j])


def exhaustive_cost(formula: CubatureFormula, t: int) -> int:
    return math.comb(formula.dimension + t, t) * formula.size


def verify_exhaustive(formula: CubatureFormula, t: int | None = None, tol: float = EXHAUSTIVE_TOL,
                      budget: int | None = None) -> Certificate:
    """Check every monomial of degree <= t.

    Monomials are walked depth-first with indices in non-increasing order
    (colex within a degree); siblings share the prefix product and are
    evaluated together by one matrix-vector product.
    """
    t = formula.degree if t is None else t
    budget = VERIFY_BUDGET if budget is None else budget
    cost = exhaustive_cost(formula, t)
    if cost > budget:
        raise BudgetExceeded(f"exhaustive verification costs {cost:.3g} > budget {budget:.3g}")
    pts, w = formula.points, formula.weights
    d = formula.dimension
    moments = _Moments(formula.measure)
    tr = _Tracker(formula, moments, tol)
    tr.add((), math.fsum(w), ())

    def visit(vec, prefix, counts):
        # vec = w * prod(prefix columns); prefix indices are non-increasing
        hi = prefix[-1] if prefix else d - 1
        vals = vec @ pts[:, : hi + 1]
        fresh = counts + (1,)
        # when hi == 0 every child repeats the last index
        exact = np.full(hi + 1, moments(fresh) if hi > 0 or not prefix else 0.0)
        parts = [fresh] * (hi + 1)
        if prefix:
            parts[hi] = counts[:-1] + (counts[-1] + 1,)
            exact[hi] = moments(parts[hi])
        tr.add_many(prefix, vals, exact, parts)
        if len(prefix) + 1 < t:
            for j in range(hi + 1):
                visit(vec * pts[:, j], prefix + (j,), parts[j])

    if t >= 1:
        visit(w.copy(), (), ())
    return Certificate("exhaustive", t, tr.worst_dev <= tol, tr.worst_dev, tr.count, tol, worst=tr.worst)


def _sample_monomials(d: int, t: int, count: int, rng: np.random.Generator):
    """Uniform monomials per total degree, allocated in proportion to the degree's share."""
    sizes = [math.comb(d + k - 1, k) for k in range(t + 1)]
    total = sum(sizes)
    out = []
    for k in range(1, t + 1):
        share = max(1, round(count * sizes[k] / total))
        if share >= sizes[k]:
            out.extend(itertools.combinations_with_replacement(range(d), k))
            continue
        for _ in range(share):
            # stars and bars: a sorted k-subset of range(d + k - 1) shifted down
            pos = np.sort(rng.choice(d + k - 1, size=k, replace=False))
            out.append(tuple(int(p - i) for i, p in enumerate(pos)))
    return out


def _battery(d: int, t: int):
    out = [(i,) * t for i in range(d)]
    if t >= 3:
        idx = sorted(set(np.linspace(0, d - 1, min(d, 8)).round().astype(int).tolist()))
        for i, j in itertools.permutations(idx, 2):
            out.append((i, i) + (j,) * (t - 2))
    return out


def _evaluate(formula, monomials):
    """Weighted sums for a list of index tuples, batched by degree."""
    pts, w = formula.points, formula.weights
    results = np.empty(len(monomials))
    by_deg: dict[int, list[int]] = {}
    for pos, m in enumerate(monomials):
        by_deg.setdefault(len(m), []).append(pos)
    for k, positions in by_deg.items():
        if k == 0:
            results[positions] = math.fsum(w)
            continue
        idx = np.array([monomials[p] for p in positions], dtype=np.int64)
        batch = max(1, 20_000_000 // max(1, formula.size * k))
        for s in range(0, len(idx), batch):
            block = idx[s : s + batch]
            prod = np.prod(pts[:, block], axis=2)
            results[np.array(positions[s : s + batch])] = w @ prod
    return results


def verify_sampled(formula: CubatureFormula, t: int | None = None, tol: float = SAMPLED_TOL,
                   count: int = 10_000, seed: int = 0) -> Certificate:
    """Check ``count`` random monomials (stratified by degree) plus a fixed battery."""
    if count < 1:
        raise VerificationError("count must be positive")
    t = formula.degree if t is None else t
    rng = np.random.default_rng(seed)
    d = formula.dimension
    monomials = [()] + _sample_monomials(d, t, count, rng) + _battery(d, t)
    vals = _evaluate(formula, monomials)
    tr = _Tracker(formula, _Moments(formula.measure), tol)
    for m, v in zip(monomials, vals):
        part = tuple(e for _, e in _sparse(m))
        tr.add(m, float(v), part)
    return Certificate("sampled", t, tr.worst_dev <= tol, tr.worst_dev, tr.count, tol,
                       count=count, seed=seed, worst=tr.worst)


def _coordinate_convolution_matches(record, measure_tag: str, scale: float) -> None:
    rules = record.coordinate_rules
    if len(rules) != record.dim:
        raise ThinningError("need one coordinate rule per output coordinate")
    by_coord: dict[int, list] = {}
    for fl in record.factors:
        if len(fl.coords) != 1:
            raise ThinningError("structural check supports one-coordinate factors")
        by_coord.setdefault(fl.coords[0], []).append(fl.labels[:, 0])
    for c, rule in enumerate(rules):
        if rule.measure != measure_tag:
            raise ThinningError(f"coordinate rule {c} is for {rule.measure}, need {measure_tag}")
        if not np.isclose(record.scale, scale, rtol=0, atol=1e-15):
            raise ThinningError(f"scale {record.scale} does not map {measure_tag} onto the target")
        sums = np.zeros(1)
        for lab in by_coord.get(c, []):
            sums = (sums[:, None] + lab[None, :]).ravel()
        a, b = np.sort(sums), np.sort(rule.points)
        if a.shape != b.shape or not np.allclose(a, b, rtol=0, atol=1e-14):
            raise ThinningError(f"factors on coordinate {c} do not convolve to the coordinate rule")


def verify_structural(formula: CubatureFormula, t: int | None = None,
                      samples: int = STRUCTURAL_SAMPLES, seed: int = 0) -> Certificate:
    """Certify a thinned formula from its construction record.

    (i) the coordinate rules pass their degree gates and their convolution
    is the product formula for the target measure; (ii) the array passes
    a fresh strength check; (iii) symmetric-mode preconditions hold.  The
    formula's points are also re-derived from the record and compared.
    """
    t = formula.degree if t is None else t
    region = formula.measure.region
    if region == "cross-polytope":
        raise StructuralRefused("structural certification is not available for cross-polytope formulas")
    record = formula.provenance.get("thinning")
    if record is None:
        raise VerificationError("formula has no thinning record; structural verification needs one")
    if region not in PRODUCT_MEASURES:
        raise StructuralRefused(f"no product structure recorded for {region}")
    tag, scale = PRODUCT_MEASURES[region]

    def fail(step, msg):
        return Certificate("structural", t, False, math.inf, 0, 0.0, detail=f"step {step}: {msg}")

    try:
        gate_dev = coordinate_rules_ok(record.coordinate_rules, t)
        _coordinate_convolution_matches(record, tag, scale)
    except (ThinningError, ValueError) as exc:
        return fail("i", str(exc))
    array = record.array
    try:
        symmetric, need = check_preconditions(record.factors, array, t)
    except ThinningError as exc:
        return fail("iii", str(exc))
    try:
        report = verify_strength(array, need, "exhaustive")
    except BudgetExceeded:
        report = verify_strength(array, need, "sampled", count=samples, seed=seed)
    if not report.passes:
        return fail("ii", f"array fails strength {need} at {report.failing}")
    pts = thinned_points(record.factors, array, record.dim, record.scale)
    from .formula import merge_points  # local: avoids a cycle at import time

    pts, w = merge_points(pts, np.full(array.size, 1.0 / array.size))
    if not (np.array_equal(pts, formula.points) and np.allclose(w, formula.weights, rtol=1e-13, atol=0)):
        return fail("iv", "points do not match the recorded construction")
    detail = (
        f"array {array.provenance} strength {need} ({report.mode}, {report.subsets_checked} subsets)"
        + (", symmetric labeling" if symmetric else "")
    )
    return Certificate("structural", t, True, gate_dev, len(record.coordinate_rules), 1e-12,
                       count=None if report.mode == "exhaustive" else samples,
                       seed=None if report.mode == "exhaustive" else seed, detail=detail)


def certify_formula(formula: CubatureFormula, strategy: str = "auto", tol: float | None = None,
                    count: int = 10_000, seed: int = 0) -> list[Certificate]:
    """Run a strategy; ``auto`` is exhaustive when affordable, else structural + sampled."""
    t = formula.degree
    if strategy == "exhaustive":
        return [verify_exhaustive(formula, t, tol or EXHAUSTIVE_TOL)]
    if strategy == "sampled":
        return [verify_sampled(formula, t, tol or SAMPLED_TOL, count, seed)]
    if strategy == "structural":
        return [verify_structural(formula, t)]
    if strategy != "auto":
        raise VerificationError(f"unknown strategy {strategy!r}")
    if exhaustive_cost(formula, t) <= VERIFY_BUDGET:
        return [verify_exhaustive(formula, t, tol or EXHAUSTIVE_TOL)]
    certs = []
    if "thinning" in formula.provenance:
        try:
            certs.append(verify_structural(formula, t))
        except StructuralRefused:
            pass
    certs.append(verify_sampled(formula, t, tol or SAMPLED_TOL, count, seed))
    return certs
