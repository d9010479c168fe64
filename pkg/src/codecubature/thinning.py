"""Thinning a convolution of equal-weight formulas by an orthogonal array.

Factor i is a q-point equal-weight formula whose points are labelled by
GF(q).  The full convolution has one point per vector in GF(q)^l; the
thinned formula keeps the vectors that are rows of the array.  Strength t
makes the two agree on all polynomials of degree <= t.  For odd t and a
centrally symmetric setup, strength t - 1 is enough when either

* q is odd, the labelling commutes with negation and the array is closed
  under negation, or
* q is even, adding 1 in GF(q) negates the label and the array is closed
  under adding the all-ones vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .arrays import OrthogonalArray, _row_keys
from .finite import field_of_order
from .quad1d import Quadrature1D

MODES = ("none", "odd-q-negation", "even-q-add-one")


class ThinningError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FactorLabeling:
    """labels[a] is the factor point attached to field element a."""

    index: int
    coords: tuple
    labels: np.ndarray = field(repr=False)
    mode: str = "none"

    def __post_init__(self):
        lab = np.asarray(self.labels, dtype=float)
        if lab.ndim == 1:
            lab = lab[:, None]
        if lab.shape[1] != len(self.coords):
            raise ThinningError("label width does not match the coordinate block")
        if self.mode not in MODES:
            raise ThinningError(f"unknown labeling mode {self.mode!r}")
        lab.setflags(write=False)
        object.__setattr__(self, "labels", lab)
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    @property
    def q(self) -> int:
        return self.labels.shape[0]

    def symmetry_holds(self) -> bool:
        f = field_of_order(self.q)
        elems = np.arange(self.q)
        if self.mode == "odd-q-negation":
            if self.q % 2 == 0:
                return False
            return bool(np.array_equal(self.labels[f.neg(elems)], -self.labels))
        if self.mode == "even-q-add-one":
            if self.q % 2:
                return False
            return bool(np.array_equal(self.labels[f.add(elems, 1)], -self.labels))
        return True


def symmetric_labels(values, q: int) -> tuple[np.ndarray, str]:
    """Label a symmetric q-point multiset of reals so negation matches field symmetry.

    Odd q: labels(-a) = -labels(a).  Even q: labels(a + 1) = -labels(a).
    """
    vals = np.sort(np.asarray(values, dtype=float))
    if len(vals) != q:
        raise ThinningError(f"need {q} values, got {len(vals)}")
    if not np.array_equal(vals, -vals[::-1]):
        raise ThinningError("multiset is not symmetric")
    f = field_of_order(q)
    elems = np.arange(q)
    partner = f.neg(elems) if q % 2 else f.add(elems, 1)
    pos = vals[vals > 0][::-1]
    n_zero_pairs = (int(np.sum(vals == 0)) - (q % 2)) // 2
    mags = list(pos) + [0.0] * n_zero_pairs
    labels = np.zeros(q)
    k = 0
    for a in range(q):
        b = int(partner[a])
        if b < a or b == a:
            continue
        labels[a], labels[b] = mags[k], -mags[k]
        k += 1
    labels += 0.0
    mode = "odd-q-negation" if q % 2 else "even-q-add-one"
    return labels, mode


def closed_under_negation(array: OrthogonalArray) -> bool:
    f = array.field
    neg = f.neg(array.rows.astype(np.int64)).astype(np.uint8)
    return bool(np.array_equal(np.sort(_row_keys(array.rows)), np.sort(_row_keys(neg))))


def symmetric_compatible(array: OrthogonalArray, factors) -> bool:
    """Whether the odd-degree refinement applies to this (array, factors) pair."""
    if not factors or any(fl.mode == "none" or not fl.symmetry_holds() for fl in factors):
        return False
    if array.q % 2:
        return closed_under_negation(array)
    return array.closed_under_all_ones()


def required_strength(t: int, symmetric: bool) -> int:
    return t - 1 if symmetric and t % 2 == 1 else t


@dataclass(frozen=True, eq=False)
class ThinningRecord:
    """Everything structural verification needs to re-derive a thinned formula.

    ``coordinate_rules`` are 1-D formulas whose product is the full
    convolution, each with the affine scale mapping its measure onto the
    target's coordinate marginal.
    """

    factors: tuple
    array: OrthogonalArray
    t: int
    dim: int
    coordinate_rules: tuple = ()
    scale: float = 1.0
    symmetric: bool = False

    @property
    def strength_needed(self) -> int:
        return min(required_strength(self.t, self.symmetric), self.array.length)


def thinned_points(factors, array: OrthogonalArray, dim: int, scale: float = 1.0) -> np.ndarray:
    """Row-by-row sum of the labelled factor points (row order kept)."""
    if len(factors) != array.length:
        raise ThinningError(f"{len(factors)} factors for an array of length {array.length}")
    rows = array.rows
    pts = np.zeros((array.size, dim))
    for col, fl in enumerate(factors):
        if fl.q != array.q:
            raise ThinningError(f"factor {fl.index} has {fl.q} points, array alphabet is {array.q}")
        if max(fl.coords) >= dim:
            raise ThinningError(f"factor {fl.index} writes outside dimension {dim}")
        pts[:, list(fl.coords)] += fl.labels[rows[:, col]]
    if scale != 1.0:
        pts *= scale
    return pts


def check_preconditions(factors, array: OrthogonalArray, t: int) -> tuple[bool, int]:
    """Return (symmetric, strength needed) or raise if the array is too weak."""
    if array.strength is None:
        raise ThinningError("array strength has not been verified")
    for fl in factors:
        if not fl.symmetry_holds():
            raise ThinningError(f"factor {fl.index} violates its {fl.mode} labeling")
    symmetric = symmetric_compatible(array, factors)
    need = min(required_strength(t, symmetric), array.length)
    if array.strength < need:
        raise ThinningError(
            f"array strength {array.strength} < {need} needed for degree {t}"
            + ("" if symmetric else " without symmetric labeling")
        )
    return symmetric, need


def coordinate_rules_ok(rules, t: int) -> float:
    """Worst gate deviation over the coordinate rules (raises on failure)."""
    worst = 0.0
    for rule in rules:
        if not isinstance(rule, Quadrature1D):
            raise ThinningError("coordinate rules must be Quadrature1D")
        if rule.degree < t:
            raise ThinningError(f"coordinate rule has degree {rule.degree} < {t}")
        rule.gate()
        worst = max(worst, max(rule.deviation(k) for k in range(t + 1)))
    return worst
