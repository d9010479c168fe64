"""The cubature formula container."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .moments import MeasureSpec


class FormulaError(ValueError):
    pass


def merge_points(points: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Merge bit-identical points, summing weights; first-occurrence order is kept."""
    points = np.ascontiguousarray(points, dtype=float)
    if len(points) == 0:
        return points, weights
    # +0.0 and -0.0 are the same point
    points = points + 0.0
    keys = points.view(np.dtype((np.void, points.dtype.itemsize * points.shape[1]))).ravel()
    _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    if len(first) == len(points):
        return points, weights
    summed = np.zeros(len(first))
    np.add.at(summed, inverse, weights)
    order = np.argsort(first, kind="stable")
    return points[first[order]], summed[order]


@dataclass(frozen=True, eq=False)
class CubatureFormula:
    """Points and weights claimed exact to ``degree`` for ``measure``.

    Quality flags are computed from the data on access.  ``provenance``
    holds whatever the construction wants recorded (parameters, the
    thinning record used by structural verification, exact weights).
    """

    measure: MeasureSpec
    points: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    degree: int
    provenance: dict = field(default_factory=dict, repr=False)
    certificates: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        pts = np.ascontiguousarray(np.atleast_2d(np.asarray(self.points, dtype=float)))
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=float).ravel())
        if pts.shape[0] != w.shape[0]:
            raise FormulaError(f"{pts.shape[0]} points but {w.shape[0]} weights")
        if pts.shape[1] != self.measure.coords:
            raise FormulaError(f"points have {pts.shape[1]} coordinates, measure expects {self.measure.coords}")
        if abs(w.sum() - 1.0) > 1e-12 * max(1, len(w)):
            raise FormulaError(f"weights sum to {w.sum()!r}")
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def equal_weight(self) -> bool:
        return bool(np.all(self.weights == self.weights[0]))

    @property
    def positive(self) -> bool:
        return bool(self.weights.min() > 0)

    @property
    def support(self) -> str:
        """interior, boundary or exterior (worst point wins).

        On the sphere, points on the sphere count as interior (relative
        topology of the support); see :attr:`support_general`.
        """
        cls = self.measure.support(self.points)
        if self.measure.region == "sphere":
            return "exterior" if np.any(cls == "exterior") else "interior"
        if np.any(cls == "exterior"):
            return "exterior"
        if np.any(cls == "boundary"):
            return "boundary"
        return "interior"

    @property
    def support_general(self) -> str:
        """Same classification in the ambient topology of R^n."""
        if self.measure.region == "sphere":
            return "exterior" if self.support == "exterior" else "boundary"
        return self.support

    @property
    def flags(self) -> dict:
        return {
            "equal-weight": self.equal_weight,
            "positive": self.positive,
            "support": self.support,
            "support-general": self.support_general,
        }

    def with_degree(self, t: int) -> "CubatureFormula":
        return CubatureFormula(self.measure, self.points, self.weights, t, dict(self.provenance), [])
