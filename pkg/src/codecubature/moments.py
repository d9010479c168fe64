"""Target measures, their exact normalised moments, and reference samplers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

REGIONS = (
    "cube",
    "cubical-shell",
    "gaussian",
    "sphere",
    "ball",
    "spherical-shell",
    "simplex",
    "cross-polytope",
    "exponential-orthant",
    "radial-exponential",
)
SHELLS = ("cubical-shell", "spherical-shell")
CENTRALLY_SYMMETRIC = ("cube", "cubical-shell", "gaussian", "sphere", "ball", "spherical-shell", "cross-polytope", "radial-exponential")
MAX_MOMENT_DEGREE = 64


class MeasureError(ValueError):
    pass


@dataclass(frozen=True)
class MeasureSpec:
    """A normalised measure on R^n (simplex points use n+1 barycentric coordinates).

    The Gaussian is exp(-|x|^2) normalised, i.e. variance 1/2 per coordinate.
    """

    region: str
    n: int
    r: Fraction | None = None

    def __post_init__(self):
        if self.region not in REGIONS:
            raise MeasureError(f"unknown region {self.region!r}; choose from {', '.join(REGIONS)}")
        if self.n < 1:
            raise MeasureError("dimension must be positive")
        if self.region in SHELLS:
            if self.r is None:
                raise MeasureError(f"{self.region} needs an inner ratio r")
            r = Fraction(self.r).limit_denominator(10**12) if isinstance(self.r, float) else Fraction(self.r)
            if not 0 < r < 1:
                raise MeasureError("shell ratio must satisfy 0 < r < 1")
            object.__setattr__(self, "r", r)
        elif self.r is not None:
            raise MeasureError(f"{self.region} takes no shell ratio")

    @property
    def coords(self) -> int:
        """Number of coordinates of a point."""
        return self.n + 1 if self.region == "simplex" else self.n

    @property
    def centrally_symmetric(self) -> bool:
        return self.region in CENTRALLY_SYMMETRIC

    @property
    def label(self) -> str:
        return f"{self.region}(n={self.n}" + (f", r={self.r})" if self.r is not None else ")")

    def moment(self, k) -> Fraction:
        return exact_moment(self, tuple(int(v) for v in k))

    def support(self, pts: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        """Per point: 'interior', 'boundary' or 'exterior'."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        reg = self.region
        if reg in ("gaussian", "exponential-orthant", "radial-exponential"):
            if reg == "exponential-orthant":
                m = pts.min(axis=1)
                return _classify(m, 0.0, None, tol)
            return np.full(len(pts), "interior", dtype=object)
        if reg == "cube":
            return _classify(1.0 - np.abs(pts).max(axis=1), 0.0, None, tol)
        if reg == "cubical-shell":
            inf = np.abs(pts).max(axis=1)
            return _two_sided(inf, float(self.r), 1.0, tol)
        if reg == "sphere":
            # on the sphere means on the boundary of the ball it bounds
            norm = np.linalg.norm(pts, axis=1)
            out = np.full(len(pts), "exterior", dtype=object)
            out[np.abs(norm - 1.0) <= tol] = "boundary"
            return out
        if reg == "ball":
            return _classify(1.0 - np.linalg.norm(pts, axis=1), 0.0, None, tol)
        if reg == "spherical-shell":
            return _two_sided(np.linalg.norm(pts, axis=1), float(self.r), 1.0, tol)
        if reg == "cross-polytope":
            return _classify(1.0 - np.abs(pts).sum(axis=1), 0.0, None, tol)
        if reg == "simplex":
            on_plane = np.abs(pts.sum(axis=1) - 1.0) <= tol * pts.shape[1]
            out = _classify(pts.min(axis=1), 0.0, None, tol)
            out[~on_plane] = "exterior"
            return out
        raise MeasureError(reg)


def _classify(margin, lo, hi, tol):
    out = np.full(len(margin), "interior", dtype=object)
    out[margin <= tol] = "boundary"
    out[margin < -tol] = "exterior"
    return out


def _two_sided(v, lo, hi, tol):
    return _classify(np.minimum(v - lo, hi - v), 0.0, None, tol)


def _double_factorial(k: int) -> int:
    return math.prod(range(k, 0, -2)) if k > 0 else 1


def _sphere(n: int, k: tuple) -> Fraction:
    # E[prod x_i^{k_i}] on S^{n-1}: prod (k_i-1)!! / prod_{j<|k|/2} (n+2j)
    total = sum(k)
    num = math.prod(_double_factorial(ki - 1) for ki in k)
    den = math.prod(n + 2 * j for j in range(total // 2))
    return Fraction(num, den)


def _shell_factor(n: int, d: int, r: Fraction) -> Fraction:
    # E[rho^d] for density rho^{n-1} on [r, 1]
    return Fraction(n, n + d) * (1 - r ** (n + d)) / (1 - r**n)


@lru_cache(maxsize=1 << 16)
def exact_moment(measure: MeasureSpec, k: tuple) -> Fraction:
    """Exact normalised moment E[prod x_i^{k_i}]; k may be shorter than the coordinate count."""
    if any(v < 0 for v in k):
        raise MeasureError("negative exponent")
    if len(k) > measure.coords:
        raise MeasureError(f"multi-index has {len(k)} entries for {measure.coords} coordinates")
    total = sum(k)
    if total > MAX_MOMENT_DEGREE:
        raise MeasureError(f"total degree {total} exceeds {MAX_MOMENT_DEGREE}")
    k = tuple(v for v in k if v)
    n = measure.n
    reg = measure.region
    if reg == "exponential-orthant":
        return Fraction(math.prod(math.factorial(v) for v in k))
    if reg == "simplex":
        return Fraction(math.factorial(n) * math.prod(math.factorial(v) for v in k), math.factorial(n + total))
    if any(v % 2 for v in k):
        return Fraction(0)
    if reg == "cube":
        return Fraction(1, math.prod(v + 1 for v in k))
    if reg == "cubical-shell":
        return Fraction(1, math.prod(v + 1 for v in k)) * (1 - measure.r ** (n + total)) / (1 - measure.r**n)
    if reg == "gaussian":
        return Fraction(math.prod(_double_factorial(v - 1) for v in k), 2 ** (total // 2))
    if reg == "cross-polytope":
        return Fraction(math.factorial(n) * math.prod(math.factorial(v) for v in k), math.factorial(n + total))
    sph = _sphere(n, k)
    if reg == "sphere":
        return sph
    if reg == "ball":
        return sph * Fraction(n, n + total)
    if reg == "spherical-shell":
        return sph * _shell_factor(n, total, measure.r)
    if reg == "radial-exponential":
        return sph * Fraction(math.factorial(n + total - 1), math.factorial(n - 1))
    raise MeasureError(reg)


def radial_moments(measure: MeasureSpec, count: int) -> list[Fraction]:
    """Moments E[rho^j], j < count, of the radial part of a spherically symmetric measure."""
    n = measure.n
    if measure.region == "ball":
        return [Fraction(n, n + j) for j in range(count)]
    if measure.region == "spherical-shell":
        return [_shell_factor(n, j, measure.r) for j in range(count)]
    if measure.region == "radial-exponential":
        return [Fraction(math.factorial(n + j - 1), math.factorial(n - 1)) for j in range(count)]
    if measure.region == "cubical-shell":
        # radial variable is the sup-norm scale rho with density ~ rho^{n-1} on [r, 1]
        return [_shell_factor(n, j, measure.r) for j in range(count)]
    raise MeasureError(f"{measure.region} has no radial factor")


def sample(measure: MeasureSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    """Independent draws from the measure (for Monte Carlo cross-checks)."""
    n = measure.n
    reg = measure.region
    if reg == "cube":
        return rng.uniform(-1, 1, (size, n))
    if reg == "gaussian":
        return rng.normal(0, math.sqrt(0.5), (size, n))
    if reg == "exponential-orthant":
        return rng.exponential(1.0, (size, n))
    if reg == "simplex":
        e = rng.exponential(1.0, (size, n + 1))
        return e / e.sum(axis=1, keepdims=True)
    if reg == "cross-polytope":
        e = rng.exponential(1.0, (size, n + 1))
        return (e / e.sum(axis=1, keepdims=True))[:, :n] * rng.choice((-1.0, 1.0), (size, n))
    g = rng.normal(size=(size, n))
    direction = g / np.linalg.norm(g, axis=1, keepdims=True)
    if reg == "sphere":
        return direction
    if reg == "ball":
        return direction * rng.uniform(size=(size, 1)) ** (1.0 / n)
    if reg == "radial-exponential":
        return direction * rng.gamma(n, 1.0, (size, 1))
    if reg in SHELLS:
        r = float(measure.r)
        u = rng.uniform(size=(size, 1))
        rho = (r**n + u * (1 - r**n)) ** (1.0 / n)
        if reg == "spherical-shell":
            return direction * rho
        # uniform point on the cube surface, scaled radially
        pts = rng.uniform(-1, 1, (size, n))
        face = rng.integers(0, n, size)
        pts[np.arange(size), face] = rng.choice((-1.0, 1.0), size)
        return pts * rho
    raise MeasureError(reg)
