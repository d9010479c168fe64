"""One-dimensional building blocks.

Measures understood by :class:`Quadrature1D`:

``uniform``      normalised Lebesgue measure on [-1, 1]
``gaussian``     standard normal (unit variance)
``exponential``  e^{-x} dx on [0, inf)
``moments``      any functional given by its moment list
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist

import numpy as np

GATE_TOL = 1e-12


class QuadratureError(ValueError):
    pass


class NoSolution(QuadratureError):
    pass


def measure_moment(measure: str, k: int, moments=None) -> Fraction:
    if measure == "uniform":
        return Fraction(0) if k % 2 else Fraction(1, k + 1)
    if measure == "gaussian":
        return Fraction(0) if k % 2 else Fraction(math.prod(range(k - 1, 0, -2)))
    if measure == "exponential":
        return Fraction(math.factorial(k))
    if measure == "moments":
        return Fraction(moments[k])
    raise QuadratureError(f"unknown measure {measure!r}")


@dataclass(frozen=True, eq=False)
class Quadrature1D:
    measure: str
    points: np.ndarray
    weights: np.ndarray
    degree: int
    pairs: tuple[float, ...] | None = None
    moments: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        w = np.array(self.weights, dtype=float)
        pts.setflags(write=False)
        w.setflags(write=False)
        if pts.shape != w.shape or pts.ndim != 1:
            raise QuadratureError("points and weights must be matching 1-d arrays")
        if abs(w.sum() - 1.0) > 1e-14 * max(1, len(w)):
            raise QuadratureError(f"weights sum to {w.sum()!r}, not 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def equal_weight(self) -> bool:
        return bool(np.all(self.weights == self.weights[0]))

    @property
    def symmetric(self) -> bool:
        a = np.sort(self.points)
        return bool(np.allclose(a, -a[::-1], rtol=0, atol=1e-14))

    def moment(self, k: int) -> Fraction:
        return measure_moment(self.measure, k, self.moments)

    def deviation(self, k: int) -> float:
        exact = float(self.moment(k))
        got = math.fsum(self.weights * self.points**k)
        return abs(got - exact) / max(1.0, abs(exact))

    def exact_to(self, t: int, tol: float = GATE_TOL) -> bool:
        return all(self.deviation(k) <= tol for k in range(t + 1))

    def gate(self, tol: float = GATE_TOL) -> "Quadrature1D":
        """Raise unless the claimed degree holds; returns self for chaining."""
        for k in range(self.degree + 1):
            dev = self.deviation(k)
            if dev > tol:
                raise QuadratureError(
                    f"{self.measure} rule fails moment {k} (deviation {dev:.3g}) at claimed degree {self.degree}"
                )
        return self


# ---------------------------------------------------------------------------
# convolutional Chebyshev-type rules on [-1, 1]

def chebyshev_polynomial(s: int) -> list[Fraction]:
    """Coefficients of x^s - x^(s-1)/3 + x^(s-2)/45 - ..., highest degree first."""
    coeffs = [Fraction(1)]
    denom = 1
    for k in range(1, s + 1):
        denom *= 4**k - 1
        coeffs.append(Fraction((-1) ** k, denom))
    return coeffs


def _peval(coeffs, x):
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def _pderiv(coeffs):
    n = len(coeffs) - 1
    return [c * (n - i) for i, c in enumerate(coeffs[:-1])]


def _prem(a, b):
    a = list(a)
    while len(a) >= len(b) and a:
        c = a[0] / b[0]
        for i in range(len(b)):
            a[i] -= c * b[i]
        a.pop(0)
    while a and a[0] == 0:
        a.pop(0)
    return a


def _sturm_chain(coeffs):
    chain = [list(coeffs), _pderiv(coeffs)]
    while True:
        r = _prem(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])
    return chain


def _sign_changes(chain, x):
    signs = [v for v in (_peval(p, x) for p in chain) if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def isolate_real_roots(coeffs, lo: Fraction, hi: Fraction, rel_width: Fraction = Fraction(1, 2**62)):
    """Roots of a squarefree polynomial in (lo, hi], isolated by Sturm counts and bisected exactly."""
    chain = _sturm_chain(coeffs)
    out = []
    stack = [(lo, hi, _sign_changes(chain, lo) - _sign_changes(chain, hi))]
    while stack:
        a, b, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            out.append(_bisect(coeffs, a, b, rel_width))
            continue
        mid = (a + b) / 2
        left = _sign_changes(chain, a) - _sign_changes(chain, mid)
        stack.append((a, mid, left))
        stack.append((mid, b, n - left))
    return sorted(out)


def _bisect(coeffs, a, b, rel_width):
    fa = _peval(coeffs, a)
    if _peval(coeffs, b) == 0:
        return b
    while b - a > rel_width * max(abs(a), abs(b), Fraction(1, 2**64)):
        mid = (a + b) / 2
        fm = _peval(coeffs, mid)
        if fm == 0:
            return mid
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b = mid
        # keep the denominators short
        a = Fraction(a).limit_denominator(2**200) if a.denominator > 2**400 else a
    return (a + b) / 2


def convolutional_chebyshev(s: int) -> Quadrature1D:
    """The 2^s-point equal-weight rule +-z_1 +- ... +- z_s on [-1, 1], degree 2s + 1.

    The squares z_i^2 are the roots of :func:`chebyshev_polynomial`.
    """
    if not 1 <= s <= 12:
        raise QuadratureError("s must be between 1 and 12")
    coeffs = chebyshev_polynomial(s)
    # Cauchy bound on the positive roots
    bound = 1 + max(abs(c) for c in coeffs[1:])
    roots = isolate_real_roots(coeffs, Fraction(0), Fraction(bound))
    if len(roots) != s:
        raise QuadratureError(f"found {len(roots)} real roots of Q for s={s}, expected {s}")
    if not all(0 < r < 1 for r in roots):
        raise QuadratureError("a root of Q lies outside (0, 1)")
    sq = np.array([float(r) for r in roots])
    z = np.sqrt(sq)
    z = _newton_polish(coeffs, z)
    z = np.sort(z)[::-1]
    pts = np.array([sum(sg * zi for sg, zi in zip(signs, z)) for signs in itertools.product((1, -1), repeat=s)])
    if np.any(np.abs(pts) >= 1):
        raise QuadratureError("convolutional rule is not interior")
    rule = Quadrature1D("uniform", pts, np.full(len(pts), 1.0 / len(pts)), 2 * s + 1, pairs=tuple(z))
    return rule.gate()


def _newton_polish(coeffs, z):
    # one Newton step on Q(z^2) in extended precision
    out = []
    for zi in z:
        x = Fraction(float(zi)) ** 2
        fx = _peval(coeffs, x)
        dfx = _peval(_pderiv(coeffs), x)
        if dfx != 0:
            x = x - fx / dfx
        out.append(math.sqrt(float(x)) if x > 0 else float(zi))
    return np.array(out)


def gauss_2point_uniform() -> Quadrature1D:
    r = 1 / math.sqrt(3)
    return Quadrature1D("uniform", np.array([-r, r]), np.array([0.5, 0.5]), 3, pairs=(r,)).gate()


def exp_ray_2point() -> Quadrature1D:
    return Quadrature1D("exponential", np.array([0.0, 2.0]), np.array([0.5, 0.5]), 2).gate()


# ---------------------------------------------------------------------------
# equal-weight rules by pattern search

def _compositions(total: int, parts: int):
    """Positive integer tuples of the given length summing to total, lexicographic."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


MAX_PATTERNS = 200


def _capped(pats, all_distinct):
    """First MAX_PATTERNS patterns, always ending with the all-distinct one."""
    if len(pats) > MAX_PATTERNS:
        pats = pats[:MAX_PATTERNS]
    if all_distinct not in pats:
        pats.append(all_distinct)
    return pats


def _gaussian_patterns(q: int):
    """(zeros, multiplicities of the +-a_i pairs), fewest distinct magnitudes first."""
    pats = []
    for zeros in range(q % 2, q + 1, 2):
        pairs = (q - zeros) // 2
        for d in range(1, pairs + 1):
            if math.comb(pairs - 1, d - 1) > MAX_PATTERNS:
                continue
            for mult in _compositions(pairs, d):
                pats.append((d, -zeros, mult))
    pats.sort()
    pats = [(-nz, mult) for d, nz, mult in pats]
    if q < 2:
        return pats
    return _capped(pats, (q % 2, (1,) * (q // 2)))


def _exponential_patterns(q: int):
    pats = []
    for d in range(1, q + 1):
        if math.comb(q - 1, d - 1) > MAX_PATTERNS:
            continue
        pats.extend(_compositions(q, d))
    return _capped(pats, (1,) * q)


def _solve_power_sums(mult, targets, seeds, max_iter=200):
    """Levenberg-Marquardt for sum_i mult_i u_i^j = targets[j-1], j = 1..J, with u = y^2 >= 0.

    All seeds run together; returns the converged solutions in seed order.
    """
    mult = np.asarray(mult, dtype=float)
    targets = np.asarray(targets, dtype=float)
    J = len(targets)
    powers = np.arange(1, J + 1)[:, None]
    scale = np.maximum(1.0, np.abs(targets))

    def residual(y):
        return ((mult * (y[:, None, :] ** 2) ** powers).sum(axis=2) - targets) / scale

    y = np.sqrt(np.maximum(np.array(seeds, dtype=float), 0.0))
    r = residual(y)
    lam = np.full(len(y), 1e-3)
    eye = np.eye(J)
    for it in range(max_iter):
        worst = np.max(np.abs(r), axis=1)
        live = (worst >= 1e-15) & (lam <= 1e12) & ~((it >= 50) & (worst > 1e-6))
        if not live.any():
            break
        yl, rl, ll = y[live], r[live], lam[live]
        jac = mult * 2 * powers * yl[:, None, :] ** (2 * powers - 1) / scale[:, None]
        a = jac @ jac.transpose(0, 2, 1) + ll[:, None, None] * eye
        step = -(jac.transpose(0, 2, 1) @ np.linalg.solve(a, rl[:, :, None]))[:, :, 0]
        trial = yl + step
        r2 = residual(trial)
        good = np.linalg.norm(r2, axis=1) < np.linalg.norm(rl, axis=1)
        yl[good], rl[good] = trial[good], r2[good]
        ll = np.where(good, np.maximum(ll / 3, 1e-15), ll * 4)
        y[live], r[live], lam[live] = yl, rl, ll
    ok = np.all(np.isfinite(y), axis=1) & (np.max(np.abs(r), axis=1) < 1e-13)
    return [y[i] ** 2 for i in np.flatnonzero(ok)]


def _quantile_seed(measure: str, d: int) -> np.ndarray:
    p = (np.arange(d) + 0.5) / d
    if measure == "exponential":
        return -np.log1p(-p)
    nd = NormalDist()
    return np.array([nd.inv_cdf((1 + pi) / 2) ** 2 for pi in p])[::-1]


@functools.lru_cache(maxsize=None)
def equal_weight_find(measure: str, q: int, t: int) -> Quadrature1D:
    """A q-point equal-weight rule of degree t for the Gaussian or exponential weight.

    Points may repeat.  Gaussian rules are symmetric: some zeros plus pairs
    +-a_i.  Multiplicity patterns are scanned by increasing number of
    distinct magnitudes (more zeros first among ties), at most MAX_PATTERNS
    of them, and the all-distinct pattern is always tried last.  Each
    pattern is solved by Levenberg-Marquardt from fixed seeds (Gauss nodes,
    evenly spaced values, measure quantiles).  The first solution passing
    the moment gate is returned.
    """
    if q < 1 or t < 0:
        raise QuadratureError("need q >= 1 and t >= 0")
    tried = []
    if measure == "gaussian":
        J = t // 2
        targets = [q * float(measure_moment("gaussian", 2 * j)) / 2 for j in range(1, J + 1)]
        for zeros, mult in _gaussian_patterns(q):
            tried.append((zeros, mult))
            d = len(mult)
            if J == 0:
                u_list = [np.ones(d)]
            else:
                herm = np.polynomial.hermite_e.hermegauss(2 * d + 2)[0]
                pos = np.sort(herm[herm > 1e-12] ** 2)[::-1]
                seeds = [pos[:d], pos[-d:], np.linspace(0.2, 3.0, d)[::-1],
                         np.full(d, 1.0) + np.arange(d)[::-1], _quantile_seed("gaussian", d)]
                u_list = _solve_power_sums(mult, targets, seeds)
            for u in u_list:
                if np.any(u <= 1e-12):
                    continue
                if d > 1 and np.min(np.diff(np.sort(u))) < 1e-9:
                    continue
                a = np.sqrt(u)
                pts = [0.0] * zeros
                for ai, mi in sorted(zip(a, mult), reverse=True):
                    pts += [ai] * mi + [-ai] * mi
                pts = np.sort(np.array(pts))
                rule = Quadrature1D("gaussian", pts, np.full(q, 1.0 / q), t)
                if rule.exact_to(t) and rule.symmetric:
                    return rule
        raise NoSolution(f"no symmetric {q}-point Gaussian rule of degree {t}; "
                         f"{len(tried)} patterns tried: {tried[:20]}")
    if measure == "exponential":
        targets = [q * float(measure_moment("exponential", j)) for j in range(1, t + 1)]
        for mult in _exponential_patterns(q):
            tried.append(mult)
            d = len(mult)
            if t == 0:
                u_list = [np.ones(d)]
            else:
                lag = np.polynomial.laguerre.laggauss(d)[0]
                seeds = [lag, lag[::-1], np.linspace(0.1, 2.0 * d, d), np.linspace(2.0 * d, 0.1, d),
                         _quantile_seed("exponential", d)]
                u_list = _solve_power_sums(mult, targets, seeds)
            for u in u_list:
                u = np.where(np.abs(u) < 1e-13, 0.0, u)
                if d > 1 and np.min(np.diff(np.sort(u))) < 1e-9:
                    continue
                pts = np.sort(np.repeat(u, mult))
                rule = Quadrature1D("exponential", pts, np.full(q, 1.0 / q), t)
                if rule.exact_to(t):
                    return rule
        raise NoSolution(f"no {q}-point exponential rule of degree {t}; "
                         f"{len(tried)} patterns tried: {tried[:20]}")
    raise QuadratureError(f"equal_weight_find supports gaussian and exponential, not {measure!r}")


# ---------------------------------------------------------------------------
# Gauss rules from moments

def recurrence_from_moments(moments, r: int):
    """Three-term recurrence (alpha_0..alpha_{r-1}, beta_0..beta_{r-1}) by the Chebyshev algorithm.

    Works in exact rationals; raises QuadratureError if the Hankel matrix
    of the moments is not positive definite.
    """
    mu = [Fraction(m) for m in moments]
    if len(mu) < 2 * r:
        raise QuadratureError(f"need {2 * r} moments for an {r}-point rule")
    if mu[0] <= 0:
        raise QuadratureError("moment sequence is not positive definite")
    alpha = [mu[1] / mu[0]]
    beta = [mu[0]]
    sig_prev = [Fraction(0)] * (2 * r)
    sig = list(mu[: 2 * r])
    for k in range(1, r):
        new = [Fraction(0)] * (2 * r)
        for l in range(k, 2 * r - k):
            new[l] = sig[l + 1] - alpha[k - 1] * sig[l] - beta[k - 1] * sig_prev[l]
        if new[k] <= 0:
            raise QuadratureError("moment sequence is not positive definite")
        alpha.append(new[k + 1] / new[k] - sig[k] / sig[k - 1])
        beta.append(new[k] / sig[k - 1])
        sig_prev, sig = sig, new
    return alpha, beta


def gauss_from_moments(moments, r: int) -> Quadrature1D:
    """r-point Gauss rule for a moment functional (degree 2r - 1).

    ``moments`` lists m_0..m_{2r-1} (more are ignored); the functional is
    normalised by m_0 so weights sum to one.
    """
    mu = [Fraction(m) for m in moments]
    if mu and mu[0] != 1:
        mu = [m / mu[0] for m in mu] if mu[0] > 0 else mu
    alpha, beta = recurrence_from_moments(mu, r)
    diag = np.array([float(a) for a in alpha])
    off = np.array([math.sqrt(float(b)) for b in beta[1:]])
    jac = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    nodes, vecs = np.linalg.eigh(jac)
    weights = vecs[0] ** 2
    weights = weights / weights.sum()
    rule = Quadrature1D("moments", nodes, weights, 2 * r - 1, moments=tuple(mu))
    if np.any(weights <= 0):
        raise QuadratureError("Gauss weights are not positive")
    return rule.gate(tol=1e-11)
