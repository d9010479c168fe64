"""Region constructions built on array thinning."""

from __future__ import annotations

import logging
import math
from fractions import Fraction

import numpy as np

from .arrays import (
    OAError,
    OrthogonalArray,
    bch_dual_array,
    hadamard_matrix,
    hadamard_to_oa,
    kerdock_array,
    next_hadamard_order,
    project_annihilating,
    project_array,
)
from .finite import is_prime_power
from .formula import CubatureFormula, merge_points
from .moments import MeasureSpec, radial_moments
from .quad1d import (
    NoSolution,
    Quadrature1D,
    convolutional_chebyshev,
    equal_weight_find,
    gauss_from_moments,
)
from .thinning import (
    FactorLabeling,
    ThinningRecord,
    check_preconditions,
    required_strength,
    symmetric_labels,
    thinned_points,
)

log = logging.getLogger(__name__)

FAMILIES = ("auto", "bch", "kerdock", "hadamard")
MAX_PROBE_Q = 128
MAX_BUILD_POINTS = 4_000_000


class BuildError(ValueError):
    """The requested construction is not available."""


class Infeasible(BuildError):
    """The construction exists in principle but fails for these parameters."""


def _log2_ceil(n: int) -> int:
    return max(0, (n - 1).bit_length())


# ---------------------------------------------------------------------------
# thinning

def thin_convolution(factors, array: OrthogonalArray, measure: MeasureSpec, t: int, *,
                     coordinate_rules=(), scale: float = 1.0, provenance=None) -> CubatureFormula:
    """Points sum_i labeling_i(row_i) for every array row, equal weights per row.

    Repeated rows (from projection) become repeated points, which are
    merged with summed weights.
    """
    factors = tuple(factors)
    symmetric, need = check_preconditions(factors, array, t)
    pts = thinned_points(factors, array, measure.coords, scale)
    pts, w = merge_points(pts, np.full(array.size, 1.0 / array.size))
    record = ThinningRecord(factors, array, t, measure.coords, tuple(coordinate_rules), scale, symmetric)
    prov = {"construction": "thinning", "array": array.provenance, "q": array.q,
            "array-rows": array.size, "array-strength": array.strength, "thinning": record}
    prov.update(provenance or {})
    return CubatureFormula(measure, pts, w, t, prov)


def _binary_array(length: int, strength: int, family: str) -> tuple[OrthogonalArray, dict]:
    """A binary array of at least the given strength, closed under complement, cut to length."""
    strength = max(1, min(strength, length))
    if family == "auto":
        family = "hadamard" if strength <= 3 else "bch"
    if family == "hadamard":
        if strength > 3:
            raise BuildError(f"Hadamard arrays have strength 3, need {strength}")
        order = next_hadamard_order(length)
        arr = hadamard_to_oa(hadamard_matrix(order))
        info = {"family": "hadamard", "order": order}
    elif family == "kerdock":
        if strength > 5:
            raise BuildError(f"Kerdock arrays have strength 5, need {strength}")
        m = max(4, _log2_ceil(length))
        m += m % 2
        if m > 8:
            raise BuildError(f"length {length} needs a Kerdock array with m={m} > 8")
        arr = kerdock_array(m)
        info = {"family": "kerdock", "m": m}
    elif family == "bch":
        m = max(1, _log2_ceil(length))
        arr = bch_dual_array(2, m, strength)
        info = {"family": "bch", "m": m, "s": strength}
    else:
        raise BuildError(f"unknown array family {family!r}")
    if arr.length > length:
        arr = project_array(arr, range(length))
    return arr, info


def _qary_array(q: int, length: int, strength: int) -> tuple[OrthogonalArray, dict]:
    m = 1
    while q**m < length:
        m += 1
    arr = bch_dual_array(q, m, max(1, min(strength, q**m)))
    if arr.length > length:
        arr = project_array(arr, range(length))
    return arr, {"family": "bch", "m": m, "s": strength}


# ---------------------------------------------------------------------------
# cube

def build_cube(n: int, t: int, family: str = "auto") -> CubatureFormula:
    """Equal-weight interior degree-t formula on [-1, 1]^n.

    Each coordinate carries the convolutional Chebyshev rule with s = t // 2
    pairs; the s*n pairs are thinned by a binary array of strength t - 1
    (odd t, symmetric labeling) or t (even t).
    """
    if t < 1 or n < 1:
        raise BuildError("need n >= 1 and t >= 1")
    measure = MeasureSpec("cube", n)
    s = t // 2
    if s == 0:
        return CubatureFormula(measure, np.zeros((1, n)), np.ones(1), t, {"construction": "centroid"})
    rule = convolutional_chebyshev(s)
    factors = []
    for i in range(n):
        for j, z in enumerate(rule.pairs):
            factors.append(FactorLabeling(len(factors), (i,), np.array([z, -z]), "even-q-add-one"))
    arr, info = _binary_array(s * n, required_strength(t, True), family)
    return thin_convolution(factors, arr, measure, t, coordinate_rules=[rule] * n,
                            provenance={"region": "cube", **info})


# ---------------------------------------------------------------------------
# Gaussian

def probe_equal_weight(measure: str, t: int, q: int | None = None, start: int | None = None,
                       exponent: int = 0) -> Quadrature1D:
    """q-point equal-weight rule; without q, prime powers from start (default t + 1) are tried.

    With exponent e > 0 the search stops once q**e exceeds MAX_BUILD_POINTS,
    since an array of strength e has at least q**e rows.
    """
    if q is not None:
        return equal_weight_find(measure, q, t)
    tried = []
    for cand in range(t + 1 if start is None else start, MAX_PROBE_Q + 1):
        if exponent and cand**exponent > MAX_BUILD_POINTS:
            break
        if not is_prime_power(cand):
            continue
        try:
            return equal_weight_find(measure, cand, t)
        except NoSolution:
            tried.append(cand)
    raise Infeasible(f"no equal-weight {measure} rule of degree {t} for q in {tried}"
                     + (f" with at most {MAX_BUILD_POINTS} points" if exponent else ""))


def build_gaussian(n: int, t: int, q: int | None = None, family: str = "auto") -> CubatureFormula:
    """Equal-weight formula for exp(-|x|^2) with q-point symmetric factors per coordinate."""
    if t < 3 or t % 2 == 0:
        raise BuildError("Gaussian thinning needs odd t >= 3")
    rule = probe_equal_weight("gaussian", t, q, exponent=min(n, t - 1))
    q = rule.size
    if not is_prime_power(q):
        raise BuildError(f"q={q} is not a prime power")
    labels, mode = symmetric_labels(rule.points, q)
    factors = [FactorLabeling(i, (i,), labels, mode) for i in range(n)]
    if q == 2 and family != "auto":
        arr, info = _binary_array(n, t - 1, family)
    else:
        arr, info = _qary_array(q, n, t - 1)
    return thin_convolution(factors, arr, MeasureSpec("gaussian", n), t, coordinate_rules=[rule] * n,
                            scale=math.sqrt(0.5), provenance={"region": "gaussian", **info})


# ---------------------------------------------------------------------------
# radial projections

def _drop_origin(formula: CubatureFormula) -> tuple[np.ndarray, np.ndarray, float]:
    pts, w = formula.points, formula.weights
    origin = np.all(pts == 0, axis=1)
    lost = float(w[origin].sum())
    if origin.any():
        log.info("discarding origin point carrying mass %r", lost)
        pts, w = pts[~origin], w[~origin] / (1.0 - lost)
    return pts, w, lost


def _is_centrally_symmetric(pts: np.ndarray, w: np.ndarray) -> bool:
    a = np.lexsort(np.column_stack([w, pts]).T[::-1])
    neg = -pts + 0.0
    b = np.lexsort(np.column_stack([w, neg]).T[::-1])
    return bool(np.array_equal(pts[a] + 0.0, neg[b]) and np.array_equal(w[a], w[b]))


def radial_project_sphere(formula: CubatureFormula, t: int | None = None) -> CubatureFormula:
    """Gaussian formula of odd degree t -> sphere formula of degree t.

    Points go to p/|p| with weight w |p|^e / E|x|^e, e = t - 1.
    """
    t = formula.degree if t is None else t
    if formula.measure.region != "gaussian":
        raise BuildError("sphere projection needs a Gaussian formula")
    if t % 2 == 0:
        raise BuildError("sphere projection needs odd t")
    n = formula.measure.n
    pts, w, lost = _drop_origin(formula)
    if not _is_centrally_symmetric(pts, w):
        raise BuildError("sphere projection needs a centrally symmetric formula")
    e = t - 1
    # E|x|^e under exp(-|x|^2): Gamma(n/2 + e/2) / Gamma(n/2)
    m_e = math.prod(n / 2 + i for i in range(e // 2))
    norms = np.linalg.norm(pts, axis=1)
    new_w = w * norms**e / m_e
    new_w = new_w / new_w.sum()
    new_pts, new_w = merge_points(pts / norms[:, None], new_w)
    prov = {k: v for k, v in formula.provenance.items() if k != "thinning"}
    prov.update({"construction": "sphere-projection", "origin-mass": lost})
    return CubatureFormula(MeasureSpec("sphere", n), new_pts, new_w, t, prov)


def radial_project_simplex(formula: CubatureFormula, t: int | None = None) -> CubatureFormula:
    """Exponential-orthant formula in n+1 variables -> barycentric formula on the n-simplex."""
    t = formula.degree if t is None else t
    if formula.measure.region != "exponential-orthant":
        raise BuildError("simplex projection needs an exponential-orthant formula")
    n = formula.measure.n - 1
    pts, w, lost = _drop_origin(formula)
    if np.any(pts < 0):
        raise BuildError("orthant formula has a point outside the orthant")
    s = pts.sum(axis=1)
    new_w = w * s**t * (math.factorial(n) / math.factorial(n + t))
    new_w = new_w / new_w.sum()
    new_pts, new_w = merge_points(pts / s[:, None], new_w)
    prov = {k: v for k, v in formula.provenance.items() if k != "thinning"}
    prov.update({"construction": "simplex-projection", "origin-mass": lost})
    return CubatureFormula(MeasureSpec("simplex", n), new_pts, new_w, t, prov)


# ---------------------------------------------------------------------------
# degree-5 formulas with axis points and thinned cube vertices

def sphere5_case(n: int) -> dict:
    """Array choice for the vertex class: returns m, case (1-3), k and the family."""
    if n < 6:
        raise BuildError("the degree-5 axis/vertex construction needs n >= 6")
    m = 1
    while not (2 ** (2 * m - 1) < n <= 2 ** (2 * m + 1)):
        m += 1
    if n <= 2 ** (2 * m):
        return {"m": m, "case": 1, "k": 4 * m, "family": "kerdock"}
    if n <= 2 ** (2 * m) + 2**m:
        return {"m": m, "case": 2, "k": 4 * m + 2, "family": "bch-annihilated"}
    return {"m": m, "case": 3, "k": 4 * m + 3, "family": "bch"}


def sphere5_array(n: int) -> tuple[OrthogonalArray, dict]:
    c = sphere5_case(n)
    m = c["m"]
    if c["case"] == 1:
        arr = kerdock_array(2 * m) if 2 * m >= 4 else None
        if arr is None:
            raise BuildError("no Kerdock array below m=4")
        arr = project_array(arr, range(n))
    else:
        arr = bch_dual_array(2, 2 * m + 1, 5)
        if c["case"] == 2:
            target = 2 ** (2 * m) - 2**m
            weights = arr.rows.sum(axis=1)
            hits = np.nonzero(weights == target)[0]
            if not len(hits):
                raise Infeasible(f"no row of weight {target} to annihilate")
            arr = project_annihilating(arr, n, kill=[arr.rows[hits[0]]])
        else:
            arr = project_array(arr, range(n))
    rows = arr.size
    if rows != 2 ** c["k"]:
        raise Infeasible(f"vertex array has {rows} rows, expected 2^{c['k']}")
    return arr, c


SPHERE5_REGIONS = ("sphere", "ball", "gaussian", "spherical-shell", "radial-exponential")


def sphere5_parameters(measure: MeasureSpec) -> dict:
    """Solve for axis radius r, vertex coordinate s and the two weights.

    Axis points +-r e_i carry total weight a*n (a/2 each); vertex points
    s(+-1, ..., +-1) carry total weight W.  Matching E[x1^2], E[x1^4],
    E[x1^2 x2^2] and the mass gives, with v = 1/s^2,
        W = mu22 v^2,  a r^2 = mu2 - mu22 v,  a r^4 = mu4 - mu22,
        n a + W = 1,
    a quadratic in v.  Among positive roots with support-valid points the
    one with the smallest s is taken.
    """
    n = measure.n
    mu2 = measure.moment((2,))
    mu4 = measure.moment((4,))
    mu22 = measure.moment((2, 2))
    d = mu4 - mu22
    if measure.region == "sphere":
        # the support forces r = 1 and n s^2 = 1; the quadratic then has root v = n
        roots = [Fraction(n)]
    else:
        qa = n * mu22**2 / d + mu22
        qb = -2 * n * mu2 * mu22 / d
        qc = n * mu2**2 / d - 1
        disc = qb * qb - 4 * qa * qc
        if disc < 0:
            raise Infeasible(f"degree-5 moment system has no real solution for {measure.label}")
        sq = math.sqrt(disc)
        roots = sorted({(-float(qb) + sg * sq) / (2 * float(qa)) for sg in (1, -1)}, reverse=True)
    for v in roots:
        if v <= 0:
            continue
        b = mu2 - mu22 * v
        if b <= 0:
            continue
        r2 = d / b
        a = b * b / d
        w_vert = mu22 * v * v
        s2 = 1 / v
        r, s = math.sqrt(r2), math.sqrt(s2)
        if not _support_ok(measure, r, s):
            continue
        return {"r": r, "s": s, "axis_weight": float(a) / 2, "vertex_weight": float(w_vert),
                "exact": measure.region == "sphere"}
    raise Infeasible(f"degree-5 moment system has no positive support-valid solution for {measure.label}")


def _support_ok(measure, r, s) -> bool:
    n = measure.n
    vert = s * math.sqrt(n)
    if measure.region == "sphere":
        return abs(r - 1) < 1e-12 and abs(vert - 1) < 1e-12
    if measure.region == "ball":
        return r < 1 and vert < 1
    if measure.region == "spherical-shell":
        lo = float(measure.r)
        return lo < r < 1 and lo < vert < 1
    return True


def build_sphere5(n: int, region: str = "sphere", r=None) -> CubatureFormula:
    """Positive degree-5 formula with 2^k + 2n points (axis points + thinned cube vertices)."""
    if region not in SPHERE5_REGIONS:
        raise BuildError(f"degree-5 axis/vertex construction covers {', '.join(SPHERE5_REGIONS)}")
    measure = MeasureSpec(region, n, r)
    par = sphere5_parameters(measure)
    arr, case = sphere5_array(n)
    if arr.strength is None or arr.strength < 4 or not arr.closed_under_all_ones():
        raise Infeasible("vertex array must have strength >= 4 and be closed under complement")
    if region == "sphere":
        r_ax, s = 1.0, 1.0 / math.sqrt(n)
    else:
        r_ax, s = par["r"], par["s"]
    axis = np.zeros((2 * n, n))
    for i in range(n):
        axis[2 * i, i] = r_ax
        axis[2 * i + 1, i] = -r_ax
    verts = s * (1.0 - 2.0 * arr.rows.astype(float))
    pts = np.concatenate([axis, verts])
    w = np.concatenate([np.full(2 * n, par["axis_weight"]), np.full(arr.size, par["vertex_weight"] / arr.size)])
    w = w / w.sum()
    prov = {"construction": "axis-vertex", "region": region, "array": arr.notes.get("parent", arr.provenance),
            "array-rows": arr.size, "array-strength": arr.strength, "q": 2, **case}
    return CubatureFormula(measure, pts, w, 5, prov)


# ---------------------------------------------------------------------------
# spheres and spherically symmetric solids

def build_sphere(n: int, t: int, q: int | None = None, family: str = "auto") -> CubatureFormula:
    if t == 5 and n >= 6 and q is None:
        return build_sphere5(n, "sphere")
    return radial_project_sphere(build_gaussian(n, t, q, family), t)


def build_radial(measure: MeasureSpec, t: int, q: int | None = None, family: str = "auto") -> CubatureFormula:
    """Sphere formula times a Gauss rule for the radial density."""
    if measure.region not in ("ball", "spherical-shell", "radial-exponential"):
        raise BuildError(f"{measure.region} is not a spherically symmetric solid")
    if t % 2 == 0:
        raise BuildError("the radial product construction needs odd t")
    sphere = build_sphere(measure.n, t, q, family)
    npts = (t + 2) // 2
    radial = gauss_from_moments(radial_moments(measure, 2 * npts), npts)
    pts = (radial.points[:, None, None] * sphere.points[None, :, :]).reshape(-1, measure.n)
    w = (radial.weights[:, None] * sphere.weights[None, :]).ravel()
    prov = {k: v for k, v in sphere.provenance.items() if k != "thinning"}
    prov.update({"construction": "radial-product", "radial-points": npts, "sphere-points": sphere.size})
    return CubatureFormula(measure, pts, w / w.sum(), t, prov)


def build_ball(n: int, t: int, **kw) -> CubatureFormula:
    return build_radial(MeasureSpec("ball", n), t, **kw)


def build_spherical_shell(n: int, t: int, r, **kw) -> CubatureFormula:
    return build_radial(MeasureSpec("spherical-shell", n, r), t, **kw)


# ---------------------------------------------------------------------------
# cubical shell

def build_cubical_shell(n: int, t: int, r, family: str = "auto") -> CubatureFormula:
    """Cube formula on each facet, times a radial rule for rho^(n-1) on [r, 1]."""
    if n < 2:
        raise BuildError("cubical shell needs n >= 2")
    measure = MeasureSpec("cubical-shell", n, r)
    facet = build_cube(n - 1, t, family)
    blocks = []
    for i in range(n):
        for sign in (1.0, -1.0):
            blk = np.insert(facet.points, i, sign, axis=1)
            blocks.append(blk)
    surface = np.concatenate(blocks)
    surf_w = np.tile(facet.weights, 2 * n) / (2 * n)
    npts = (t + 2) // 2
    radial = gauss_from_moments(radial_moments(measure, 2 * npts), npts)
    pts = (radial.points[:, None, None] * surface[None, :, :]).reshape(-1, n)
    w = (radial.weights[:, None] * surf_w[None, :]).ravel()
    prov = {k: v for k, v in facet.provenance.items() if k != "thinning"}
    prov.update({"construction": "facet-radial-product", "surface-points": len(surface), "radial-points": npts})
    return CubatureFormula(measure, pts, w / w.sum(), t, prov)


# ---------------------------------------------------------------------------
# simplex and cross-polytope

def build_orthant(n_vars: int, t: int, q: int | None = None, family: str = "auto") -> CubatureFormula:
    """Equal-weight formula for exp(-x_1 - ... - x_n) on the orthant (no symmetry, strength t)."""
    rule = probe_equal_weight("exponential", t, q, exponent=min(n_vars, t))
    q = rule.size
    if not is_prime_power(q):
        raise BuildError(f"q={q} is not a prime power")
    f_labels = np.sort(rule.points)
    factors = [FactorLabeling(i, (i,), f_labels, "none") for i in range(n_vars)]
    if q == 2:
        arr, info = _binary_array(n_vars, t, family if family != "kerdock" or t <= 5 else "bch")
    else:
        arr, info = _qary_array(q, n_vars, t)
    return thin_convolution(factors, arr, MeasureSpec("exponential-orthant", n_vars), t,
                            coordinate_rules=[rule] * n_vars, provenance={"region": "exponential-orthant", **info})


def build_simplex(n: int, t: int, q: int | None = None, family: str = "auto") -> CubatureFormula:
    """Positive degree-t formula on the n-simplex (n+1 barycentric coordinates)."""
    if t < 1 or n < 1:
        raise BuildError("need n >= 1 and t >= 1")
    orth = build_orthant(n + 1, t, q, family)
    out = radial_project_simplex(orth, t)
    out.provenance["orthant-points"] = orth.size
    return out


def _exact_float(x: Fraction) -> float:
    return x.numerator / x.denominator


def build_simplex3(n: int) -> CubatureFormula:
    """3n-1 point degree-3 formula on the simplex with n barycentric coordinates.

    Vertices, the 2n-2 half-supports of a normalised Hadamard matrix
    (coordinates 2/n) and the centroid.  For n without a Hadamard matrix
    the formula is built at the next order and the extra coordinates are
    projected away.
    """
    if n < 2:
        raise BuildError("need n >= 2")
    order = next_hadamard_order(n)
    if order % 4 and order > 2:
        raise Infeasible(f"no Hadamard matrix of order near {n}")
    pts, wts = _simplex3_rational(order)
    if order > n:
        pts, wts = _restrict_simplex(pts, wts, n, order, 3)
    float_pts = np.array([[_exact_float(c) for c in p] for p in pts])
    float_w = np.array([_exact_float(w) for w in wts])
    prov = {"construction": "hadamard-simplex", "order": order, "exact-weights": tuple(wts),
            "exact-points": tuple(tuple(p) for p in pts)}
    return CubatureFormula(MeasureSpec("simplex", n - 1), float_pts, float_w, 3, prov)


def _simplex3_rational(n: int):
    h = hadamard_matrix(n).astype(np.int64)
    h = h * h[0][None, :]
    w_vertex = Fraction(2, n * (n + 1) * (n + 2))
    w_h = Fraction(n, 2 * (n + 1) * (n + 2))
    w_centre = Fraction(4 * n, (n + 1) * (n + 2))
    pts, wts = [], []
    for i in range(n):
        pts.append(tuple(Fraction(int(i == j)) for j in range(n)))
        wts.append(w_vertex)
    half = Fraction(2, n)
    for row in h[1:]:
        for sign in (1, -1):
            pts.append(tuple(half if v == sign else Fraction(0) for v in row))
            wts.append(w_h)
    pts.append(tuple(Fraction(1, n) for _ in range(n)))
    wts.append(w_centre)
    return pts, wts


def _restrict_simplex(pts, wts, n: int, order: int, t: int):
    """Keep the first n barycentric coordinates and renormalise (Dirichlet aggregation).

    The sum S of the kept coordinates is Beta(n, order - n) and independent
    of the renormalised point, so weights scale by S^t / E[S^t].
    """
    es = math.prod(Fraction(n + j, order + j) for j in range(t))
    merged: dict[tuple, Fraction] = {}
    for p, w in zip(pts, wts):
        s = sum(p[:n])
        if s == 0:
            continue
        key = tuple(c / s for c in p[:n])
        merged[key] = merged.get(key, Fraction(0)) + w * s**t / es
    total = sum(merged.values())
    return list(merged), [w / total for w in merged.values()]


def build_cross_polytope(n: int, t: int, q: int | None = None, family: str = "auto") -> CubatureFormula:
    """Sign patterns of a binary array applied to a corner-simplex formula."""
    base = build_simplex(n, t, q)
    corner = base.points[:, :n]
    arr, info = _binary_array(n, required_strength(t, True), family)
    if t % 2 == 1 and not arr.closed_under_all_ones():
        raise BuildError("sign array must be closed under complement for odd t")
    signs = 1.0 - 2.0 * arr.rows.astype(float)
    pts = (signs[:, None, :] * corner[None, :, :]).reshape(-1, n)
    w = (np.full(arr.size, 1.0 / arr.size)[:, None] * base.weights[None, :]).ravel()
    pts, w = merge_points(pts, w)
    prov = {"construction": "signed-simplex", "simplex-points": base.size, "array-rows": arr.size,
            "array-strength": arr.strength, "q": base.provenance.get("q"), **info}
    return CubatureFormula(MeasureSpec("cross-polytope", n), pts, w, t, prov)


# ---------------------------------------------------------------------------
# point-count bounds

def bounds(n: int, t: int, symmetric: bool = False) -> dict:
    """Reference point counts for degree-t formulas in n variables."""
    tch = math.comb(n + t, t)
    even = sum(math.comb(n + d - 1, d) for d in range(0, t + 1, 2))
    tch_sym = 2 * even
    relevant = tch_sym if symmetric else tch
    half = t // 2
    return {
        "tchakaloff": tch,
        "tchakaloff-symmetric": tch_sym,
        "exact-determination": -(-relevant // (n + 1)),
        "stroud-lower": math.comb(n + half, half),
        "stroud-lower-homogeneous": math.comb(n + half - 1, half),
    }
