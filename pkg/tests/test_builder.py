from fractions import Fraction

import numpy as np
import pytest

from codecubature.builder import (
    BuildError,
    Infeasible,
    bounds,
    build_ball,
    build_cross_polytope,
    build_cube,
    build_cubical_shell,
    build_gaussian,
    build_orthant,
    build_radial,
    build_simplex,
    build_simplex3,
    build_sphere,
    build_sphere5,
    build_spherical_shell,
    probe_equal_weight,
    radial_project_sphere,
    sphere5_case,
)
from codecubature.arrays import hadamard_constructible
from codecubature.moments import MeasureSpec
from codecubature.verify import verify_exhaustive


def multiples_of_row_weight(f):
    """Thinned formulas have equal row weights; merged repeats give integer multiples."""
    k = f.weights * f.provenance["array-rows"]
    return np.allclose(k, np.round(k), rtol=0, atol=1e-9)


def exact(formula, t=None):
    cert = verify_exhaustive(formula, t)
    return cert.passes


@pytest.mark.parametrize("n,t", [(1, 1), (3, 2), (3, 3), (5, 4), (6, 5), (4, 7), (8, 3)])
def test_cube(n, t):
    f = build_cube(n, t)
    assert f.equal_weight and f.support == "interior"
    assert exact(f)


def test_cube_degree_is_sharp():
    assert not exact(build_cube(6, 5), 6)


@pytest.mark.parametrize("family", ["bch", "kerdock"])
def test_cube_families(family):
    f = build_cube(8, 5, family)
    assert f.provenance["family"] == family
    assert exact(f)


def test_cube_family_errors():
    with pytest.raises(BuildError):
        build_cube(8, 5, "hadamard")
    with pytest.raises(BuildError):
        build_cube(8, 7, "kerdock")


@pytest.mark.parametrize("n,t", [(3, 3), (4, 5), (6, 3)])
def test_gaussian(n, t):
    f = build_gaussian(n, t)
    assert multiples_of_row_weight(f) and exact(f)


def test_gaussian_needs_odd_degree():
    with pytest.raises(BuildError):
        build_gaussian(3, 4)


def test_probe_starts_above_degree():
    assert probe_equal_weight("gaussian", 3).size == 4
    assert probe_equal_weight("gaussian", 3, q=2).size == 2


def test_probe_respects_point_budget():
    with pytest.raises(Infeasible, match="points"):
        probe_equal_weight("gaussian", 9, exponent=8)


@pytest.mark.parametrize("n", [3, 5, 8])
def test_sphere_degree3(n):
    f = build_sphere(n, 3)
    assert f.positive and np.allclose(np.linalg.norm(f.points, axis=1), 1.0)
    assert exact(f)


def test_sphere_projection_rejects_even_degree():
    with pytest.raises(BuildError):
        radial_project_sphere(build_gaussian(3, 3), 4)


@pytest.mark.parametrize("n,count", [(6, 76), (7, 142), (8, 144), (12, 280), (16, 288)])
def test_sphere5_counts(n, count):
    case = sphere5_case(n)
    f = build_sphere5(n)
    assert f.size == count == 2 ** case["k"] + 2 * n
    assert f.positive and exact(f)


def test_sphere5_is_equal_weight_at_16():
    assert build_sphere5(16).equal_weight


@pytest.mark.parametrize("region", ["ball", "gaussian"])
def test_sphere5_solids(region):
    f = build_sphere5(8, region)
    assert f.size == 144 and f.positive and exact(f)


def test_ball_shell_and_radial_exponential():
    assert exact(build_ball(4, 3))
    assert exact(build_spherical_shell(3, 3, Fraction(1, 3)))
    assert exact(build_radial(MeasureSpec("radial-exponential", 3), 3))
    with pytest.raises(BuildError):
        build_ball(3, 4)


@pytest.mark.parametrize("n,t", [(2, 3), (3, 5)])
def test_cubical_shell(n, t):
    f = build_cubical_shell(n, t, Fraction(1, 2))
    assert f.positive and exact(f)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 8, 9, 12])
def test_simplex3(n):
    f = build_simplex3(n)
    if hadamard_constructible(n):
        assert f.size == 3 * n - 1
    weights = f.provenance["exact-weights"]
    assert sum(weights) == 1
    assert all(w > 0 for w in weights)
    assert exact(f)


@pytest.mark.parametrize("n,t", [(2, 1), (3, 2), (2, 3)])
def test_simplex_by_projection(n, t):
    f = build_simplex(n, t)
    assert f.positive and f.dimension == n + 1
    assert exact(f)


def test_orthant():
    f = build_orthant(4, 3)
    assert multiples_of_row_weight(f) and exact(f)


@pytest.mark.parametrize("n,t", [(3, 2), (4, 3)])
def test_cross_polytope(n, t):
    f = build_cross_polytope(n, t)
    assert f.positive and exact(f)


def test_bounds():
    b = bounds(100, 5, symmetric=True)
    assert b["tchakaloff"] == 96_560_646
    assert b["tchakaloff-symmetric"] == 8_852_652
    assert b["exact-determination"] == 87_651
    assert bounds(3, 2)["tchakaloff"] == 10
