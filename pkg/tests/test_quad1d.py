import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from codecubature.quad1d import (
    NoSolution,
    Quadrature1D,
    QuadratureError,
    chebyshev_polynomial,
    convolutional_chebyshev,
    equal_weight_find,
    exp_ray_2point,
    gauss_2point_uniform,
    gauss_from_moments,
    isolate_real_roots,
    measure_moment,
    recurrence_from_moments,
)


def test_chebyshev_polynomial_coefficients():
    assert chebyshev_polynomial(2) == [1, Fraction(-1, 3), Fraction(1, 45)]


def test_root_isolation_on_known_polynomial():
    # (x - 1/3)(x - 1/2)(x + 2)
    coeffs = [Fraction(1), Fraction(7, 6), Fraction(-3, 2), Fraction(1, 3)]
    roots = sorted(isolate_real_roots(coeffs, Fraction(-10), Fraction(10)))
    assert [float(r) for r in roots] == pytest.approx([-2, 1 / 3, 1 / 2], abs=1e-15)


def test_convolutional_s2_closed_form():
    rule = convolutional_chebyshev(2)
    want = sorted([math.sqrt((5 + math.sqrt(5)) / 30), math.sqrt((5 - math.sqrt(5)) / 30)], reverse=True)
    assert rule.pairs == pytest.approx(want, abs=1e-15)
    assert rule.equal_weight and rule.symmetric and rule.size == 4
    assert rule.exact_to(5) and not rule.exact_to(6)


@pytest.mark.parametrize("s", range(1, 13))
def test_convolutional_rules_have_degree_2s_plus_1(s):
    rule = convolutional_chebyshev(s)
    assert rule.size == 2**s
    assert rule.exact_to(2 * s + 1)
    # beyond s = 7 the degree 2s + 2 error drops below the gate tolerance
    if s <= 7:
        assert not rule.exact_to(2 * s + 2)
    assert sum(z * z for z in rule.pairs) == pytest.approx(1 / 3, abs=1e-14)


def test_convolutional_rejects_out_of_range():
    with pytest.raises(QuadratureError):
        convolutional_chebyshev(0)


def test_fixed_two_point_rules():
    g = gauss_2point_uniform()
    assert g.points == pytest.approx([-1 / math.sqrt(3), 1 / math.sqrt(3)])
    assert g.exact_to(3) and not g.exact_to(4)
    e = exp_ray_2point()
    assert e.exact_to(2) and not e.exact_to(3)


def test_equal_weight_gaussian_q7_degree5():
    rule = equal_weight_find("gaussian", 7, 5)
    assert rule.equal_weight and rule.symmetric
    assert rule.exact_to(5)
    assert int(np.sum(rule.points == 0)) == 3


def test_equal_weight_gaussian_q5_degree5_infeasible():
    with pytest.raises(NoSolution, match="patterns tried"):
        equal_weight_find("gaussian", 5, 5)


@pytest.mark.parametrize("q,t", [(2, 2), (7, 3), (23, 4)])
def test_equal_weight_exponential(q, t):
    rule = equal_weight_find("exponential", q, t)
    assert rule.exact_to(t) and np.all(rule.points >= 0)


def test_equal_weight_is_deterministic():
    a = equal_weight_find.__wrapped__("exponential", 7, 3)
    b = equal_weight_find.__wrapped__("exponential", 7, 3)
    assert np.array_equal(a.points, b.points)


def test_gauss_laguerre_from_moments():
    rule = gauss_from_moments([math.factorial(k) for k in range(4)], 2)
    assert sorted(rule.points) == pytest.approx([2 - math.sqrt(2), 2 + math.sqrt(2)], abs=1e-14)
    assert rule.weights.sum() == pytest.approx(1)


def test_recurrence_rejects_indefinite_moments():
    with pytest.raises(QuadratureError):
        recurrence_from_moments([1, 0, -1, 0], 2)


def test_weights_must_sum_to_one():
    with pytest.raises(QuadratureError):
        Quadrature1D("uniform", [0.0, 1.0], [0.5, 0.6], 1)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6))
def test_gauss_from_moments_property(r):
    """Gauss rule from Legendre moments on [-1, 1] integrates x^k exactly to 2r - 1."""
    mom = [Fraction(0) if k % 2 else Fraction(1, k + 1) for k in range(2 * r + 2)]
    rule = gauss_from_moments(mom[: 2 * r], r)
    for k in range(2 * r):
        assert rule.weights @ rule.points**k == pytest.approx(float(mom[k]), abs=1e-12)
    assert np.all(rule.weights > 0)


def test_measure_moments():
    assert measure_moment("uniform", 2) == Fraction(1, 3)
    assert measure_moment("gaussian", 4) == 3
    assert measure_moment("exponential", 3) == 6
