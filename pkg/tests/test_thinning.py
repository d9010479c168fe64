import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from codecubature.arrays import OrthogonalArray, bch_dual_array, project_array
from codecubature.thinning import (
    FactorLabeling,
    ThinningError,
    check_preconditions,
    closed_under_negation,
    required_strength,
    symmetric_labels,
    thinned_points,
)
from helpers import full_product_rows, monomial_sums, monomials, thinning_oracle_deviation


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("t", [1, 2, 3, 4])
def test_thinning_matches_full_convolution(q, t):
    for length in range(1, 9):
        assert thinning_oracle_deviation(q, length, t, seed=100 * q + 10 * t + length) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([2, 3]), st.integers(1, 8), st.integers(1, 4), st.integers(0, 2**31), st.integers(1, 3))
def test_thinning_oracle_property(q, length, t, seed, dim):
    assert thinning_oracle_deviation(q, length, t, seed, dim) <= 1e-12


def test_weak_array_breaks_the_oracle():
    # a strength-2 array is not enough for degree 3 with generic factors
    rng = np.random.default_rng(0)
    factors = [FactorLabeling(i, (0,), rng.uniform(-1, 1, 3)) for i in range(9)]
    arr = bch_dual_array(3, 2, 2)
    thin = thinned_points(factors, arr, 1)
    full = thinned_points(factors, OrthogonalArray(3, full_product_rows(3, 9)), 1)
    exps = monomials(1, 3)
    a = monomial_sums(thin, np.full(len(thin), 1 / len(thin)), exps)
    b = monomial_sums(full, np.full(len(full), 1 / len(full)), exps)
    assert np.max(np.abs(a - b)) > 1e-6


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_symmetric_labels(q):
    vals = {2: [-0.4, 0.4], 3: [-1.0, 0.0, 1.0], 4: [-0.7, -0.2, 0.2, 0.7], 5: [-1, -0.5, 0, 0.5, 1]}[q]
    labels, mode = symmetric_labels(vals, q)
    assert sorted(labels) == sorted(vals)
    assert FactorLabeling(0, (0,), labels, mode).symmetry_holds()


def test_symmetric_refinement_odd_degree():
    """Strength t - 1 suffices for odd t with negation-compatible labels."""
    rng = np.random.default_rng(5)
    length, t = 9, 3
    arr = bch_dual_array(3, 2, 2)
    assert arr.strength == 2 and closed_under_negation(arr)
    factors = []
    for i in range(length):
        z = rng.uniform(0.1, 1.0)
        labels, mode = symmetric_labels([-z, 0.0, z], 3)
        factors.append(FactorLabeling(i, (i % 3,), labels, mode))
    symmetric, need = check_preconditions(factors, arr, t)
    assert symmetric and need == 2 == required_strength(3, True)
    thin = thinned_points(factors, arr, 3)
    full = thinned_points(factors, OrthogonalArray(3, full_product_rows(3, length)), 3)
    exps = monomials(3, t)
    a = monomial_sums(thin, np.full(len(thin), 1 / len(thin)), exps)
    b = monomial_sums(full, np.full(len(full), 1 / len(full)), exps)
    assert np.max(np.abs(a - b)) <= 1e-12
    # unlabelled factors lose the refinement
    plain = [FactorLabeling(i, (i % 3,), rng.uniform(-1, 1, 3)) for i in range(length)]
    with pytest.raises(ThinningError):
        check_preconditions(plain, arr, t)


def test_preconditions_reject_weak_or_unverified_arrays():
    rng = np.random.default_rng(1)
    factors = [FactorLabeling(i, (0,), rng.uniform(-1, 1, 2)) for i in range(8)]
    with pytest.raises(ThinningError):
        check_preconditions(factors, bch_dual_array(2, 3, 1), 3)
    with pytest.raises(ThinningError):
        check_preconditions(factors, OrthogonalArray(2, bch_dual_array(2, 3, 3).rows), 3)


def test_odd_q_negation_closure():
    arr = bch_dual_array(3, 2, 3)
    assert closed_under_negation(arr)
    half = OrthogonalArray(3, arr.rows[arr.rows[:, 1] != 1])
    assert not closed_under_negation(half)


def test_factor_validation():
    with pytest.raises(ThinningError):
        FactorLabeling(0, (0, 1), np.zeros(3))
    with pytest.raises(ThinningError):
        thinned_points([FactorLabeling(0, (0,), np.zeros(3))], project_array(bch_dual_array(2, 2, 2), [0]), 1)
