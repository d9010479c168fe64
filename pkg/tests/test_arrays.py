import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from codecubature.arrays import (
    BudgetExceeded,
    OAError,
    OrthogonalArray,
    bch_alpha,
    bch_dual_array,
    certify,
    dual_distance,
    hadamard_matrix,
    hadamard_to_oa,
    kerdock_array,
    next_hadamard_order,
    paley_matrix,
    project_annihilating,
    project_array,
    unique_rows,
    verify_strength,
)
from helpers import full_product_rows


def test_full_product_has_full_strength():
    arr = OrthogonalArray(3, full_product_rows(3, 4))
    assert verify_strength(arr, 4, "exhaustive").passes


def test_strength_check_detects_a_broken_row():
    arr = bch_dual_array(2, 3, 3)
    rows = arr.rows.copy()
    rows[5, 2] ^= 1
    bad = OrthogonalArray(2, rows)
    rep = verify_strength(bad, 2, "exhaustive")
    assert not rep.passes and rep.failing is not None
    assert not verify_strength(bad, 2, "sampled", count=200, seed=3).passes


def test_rank_and_count_methods_agree():
    for q, m, s in [(2, 4, 4), (3, 2, 3), (4, 2, 3), (5, 1, 3)]:
        arr = bch_dual_array(q, m, s, verify="none")
        for t in range(1, min(s + 2, arr.length) + 1):
            a = verify_strength(arr, t, "exhaustive", method="rank").passes
            b = verify_strength(arr, t, "exhaustive", method="count").passes
            assert a == b, (q, m, s, t)


def test_budget_is_enforced():
    arr = bch_dual_array(2, 6, 4, verify="none")
    with pytest.raises(BudgetExceeded):
        verify_strength(arr, 4, "exhaustive", budget=1000, method="count")


def test_sampled_mode_is_reproducible():
    arr = bch_dual_array(2, 5, 4)
    a = verify_strength(arr, 4, "sampled", count=300, seed=7)
    b = verify_strength(arr, 4, "sampled", count=300, seed=7)
    assert a == b and a.passes


@pytest.mark.parametrize("q,m,s", [(2, 4, 3), (2, 5, 5), (3, 2, 4), (3, 3, 3), (4, 2, 3), (5, 2, 3), (7, 1, 4)])
def test_bch_dual_strength_and_size(q, m, s):
    arr = bch_dual_array(q, m, s)
    assert arr.length == q**m
    assert arr.strength == min(s, arr.length)
    assert verify_strength(arr, arr.strength, "exhaustive").passes
    assert arr.size <= q ** (m * bch_alpha(q, s) + 1)
    assert len(unique_rows(arr.rows)[0]) == arr.size


def test_bch_dual_contains_all_ones():
    # constant polynomials give the all-ones row, needed for symmetric thinning
    for q, m, s in [(2, 4, 4), (2, 5, 4), (4, 2, 3)]:
        assert bch_dual_array(q, m, s).closed_under_all_ones()


def test_projection_keeps_strength():
    arr = bch_dual_array(2, 5, 4)
    sub = project_array(arr, range(20))
    assert sub.length == 20 and sub.size == arr.size
    assert verify_strength(sub, 4, "exhaustive").passes
    with pytest.raises(OAError):
        project_array(arr, [0, 0, 1])


def test_annihilating_projection_halves_array():
    arr = bch_dual_array(2, 5, 4)
    weights = arr.rows.sum(axis=1)
    kill = arr.rows[np.flatnonzero(weights == 16)[0]]
    sub = project_annihilating(arr, 16, kill=[kill])
    assert sub.length == 16 and sub.size == arr.size // 2
    assert verify_strength(sub, 4, "exhaustive").passes


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(2, 3), (2, 4), (3, 2), (4, 2), (5, 1), (2, 5)]), st.integers(1, 6), st.data())
def test_strength_dual_distance_duality(qm, s, data):
    """A linear array has strength exactly dual distance minus one."""
    q, m = qm
    arr = bch_dual_array(q, m, s, verify="none")
    try:
        dd = dual_distance(arr)
    except BudgetExceeded:
        return
    try:
        if dd <= arr.length:
            assert not verify_strength(arr, dd, "exhaustive").passes
        assert verify_strength(arr, dd - 1, "exhaustive").passes
    except BudgetExceeded:
        return
    # a random projection keeps at least that strength
    keep = sorted(data.draw(st.sets(st.integers(0, arr.length - 1), min_size=1)))
    sub = project_array(arr, keep)
    assert verify_strength(sub, min(dd - 1, len(keep)), "exhaustive").passes


@pytest.mark.parametrize("n", [1, 2, 4, 8, 12, 16, 20, 24, 28, 32, 36, 44, 64])
def test_hadamard_orthogonality(n):
    h = hadamard_matrix(n)
    assert np.array_equal(h @ h.T, n * np.eye(n, dtype=h.dtype))


@pytest.mark.parametrize("n", [12, 20, 24, 28, 36, 44, 52, 60])
def test_paley(n):
    h = paley_matrix(n)
    assert np.array_equal(h @ h.T, n * np.eye(n, dtype=h.dtype))


def test_hadamard_to_oa_rejects_non_hadamard():
    with pytest.raises(OAError):
        hadamard_to_oa(np.ones((4, 4), dtype=int))


def test_next_hadamard_order():
    assert [next_hadamard_order(n) for n in (3, 5, 9, 13, 21, 45)] == [4, 8, 12, 16, 24, 48]


def test_kerdock_m4():
    arr = kerdock_array(4)
    assert (arr.size, arr.length, arr.strength) == (256, 16, 5)
    assert not arr.is_linear
    # not strength 6
    assert not verify_strength(arr, 6, "exhaustive").passes
    # minimum distance of the Kerdock code is 2^(m-1) - 2^(m/2 - 1)
    rows = arr.rows.astype(int)
    dists = {int(np.sum(rows[0] != r)) for r in rows[1:]}
    assert min(dists) == 6


def test_kerdock_rejects_odd_m():
    with pytest.raises(OAError):
        kerdock_array(5)


def test_certify_raises_on_failure():
    arr = bch_dual_array(2, 3, 2)
    with pytest.raises(OAError):
        certify(arr, 5, mode="exhaustive")
