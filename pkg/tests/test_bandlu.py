import numpy as np
import pytest

from rdspline.bandlu import (
    BandedMatrix,
    DimensionMismatchError,
    SingularMatrixError,
    dense_solve,
    lu_factor,
    solve,
)


def random_banded(rng, n, kl=5, ku=5, dominance=8.0):
    a = BandedMatrix.zeros(n, kl, ku)
    for i in range(n):
        for j in range(max(0, i - kl), min(n, i + ku + 1)):
            a.set(i, j, rng.normal())
        a.add(i, i, dominance)
    return a


def test_identity_solve():
    a = BandedMatrix.zeros(6, 2, 2)
    for i in range(6):
        a.set(i, i, 1.0)
    fact = lu_factor(a)
    b = np.arange(6.0)
    assert np.allclose(solve(fact, b), b, rtol=0, atol=0)


def test_scaled_identity():
    a = BandedMatrix.zeros(5, 1, 1)
    for i in range(5):
        a.set(i, i, 2.0)
    x = solve(lu_factor(a), np.ones(5))
    assert np.allclose(x, 0.5, rtol=0, atol=1e-15)


def test_tridiagonal_hand_case():
    a = BandedMatrix.zeros(4, 1, 1)
    for i in range(4):
        a.set(i, i, 2.0)
        if i > 0:
            a.set(i, i - 1, -1.0)
        if i < 3:
            a.set(i, i + 1, -1.0)
    x = solve(lu_factor(a), np.array([1.0, 0.0, 0.0, 1.0]))
    assert np.allclose(x, 1.0, atol=1e-14)


def test_matches_dense_oracle_on_random_systems():
    rng = np.random.default_rng(7)
    for trial in range(200):
        n = int(rng.integers(12, 101))
        a = random_banded(rng, n)
        b = rng.normal(size=n)
        x_band = solve(lu_factor(a), b)
        x_dense = dense_solve(a.to_dense(), b)
        scale = max(np.max(np.abs(x_dense)), 1e-300)
        assert np.max(np.abs(x_band - x_dense)) <= 1e-10 * scale


def test_zero_matrix_is_singular():
    a = BandedMatrix.zeros(8, 2, 2)
    with pytest.raises(SingularMatrixError):
        lu_factor(a)
    with pytest.raises(SingularMatrixError):
        dense_solve(np.zeros((4, 4)), np.ones(4))


def test_tiny_pivot_is_singular():
    a = BandedMatrix.zeros(3, 1, 1)
    for i in range(3):
        a.set(i, i, 1.0)
    a.set(1, 1, 1e-308)
    with pytest.raises(SingularMatrixError):
        lu_factor(a)


def test_dimension_mismatch():
    a = random_banded(np.random.default_rng(0), 10)
    fact = lu_factor(a)
    with pytest.raises(DimensionMismatchError):
        solve(fact, np.ones(9))
    with pytest.raises(DimensionMismatchError):
        dense_solve(np.eye(3), np.ones(4))
    with pytest.raises(DimensionMismatchError):
        a.set(0, 9, 1.0)  # outside the band


def test_repeated_solves_are_independent():
    rng = np.random.default_rng(3)
    a = random_banded(rng, 20)
    fact = lu_factor(a)
    b1 = rng.normal(size=20)
    b2 = rng.normal(size=20)
    x1_first = solve(fact, b1)
    _ = solve(fact, b2)
    x1_second = solve(fact, b1)
    assert np.array_equal(x1_first, x1_second)
    assert np.array_equal(b1, b1.copy())  # right-hand side untouched


def test_determinism():
    rng = np.random.default_rng(11)
    a = random_banded(rng, 30)
    b = rng.normal(size=30)
    x1 = solve(lu_factor(a), b)
    x2 = solve(lu_factor(a), b)
    assert np.array_equal(x1, x2)


def test_band_storage_shape_preserved():
    a = random_banded(np.random.default_rng(5), 25)
    original = a.ab.copy()
    fact = lu_factor(a)
    assert fact.lu.shape == a.ab.shape
    assert np.array_equal(a.ab, original)  # factorisation does not mutate input


def test_to_dense_round_trip():
    rng = np.random.default_rng(9)
    a = random_banded(rng, 12, kl=3, ku=2)
    dense = a.to_dense()
    for i in range(12):
        for j in range(12):
            assert dense[i, j] == a.get(i, j)
    assert a.get(0, 11) == 0.0
