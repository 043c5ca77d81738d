import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from amsme.core import DataMatrix, DistanceMatrix, compute_distance_matrix
from amsme.errors import FormatError, InvalidArgument
from amsme.ordinal import OrdinalMatrix, ordinal_matrix, ordinal_rank, rank_rows

from oracles import ordinal_oracle, rank_oracle


def line_distances(positions):
    return compute_distance_matrix(DataMatrix(np.asarray(positions, dtype=float)[None, :]))


def test_rank_on_line():
    D = line_distances([0, 1, 3])
    assert ordinal_rank(D, 0, 2) == 2
    assert all(ordinal_rank(D, i, i) == 0 for i in range(3))


def test_rank_all_ties_is_one():
    D = DistanceMatrix(np.ones((5, 5)) - np.eye(5))
    assert all(ordinal_rank(D, 2, j) == 1 for j in range(5) if j != 2)


def test_rank_index_bounds():
    with pytest.raises(InvalidArgument):
        ordinal_rank(line_distances([0, 1]), 0, 2)


def test_ordinal_matrix_line():
    O = ordinal_matrix(line_distances([0, 1, 3])).values
    assert O.tolist() == [[0, 1, 2], [1, 0, 2], [2, 2, 0]]


def test_two_points():
    assert ordinal_matrix(line_distances([0, 5])).values.tolist() == [[0, 1], [1, 0]]


def test_scale_invariance(rng):
    D = compute_distance_matrix(DataMatrix(rng.standard_normal((4, 25))))
    O = ordinal_matrix(D).values
    for c in (1e-3, 0.7, 3.0, 1e5):
        assert np.array_equal(ordinal_matrix(DistanceMatrix(D.values * c)).values, O)


def test_ordinal_matrix_type_rejects_asymmetric():
    with pytest.raises(FormatError):
        OrdinalMatrix(np.array([[0, 1], [0, 0]]))


def test_rows_without_ties_are_permutations(rng):
    D = compute_distance_matrix(DataMatrix(rng.standard_normal((3, 30)))).values
    R = rank_rows(D)
    for i in range(30):
        off = np.delete(R[i], i)
        assert sorted(off.tolist()) == list(range(1, 30))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 20), st.integers(0, 2 ** 31), st.booleans())
def test_matches_bruteforce(n, seed, quantise):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((3, n))
    if quantise:
        X = np.round(X)  # force plenty of tied distances
    D = compute_distance_matrix(DataMatrix(X)).values
    O = ordinal_matrix(D).values
    assert O.tolist() == ordinal_oracle(D.tolist())
    R = rank_rows(D)
    assert all(R[i, j] == rank_oracle(D.tolist(), i, j) for i in range(n) for j in range(n))


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 25), st.integers(0, 2 ** 31))
def test_monotone_invariance(n, seed):
    rng = np.random.default_rng(seed)
    D = compute_distance_matrix(DataMatrix(rng.standard_normal((5, n)))).values
    O = ordinal_matrix(D).values
    for g in (np.square, np.log1p, lambda t: 7.5 * t, lambda t: t ** 0.3):
        assert np.array_equal(ordinal_matrix(DistanceMatrix(g(D))).values, O)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 30), st.integers(0, 2 ** 31))
def test_type_invariants(n, seed):
    D = compute_distance_matrix(DataMatrix(np.random.default_rng(seed).standard_normal((2, n))))
    O = ordinal_matrix(D).values
    assert np.array_equal(O, O.T) and np.all(np.diag(O) == 0)
    assert O.min() >= 0 and O.max() <= n - 1
