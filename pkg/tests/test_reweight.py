import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from amsme.core import DataMatrix, DistanceMatrix, compute_distance_matrix
from amsme.errors import InvalidArgument, LengthMismatch
from amsme.reweight import ReweightConfig, reweight_distances


def random_distances(seed, n):
    return compute_distance_matrix(DataMatrix(np.random.default_rng(seed).standard_normal((3, n))))


def test_single_cluster_is_normalised():
    D = random_distances(0, 20)
    DM = reweight_distances(D, np.zeros(20, int)).values
    np.testing.assert_array_equal(DM, D.values / D.values.max())


def test_two_clusters_inter_exactly_two():
    D = random_distances(1, 20)
    lab = np.repeat([0, 1], 10)
    DM = reweight_distances(D, lab).values
    assert np.all(DM[np.ix_(lab == 0, lab == 1)] == 2.0)


def test_singleton_cluster():
    D = random_distances(2, 8)
    lab = np.array([0, 0, 0, 1, 0, 0, 0, 0])
    DM = reweight_distances(D, lab, ReweightConfig(3.5)).values
    assert DM[3, 3] == 0
    assert np.all(np.delete(DM[3], 3) == 3.5) and np.all(np.delete(DM[:, 3], 3) == 3.5)


def test_coincident_block_stays_zero():
    X = np.array([[0.0, 0.0, 5.0, 6.0]])
    DM = reweight_distances(compute_distance_matrix(DataMatrix(X)), [0, 0, 1, 1]).values
    assert DM[0, 1] == 0 and DM[2, 3] == 1.0


def test_config_validation():
    with pytest.raises(InvalidArgument):
        ReweightConfig(0.5)
    with pytest.warns(UserWarning):
        ReweightConfig(1.0)
    with pytest.raises(LengthMismatch):
        reweight_distances(random_distances(0, 5), [0, 1])


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 40), st.integers(1, 5), st.integers(0, 2 ** 31), st.floats(1.01, 10))
def test_contract(n, n_c, seed, alpha):
    D = random_distances(seed, n)
    lab = np.random.default_rng(seed).integers(0, n_c, n)
    DM = reweight_distances(D, lab, ReweightConfig(alpha)).values
    same = lab[:, None] == lab[None, :]
    assert np.all(DM[~same] == alpha)
    assert np.all((DM[same] >= 0) & (DM[same] <= 1))
    assert np.array_equal(DM, DM.T) and np.all(np.diag(DM) == 0)
    for c in np.unique(lab):
        blk = DM[np.ix_(lab == c, lab == c)]
        if blk.size > 1:
            assert blk.max() == 1.0
    again = reweight_distances(DistanceMatrix(DM), lab, ReweightConfig(alpha)).values
    assert np.array_equal(again, DM)
