import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from amsme.core import (DataMatrix, DistanceMatrix, LabelVector, compute_distance_matrix, load_dataset,
                        load_distance_matrix, read_embedding_csv, read_fmat, read_labels, standardize,
                        write_embedding_csv, write_fmat, write_labels)
from amsme.errors import FormatError, LengthMismatch, ZeroNormError


def test_csv_three_rows_two_columns(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("1,2\n3,4\n5,6\n")
    X = load_dataset(p, "csv")
    assert (X.d, X.n) == (3, 2)
    assert X.values[:, 1].tolist() == [2, 4, 6]


def test_csv_header_and_transpose(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("f1,f2,f3\n1,2,3\n4,5,6\n")
    X = load_dataset(p, "csv", transpose=True)
    assert (X.d, X.n) == (3, 2)
    assert list(X.feature_names) == ["f1", "f2", "f3"]
    Y = load_dataset(p, "csv")
    assert list(Y.sample_ids) == ["f1", "f2", "f3"]


@pytest.mark.parametrize("body", ["1,2\n3,NaN\n", "1,2\n3\n", "1,2\n3,abc\n", "1,2\n3,inf\n"])
def test_csv_rejects_bad_cells(tmp_path, body):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(FormatError):
        load_dataset(p, "csv")


def test_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        load_dataset(tmp_path / "nope.csv", "csv")


def test_fmat_layout_is_column_major(tmp_path):
    d, n = 64, 5620
    rng = np.random.default_rng(0)
    m = rng.standard_normal((d, n)).astype(np.float32)
    p = tmp_path / "x.fmat"
    # written by hand to pin the byte layout independently of write_fmat
    p.write_bytes(b"FMAT" + struct.pack("<QQ", d, n) + m.astype("<f4").tobytes(order="F"))
    X = load_dataset(p, "fmat")
    assert (X.d, X.n) == (d, n)
    np.testing.assert_array_equal(X.values, m.astype(np.float64))


def test_fmat_roundtrip_and_errors(tmp_path):
    m = np.arange(12, dtype=np.float64).reshape(3, 4)
    p = tmp_path / "m.fmat"
    write_fmat(p, m)
    np.testing.assert_array_equal(read_fmat(p), m)
    p.write_bytes(p.read_bytes()[:-4])
    with pytest.raises(FormatError):
        read_fmat(p)
    p.write_bytes(b"NOPE" + bytes(16))
    with pytest.raises(FormatError):
        read_fmat(p)


def test_distance_matrix_reload_revalidates(tmp_path):
    D = compute_distance_matrix(DataMatrix(np.random.default_rng(1).standard_normal((5, 30))))
    p = tmp_path / "D.fmat"
    write_fmat(p, D.values)
    back = load_distance_matrix(p)
    np.testing.assert_allclose(back.values, D.values, rtol=1e-6)
    write_fmat(p, D.values + np.triu(np.ones_like(D.values), 1))
    with pytest.raises(FormatError):
        load_distance_matrix(p)


def test_labels_and_embedding_roundtrip(tmp_path):
    write_labels(tmp_path / "l.txt", [0, 2, 1, 1])
    lab = read_labels(tmp_path / "l.txt")
    assert lab.labels.tolist() == [0, 2, 1, 1] and lab.n_clusters == 3
    with pytest.raises(LengthMismatch):
        read_labels(tmp_path / "l.txt", n=5)
    Y = np.random.default_rng(2).standard_normal((2, 7))
    write_embedding_csv(tmp_path / "Y.csv", Y)
    np.testing.assert_array_equal(read_embedding_csv(tmp_path / "Y.csv"), Y)


def test_label_vector_invariants():
    with pytest.raises(FormatError):
        LabelVector(np.array([0, 3]), n_clusters=2)
    assert LabelVector.from_any([5, -1, 5]).labels.tolist() == [1, 0, 1]


def test_data_matrix_invariants():
    with pytest.raises(FormatError):
        DataMatrix(np.ones((3, 1)))
    with pytest.raises(FormatError):
        DataMatrix(np.array([[1.0, np.nan]]))


def test_euclidean_345():
    D = compute_distance_matrix(DataMatrix(np.array([[0.0, 3.0], [0.0, 4.0]])))
    assert D.values[0, 1] == 5.0
    assert D.metric_tag == "euclidean"


@pytest.mark.parametrize("metric", ["euclidean", "cosine"])
def test_identical_columns_zero(metric):
    D = compute_distance_matrix(DataMatrix(np.array([[1.0, 1.0], [2.0, 2.0], [-0.3, -0.3]])), metric)
    assert D.values[0, 1] == 0.0


def test_cosine_orthogonal_and_zero_norm():
    D = compute_distance_matrix(DataMatrix(np.eye(2)), "cosine")
    assert D.values[0, 1] == 1.0
    with pytest.raises(ZeroNormError):
        compute_distance_matrix(DataMatrix(np.array([[0.0, 1.0], [0.0, 1.0]])), "cosine")


def test_standardize():
    X = DataMatrix(np.array([[1.0, 2.0, 3.0], [5.0, 5.0, 5.0]]))
    Z = standardize(X).values
    np.testing.assert_allclose(Z[0], [-1.2247448714, 0, 1.2247448714])
    np.testing.assert_array_equal(Z[1], 0)


small_data = arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(3, 9)),
                    elements=st.floats(-100, 100, allow_nan=False, width=32))


@settings(max_examples=60, deadline=None)
@given(small_data, st.sampled_from(["euclidean", "cosine"]))
def test_distance_invariants(X, metric):
    norms = np.linalg.norm(X, axis=0)
    if metric == "cosine" and np.any(norms == 0):
        return
    D = compute_distance_matrix(DataMatrix(X), metric).values
    assert np.array_equal(D, D.T) and np.all(np.diag(D) == 0) and np.all(D >= 0)
    if metric == "cosine":
        assert np.all(D <= 2 + 1e-12)
    else:
        n = D.shape[0]
        i, j, k = np.meshgrid(range(n), range(n), range(n), indexing="ij")
        assert np.all(D[i, k] <= D[i, j] + D[j, k] + 1e-9 * (1 + D.max()))


@settings(max_examples=40, deadline=None)
@given(small_data, st.randoms())
def test_distance_permutation_equivariance(X, rnd):
    perm = list(range(X.shape[1]))
    rnd.shuffle(perm)
    D = compute_distance_matrix(DataMatrix(X)).values
    Dp = compute_distance_matrix(DataMatrix(X[:, perm])).values
    np.testing.assert_array_equal(Dp, D[np.ix_(perm, perm)])


def test_distance_matrix_rejects_asymmetry():
    with pytest.raises(FormatError):
        DistanceMatrix(np.array([[0.0, 1.0], [1.0 + 1e-15, 0.0]]))
