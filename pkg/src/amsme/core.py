"""Matrix containers, file formats and pairwise distances.

Samples are stored column-wise: a ``DataMatrix`` holds ``d`` features by
``n`` samples, so ``X.values[:, i]`` is sample ``i``.
"""
from __future__ import annotations

import csv
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import FormatError, InvalidArgument, LengthMismatch, ZeroNormError

FMAT_MAGIC = b"FMAT"
_FMAT_HEADER = struct.Struct("<4sQQ")

METRICS = ("euclidean", "cosine", "precomputed")


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DataMatrix:
    values: np.ndarray
    feature_names: Optional[Sequence[str]] = None
    sample_ids: Optional[Sequence[str]] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise FormatError(f"data matrix must be 2-D, got shape {v.shape}")
        d, n = v.shape
        if n < 2 or d < 1:
            raise FormatError(f"need d >= 1 features and n >= 2 samples, got d={d}, n={n}")
        if not np.all(np.isfinite(v)):
            raise FormatError("data matrix contains NaN or infinite entries")
        if self.feature_names is not None and len(self.feature_names) != d:
            raise FormatError(f"{len(self.feature_names)} feature names for {d} features")
        if self.sample_ids is not None and len(self.sample_ids) != n:
            raise FormatError(f"{len(self.sample_ids)} sample ids for {n} samples")
        object.__setattr__(self, "values", _frozen(v, np.float64))

    @property
    def d(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class DistanceMatrix:
    values: np.ndarray
    metric_tag: str = "precomputed"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise FormatError(f"distance matrix must be square, got shape {v.shape}")
        if v.shape[0] < 2:
            raise FormatError("distance matrix needs at least 2 samples")
        if self.metric_tag not in METRICS:
            raise InvalidArgument(f"unknown metric tag {self.metric_tag!r}")
        if not np.all(np.isfinite(v)):
            raise FormatError("distance matrix contains NaN or infinite entries")
        if np.any(v < 0):
            raise FormatError("distance matrix has negative entries")
        if np.any(np.diag(v) != 0):
            raise FormatError("distance matrix diagonal must be zero")
        if not np.array_equal(v, v.T):
            raise FormatError("distance matrix is not exactly symmetric")
        object.__setattr__(self, "values", _frozen(v, np.float64))

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class LabelVector:
    labels: np.ndarray
    n_clusters: int = field(default=-1)

    def __post_init__(self):
        lab = np.asarray(self.labels)
        if lab.ndim != 1 or lab.size == 0:
            raise FormatError("labels must be a non-empty 1-D vector")
        if not np.issubdtype(lab.dtype, np.integer):
            if not np.all(np.equal(np.mod(lab, 1), 0)):
                raise FormatError("labels must be integers")
        lab = lab.astype(np.int64)
        n_c = self.n_clusters if self.n_clusters >= 0 else int(lab.max()) + 1
        if n_c < 1 or lab.min() < 0 or lab.max() >= n_c:
            raise FormatError(f"labels must lie in [0, {n_c})")
        object.__setattr__(self, "labels", _frozen(lab, np.int64))
        object.__setattr__(self, "n_clusters", int(n_c))

    @classmethod
    def from_any(cls, values) -> "LabelVector":
        """Relabel arbitrary hashable ids to ``0..m-1`` in sorted order."""
        _, inv = np.unique(np.asarray(values), return_inverse=True)
        return cls(inv.ravel())

    def __len__(self):
        return self.labels.size


# --------------------------------------------------------------------------
# file formats


def write_fmat(path, matrix) -> None:
    """Write a 2-D array as FMAT: magic, u64 rows, u64 cols, float32 column-major."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2:
        raise FormatError("fmat payload must be 2-D")
    rows, cols = m.shape
    with open(path, "wb") as fh:
        fh.write(_FMAT_HEADER.pack(FMAT_MAGIC, rows, cols))
        fh.write(np.asfortranarray(m).astype("<f4").tobytes(order="F"))


def read_fmat(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _FMAT_HEADER.size:
        raise FormatError(f"{path}: file too short for an FMAT header")
    magic, rows, cols = _FMAT_HEADER.unpack_from(raw)
    if magic != FMAT_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    payload = raw[_FMAT_HEADER.size:]
    if len(payload) != 4 * rows * cols:
        raise FormatError(f"{path}: expected {rows}x{cols} floats, got {len(payload)} bytes")
    flat = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    return flat.reshape((cols, rows)).T.copy()


def _parse_float(cell, where):
    try:
        v = float(cell)
    except ValueError:
        raise FormatError(f"non-numeric cell {cell!r} at {where}") from None
    if not np.isfinite(v):
        raise FormatError(f"non-finite cell {cell!r} at {where}")
    return v


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise FormatError(f"{path}: empty CSV")
    header = None
    if not all(_is_number(c) for c in rows[0]):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
    width = len(rows[0]) if rows else 0
    values = []
    for r, row in enumerate(rows):
        if len(row) != width:
            raise FormatError(f"{path}: ragged row {r + 1} ({len(row)} cells, expected {width})")
        values.append([_parse_float(c, f"row {r + 1}, column {j + 1}") for j, c in enumerate(row)])
    if header is not None and len(header) != width:
        raise FormatError(f"{path}: header has {len(header)} names for {width} columns")
    return header, np.array(values, dtype=np.float64).reshape(len(values), width)


def load_dataset(path, format="csv", transpose=False) -> DataMatrix:
    """Read a numeric data file into a ``DataMatrix``.

    CSV files are laid out features-by-samples unless ``transpose`` is set,
    in which case each file row is one sample. A non-numeric first row is
    taken as a header naming the file's columns: feature names for
    samples-as-rows files, sample ids otherwise.
    """
    if format == "csv":
        header, m = _read_csv(path)
        if transpose:
            return DataMatrix(m.T, feature_names=header)
        return DataMatrix(m, sample_ids=header)
    if format == "fmat":
        m = read_fmat(path)
        return DataMatrix(m.T if transpose else m)
    raise InvalidArgument(f"unknown data format {format!r}")


def load_distance_matrix(path) -> DistanceMatrix:
    """Read a square FMAT file as a precomputed distance matrix."""
    return DistanceMatrix(read_fmat(path), metric_tag="precomputed")


def write_labels(path, labels) -> None:
    lab = labels.labels if isinstance(labels, LabelVector) else np.asarray(labels)
    Path(path).write_text("".join(f"{int(v)}\n" for v in lab))


def read_labels(path, n=None) -> LabelVector:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    try:
        vals = np.array([int(ln) for ln in lines], dtype=np.int64)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    if n is not None and vals.size != n:
        raise LengthMismatch(f"{path}: {vals.size} labels for {n} samples")
    if vals.size and vals.min() < 0:
        return LabelVector.from_any(vals)
    return LabelVector(vals)


def write_embedding_csv(path, Y) -> None:
    """Write a ``k x n`` coordinate array as ``n`` rows of ``k`` columns."""
    Y = np.asarray(Y)
    with open(path, "w") as fh:
        for row in Y.T:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_embedding_csv(path) -> np.ndarray:
    """Inverse of :func:`write_embedding_csv`; returns ``k x n``."""
    _, m = _read_csv(path)
    return m.T


# --------------------------------------------------------------------------
# distances


def standardize(X: DataMatrix) -> DataMatrix:
    """Z-score every feature across samples; constant features are only centered."""
    v = X.values
    mu = v.mean(axis=1, keepdims=True)
    sd = v.std(axis=1, keepdims=True)
    sd[sd == 0] = 1.0
    return DataMatrix((v - mu) / sd, X.feature_names, X.sample_ids)


def compute_distance_matrix(X: DataMatrix, metric="euclidean") -> DistanceMatrix:
    """Dense pairwise distances between the samples (columns) of ``X``.

    ``cosine`` is ``1 - cos(x_i, x_j)``, evaluated as half the squared
    Euclidean distance between unit-normalised columns so that identical
    directions give exactly zero.
    """
    samples = X.values.T
    if metric == "euclidean":
        cond = pdist(samples, "euclidean")
    elif metric == "cosine":
        norms = np.linalg.norm(samples, axis=1)
        if np.any(norms == 0):
            bad = np.flatnonzero(norms == 0)
            raise ZeroNormError(f"cosine distance undefined for all-zero samples {bad[:5].tolist()}")
        cond = 0.5 * pdist(samples / norms[:, None], "sqeuclidean")
    else:
        raise InvalidArgument(f"unknown metric {metric!r}")
    return DistanceMatrix(squareform(cond, checks=False), metric_tag=metric)
