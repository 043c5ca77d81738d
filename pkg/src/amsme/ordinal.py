"""Rank-based (ordinal) distances.

The rank of sample ``j`` around sample ``i`` counts how many samples are
strictly closer to ``i`` than ``j`` is, the self index included. Tied
distances therefore share a rank and no secondary ordering is imposed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DistanceMatrix
from .errors import FormatError, InvalidArgument


@dataclass(frozen=True)
class OrdinalMatrix:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise FormatError(f"ordinal matrix must be square, got {v.shape}")
        if not np.all(np.equal(np.mod(v, 1), 0)):
            raise FormatError("ordinal matrix entries must be integers")
        v = v.astype(np.int64)
        n = v.shape[0]
        if v.min() < 0 or v.max() > n - 1:
            raise FormatError(f"ordinal entries must lie in [0, {n - 1}]")
        if np.any(np.diag(v) != 0) or not np.array_equal(v, v.T):
            raise FormatError("ordinal matrix must be symmetric with zero diagonal")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _as_array(D):
    return D.values if isinstance(D, DistanceMatrix) else np.asarray(D, dtype=np.float64)


def ordinal_rank(D, i: int, j: int) -> int:
    """Number of entries in row ``i`` of ``D`` strictly below ``D[i, j]``."""
    v = _as_array(D)
    n = v.shape[0]
    if not (0 <= i < n and 0 <= j < n):
        raise InvalidArgument(f"index ({i}, {j}) out of range for n={n}")
    return int(np.count_nonzero(v[i] < v[i, j]))


def rank_rows(D) -> np.ndarray:
    """Directed rank matrix ``R[i, j] = ordinal_rank(D, i, j)`` (not symmetric).

    Each row is sorted once; a left-sided binary search into the sorted row
    returns the count of strictly smaller values, which is exactly the rank
    under ties.
    """
    v = _as_array(D)
    srt = np.sort(v, axis=1, kind="stable")
    R = np.empty(v.shape, dtype=np.int64)
    for i in range(v.shape[0]):
        R[i] = np.searchsorted(srt[i], v[i], side="left")
    return R


def ordinal_matrix(D) -> OrdinalMatrix:
    """Symmetrised ordinal distance ``O[i, j] = max(rank_i(j), rank_j(i))``."""
    R = rank_rows(D)
    return OrdinalMatrix(np.maximum(R, R.T))
