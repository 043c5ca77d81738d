"""Adaptive neighbourhood scales and the ordinal similarity graph.

Pipeline of this module, for an ordinal matrix ``O``:

1. ``neighborhood_budget`` picks how many of the smallest ranks per row to
   inspect.
2. ``local_scales`` finds, per row, the largest jump between consecutive
   sorted ranks and turns it into a per-sample neighbourhood size.
3. ``similarity_graph`` evaluates a Gaussian-type kernel on ``O`` with
   pairwise bandwidths, min-symmetrises it and adds two-hop connections.
4. ``stage1_distance`` turns the similarity into a distance, ``1 - S``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DistanceMatrix
from .errors import FormatError, InvalidArgument
from .ordinal import OrdinalMatrix

SECONDARY_MODES = ("matmul", "hadamard")


@dataclass(frozen=True)
class NeighborhoodScales:
    """Per-row gap statistics.

    ``M`` holds the ``k`` smallest off-diagonal ranks of each row, ``F`` their
    consecutive differences, ``a``/``b`` the largest gap and its 1-based
    position, ``s`` the chosen 1-based neighbourhood index into ``M``.
    """

    k: int
    M: np.ndarray
    F: np.ndarray
    a: np.ndarray
    b: np.ndarray
    s: np.ndarray

    @property
    def n(self) -> int:
        return self.M.shape[0]


@dataclass(frozen=True)
class SimilarityGraph:
    S: np.ndarray
    tau_debug: Optional[float] = None

    def __post_init__(self):
        S = np.asarray(self.S, dtype=np.float64)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise FormatError(f"similarity matrix must be square, got {S.shape}")
        if not np.array_equal(S, S.T):
            raise FormatError("similarity matrix must be symmetric")
        if np.any(S < 0) or np.any(S > 1) or np.any(np.diag(S) != 1):
            raise FormatError("similarity entries must lie in [0, 1] with unit diagonal")
        S = S.copy()
        S.setflags(write=False)
        object.__setattr__(self, "S", S)

    @property
    def n(self) -> int:
        return self.S.shape[0]


def neighborhood_budget(n: int, n_c: int) -> int:
    """``k = 2 * max(floor(ln(2n / n_c)), 3)``, clamped to ``n - 1``."""
    if n < 2:
        raise InvalidArgument(f"need n >= 2 samples, got {n}")
    if n_c < 1 or n_c > n:
        raise InvalidArgument(f"cluster count must be in [1, {n}], got {n_c}")
    k = 2 * max(math.floor(math.log(2.0 * n / n_c)), 3)
    return min(k, n - 1)


def local_scales(O, k: int) -> NeighborhoodScales:
    v = O.values if isinstance(O, OrdinalMatrix) else np.asarray(O, dtype=np.int64)
    n = v.shape[0]
    if not 2 <= k <= n - 1:
        raise InvalidArgument(f"neighbourhood budget must satisfy 2 <= k <= {n - 1}, got {k}")
    off = v.astype(np.int64, copy=True)
    big = np.iinfo(np.int64).max
    np.fill_diagonal(off, big)
    M = np.sort(off, axis=1)[:, :k]
    F = np.diff(M, axis=1)
    a = F.max(axis=1)
    b = F.argmax(axis=1) + 1  # argmax returns the first maximum
    floor = math.ceil(k / 2) - 1
    s = np.where(a > 1, np.maximum(b, floor), k - 1)
    return NeighborhoodScales(k=k, M=M, F=F, a=a, b=b, s=s)


def bandwidths(scales: NeighborhoodScales) -> np.ndarray:
    """``sigma[i, j] = M[i, s[j]]`` with ``s`` 1-based; floored at 1."""
    sigma = scales.M[:, np.asarray(scales.s) - 1].astype(np.float64)
    # a zero rank only occurs for coincident samples
    return np.maximum(sigma, 1.0)


def kernel_matrix(O, scales: NeighborhoodScales) -> np.ndarray:
    """Un-symmetrised kernel ``A[i, j] = exp(-O[i, j]^2 / sigma[i, j]^2)``."""
    v = O.values if isinstance(O, OrdinalMatrix) else np.asarray(O)
    v = v.astype(np.float64)
    A = np.exp(-(v ** 2) / bandwidths(scales) ** 2)
    np.fill_diagonal(A, 1.0)
    return A


def similarity_graph(O, scales: NeighborhoodScales, secondary_connection="matmul") -> SimilarityGraph:
    """Kernel, then ``min(A, A.T)``, then ``S = min(1, A @ A)``.

    ``secondary_connection="hadamard"`` squares entrywise instead of taking
    the matrix product.
    """
    if secondary_connection not in SECONDARY_MODES:
        raise InvalidArgument(f"secondary_connection must be one of {SECONDARY_MODES}")
    A = kernel_matrix(O, scales)
    A = np.minimum(A, A.T)
    if secondary_connection == "matmul":
        A2 = A @ A
        # BLAS may round the two triangles differently
        A2 = np.triu(A2) + np.triu(A2, 1).T
    else:
        A2 = A * A
    S = np.minimum(1.0, A2)
    np.fill_diagonal(S, 1.0)
    return SimilarityGraph(S)


def stage1_distance(graph: SimilarityGraph) -> DistanceMatrix:
    D = 1.0 - graph.S
    np.fill_diagonal(D, 0.0)
    return DistanceMatrix(D, metric_tag="precomputed")


def edge_report(graph: SimilarityGraph, tau: float = 0.5, labels=None):
    """Pairs ``i < j`` with ``S[i, j] > tau``.

    Returns a list of ``(i, j, s, flag)`` where ``flag`` is ``"intra"`` or
    ``"inter"`` when labels are given and ``""`` otherwise.
    """
    iu, ju = np.nonzero(np.triu(graph.S > tau, 1))
    lab = None if labels is None else np.asarray(getattr(labels, "labels", labels))
    out = []
    for i, j in zip(iu.tolist(), ju.tolist()):
        flag = "" if lab is None else ("intra" if lab[i] == lab[j] else "inter")
        out.append((i, j, float(graph.S[i, j]), flag))
    return out
