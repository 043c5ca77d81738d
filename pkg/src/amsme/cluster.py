"""Pseudo-labelling by k-means and clustering accuracy (ACC)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import LabelVector
from .embed import Embedding
from .errors import InvalidArgument, LengthMismatch


@dataclass(frozen=True)
class KMeansResult:
    labels: LabelVector
    centroids: np.ndarray  # k_embed x n_c
    inertia: float
    iterations_run: int


def _sq_dists(P, C):
    # P: n x k points, C: m x k centres
    return ((P[:, None, :] - C[None, :, :]) ** 2).sum(axis=-1)


def kmeans_plusplus(P, n_c, rng):
    """k-means++ seeding on the rows of ``P``; returns centre indices."""
    n = P.shape[0]
    chosen = [int(rng.integers(n))]
    closest = ((P - P[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, n_c):
        total = closest.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=closest / total))
        else:
            # every point coincides with a centre already; fall back to unused indices
            free = np.setdiff1d(np.arange(n), chosen)
            nxt = int(rng.choice(free))
        chosen.append(nxt)
        closest = np.minimum(closest, ((P - P[nxt]) ** 2).sum(axis=1))
    return np.array(chosen)


def _repair_empty(P, labels, centres, n_c):
    """Move the point farthest from its centroid into each empty cluster."""
    for c in range(n_c):
        if np.any(labels == c):
            continue
        resid = ((P - centres[labels]) ** 2).sum(axis=1)
        counts = np.bincount(labels, minlength=n_c)
        resid[counts[labels] <= 1] = -1.0  # never empty another cluster
        far = int(resid.argmax())
        labels[far] = c
        centres[c] = P[far]
    return labels


def lloyd(P, centres, max_iter, history=None):
    """Lloyd iterations from the given centres until assignments stop changing."""
    n_c = centres.shape[0]
    labels = _sq_dists(P, centres).argmin(axis=1)
    labels = _repair_empty(P, labels, centres, n_c)
    it = 0
    for it in range(1, max_iter + 1):
        centres = np.stack([P[labels == c].mean(axis=0) for c in range(n_c)])
        if history is not None:
            history.append(float(((P - centres[labels]) ** 2).sum()))
        new = _sq_dists(P, centres).argmin(axis=1)
        new = _repair_empty(P, new, centres, n_c)
        if np.array_equal(new, labels):
            break
        labels = new
    centres = np.stack([P[labels == c].mean(axis=0) for c in range(n_c)])
    inertia = float(((P - centres[labels]) ** 2).sum())
    return labels, centres, inertia, it


def kmeans(Y, n_c, seed=0, n_init=10, max_iter=300) -> KMeansResult:
    """Best-of-``n_init`` k-means on the columns of ``Y`` (``k x n``).

    Restart ``r`` is seeded with ``seed + r``; the lowest inertia wins and
    ties go to the earliest restart.
    """
    Yv = Y.Y if isinstance(Y, Embedding) else np.asarray(Y, dtype=np.float64)
    P = Yv.T
    n = P.shape[0]
    if n_c < 1 or n_c > n:
        raise InvalidArgument(f"cluster count must be in [1, {n}], got {n_c}")
    if n_init < 1 or max_iter < 1:
        raise InvalidArgument("n_init and max_iter must be >= 1")
    best = None
    for r in range(n_init):
        rng = np.random.default_rng(seed + r)
        centres = P[kmeans_plusplus(P, n_c, rng)].copy()
        labels, centres, inertia, it = lloyd(P, centres, max_iter)
        if best is None or inertia < best[2]:
            best = (labels, centres, inertia, it)
    labels, centres, inertia, it = best
    return KMeansResult(LabelVector(labels, n_clusters=n_c), centres.T.copy(), inertia, it)


def confusion_matrix(pred, truth):
    p = np.asarray(getattr(pred, "labels", pred))
    t = np.asarray(getattr(truth, "labels", truth))
    _, pi = np.unique(p, return_inverse=True)
    _, ti = np.unique(t, return_inverse=True)
    C = np.zeros((pi.max() + 1, ti.max() + 1), dtype=np.int64)
    np.add.at(C, (pi, ti), 1)
    return C


def accuracy(pred, truth) -> float:
    """Fraction of samples matched under the best one-to-one cluster/class map."""
    p = np.asarray(getattr(pred, "labels", pred))
    t = np.asarray(getattr(truth, "labels", truth))
    if p.size != t.size:
        raise LengthMismatch(f"{p.size} predictions vs {t.size} truth labels")
    if p.size == 0:
        raise LengthMismatch("accuracy of empty label vectors is undefined")
    C = confusion_matrix(p, t)
    m = max(C.shape)
    square = np.zeros((m, m), dtype=np.int64)
    square[: C.shape[0], : C.shape[1]] = C
    rows, cols = linear_sum_assignment(-square)
    return float(square[rows, cols].sum()) / p.size


def neighbor_purity(Y, labels, k=5) -> float:
    """Mean fraction of each point's ``k`` nearest embedding neighbours sharing its label."""
    Yv = np.asarray(getattr(Y, "Y", Y), dtype=np.float64).T
    lab = np.asarray(getattr(labels, "labels", labels))
    d2 = _sq_dists(Yv, Yv)
    np.fill_diagonal(d2, np.inf)
    nn = np.argsort(d2, axis=1, kind="stable")[:, :k]
    return float((lab[nn] == lab[:, None]).mean())
