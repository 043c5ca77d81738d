"""Neighbour-embedding engine for precomputed distance matrices.

A compact UMAP-style layout method:

* exact k-nearest neighbours read off the dense distance matrix,
* a fuzzy neighbour graph with per-point offset ``rho`` and bandwidth
  ``beta`` found by bisection,
* classical MDS (or spectral / random) initialisation,
* epoch-based stochastic gradient descent on the fuzzy cross-entropy with
  negative sampling.

All randomness is drawn from counter-based Philox streams keyed by
``(seed, epoch)``; within an epoch the draws are indexed by edge, so a run is
a pure function of the inputs and the seed.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, asdict

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg
from scipy.optimize import curve_fit
from numba import njit, prange

from .core import DistanceMatrix
from .errors import DegenerateInput, InvalidArgument
from .rng import stream

log = logging.getLogger(__name__)

INIT_METHODS = ("classical_mds", "spectral", "random")
OPT_MODES = ("deterministic", "parallel")
SMOOTH_K_TOLERANCE = 1e-5
INIT_STD = 1e-2
_STREAM_INIT = 0x1417
_STREAM_EPOCH = 0xE90C


@dataclass(frozen=True)
class EmbedConfig:
    k_embed: int = 2
    n_neighbors: int = 15
    min_dist: float = 0.1
    n_epochs: int = 500
    learning_rate: float = 1.0
    negative_samples: int = 5
    seed: int = 0
    init: str = "classical_mds"
    mode: str = "deterministic"

    def __post_init__(self):
        if self.k_embed < 1:
            raise InvalidArgument("k_embed must be >= 1")
        if self.n_neighbors < 2:
            raise InvalidArgument("n_neighbors must be >= 2")
        if self.n_epochs < 1:
            raise InvalidArgument("n_epochs must be >= 1")
        if self.negative_samples < 0:
            raise InvalidArgument("negative_samples must be >= 0")
        if self.min_dist < 0:
            raise InvalidArgument("min_dist must be >= 0")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidArgument("seed must be an unsigned 64-bit integer")
        if self.init not in INIT_METHODS:
            raise InvalidArgument(f"init must be one of {INIT_METHODS}")
        if self.mode not in OPT_MODES:
            raise InvalidArgument(f"mode must be one of {OPT_MODES}")

    def replace(self, **changes) -> "EmbedConfig":
        return EmbedConfig(**{**asdict(self), **changes})


@dataclass(frozen=True)
class Embedding:
    Y: np.ndarray  # k_embed x n
    stage_tag: str = "stage1"

    def __post_init__(self):
        Y = np.asarray(self.Y, dtype=np.float64)
        if Y.ndim != 2:
            raise InvalidArgument("embedding must be 2-D (k_embed x n)")
        if not np.all(np.isfinite(Y)):
            raise DegenerateInput("embedding contains non-finite coordinates")
        Y = Y.copy()
        Y.setflags(write=False)
        object.__setattr__(self, "Y", Y)

    @property
    def n(self) -> int:
        return self.Y.shape[1]

    @property
    def k_embed(self) -> int:
        return self.Y.shape[0]


# --------------------------------------------------------------------------
# fuzzy neighbour graph


def nearest_neighbors(D, n_neighbors):
    """Indices and distances of the ``n_neighbors`` closest samples, self excluded.

    Ties are broken by the lower sample index.
    """
    D = np.asarray(D, dtype=np.float64)
    n = D.shape[0]
    masked = D.copy()
    np.fill_diagonal(masked, np.inf)
    idx = np.argsort(masked, axis=1, kind="stable")[:, :n_neighbors]
    return idx, np.take_along_axis(D, idx, axis=1)


def smooth_knn_dist(knn_dists, n_iter=64, tol=SMOOTH_K_TOLERANCE):
    """Per-row ``(beta, rho)`` with ``sum_j exp(-max(0, d_j - rho) / beta) = log2(K)``.

    ``rho`` is the distance to the nearest neighbour. Rows whose target
    cannot be reached (too many neighbours at distance ``rho``) drive
    ``beta`` towards zero, leaving those neighbours at weight 1.
    """
    knn_dists = np.asarray(knn_dists, dtype=np.float64)
    n, K = knn_dists.shape
    target = np.log2(K)
    rho = knn_dists[:, 0].copy()
    excess = np.maximum(knn_dists - rho[:, None], 0.0)
    beta = np.empty(n)
    for i in range(n):
        lo, hi, mid = 0.0, np.inf, 1.0
        row = excess[i]
        for _ in range(n_iter):
            psum = np.exp(-row / mid).sum()
            if abs(psum - target) < tol:
                break
            if psum > target:
                hi = mid
                mid = (lo + hi) / 2.0
            else:
                lo = mid
                mid = mid * 2.0 if hi == np.inf else (lo + hi) / 2.0
        beta[i] = mid
    return beta, rho


def fuzzy_graph(D, n_neighbors):
    """Symmetric fuzzy neighbour graph as a CSR matrix.

    Directed memberships ``w[i->j] = exp(-max(0, d_ij - rho_i) / beta_i)`` are
    combined with the probabilistic union ``w + w.T - w * w.T``.
    """
    n = np.asarray(D).shape[0]
    idx, dists = nearest_neighbors(D, n_neighbors)
    beta, rho = smooth_knn_dist(dists)
    w = np.exp(-np.maximum(dists - rho[:, None], 0.0) / beta[:, None])
    rows = np.repeat(np.arange(n), n_neighbors)
    W = scipy.sparse.csr_matrix((w.ravel(), (rows, idx.ravel())), shape=(n, n))
    Wt = W.T.tocsr()
    G = (W + Wt - W.multiply(Wt)).tocsr()
    G.sum_duplicates()
    G.sort_indices()
    G.eliminate_zeros()
    return G


def find_ab_params(min_dist, spread=1.0):
    """Least-squares fit of ``1 / (1 + a t^(2b))`` to the offset-exponential target."""

    def curve(t, a, b):
        return 1.0 / (1.0 + a * t ** (2 * b))

    t = np.linspace(0, spread * 3, 300)
    target = ab_target_curve(t, min_dist, spread)
    (a, b), _ = curve_fit(curve, t, target)
    return float(a), float(b)


def ab_target_curve(t, min_dist, spread=1.0):
    t = np.asarray(t, dtype=np.float64)
    return np.where(t < min_dist, 1.0, np.exp(-(t - min_dist) / spread))


# --------------------------------------------------------------------------
# initialisation


def _fix_signs(V):
    # make the largest-magnitude entry of every column positive
    pivots = np.abs(V).argmax(axis=0)
    signs = np.sign(V[pivots, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def classical_mds(D, k, seed=0):
    """Torgerson scaling: top-``k`` eigenpairs of ``-1/2 J D^2 J``.

    Returns ``n x k`` coordinates; negative eigenvalues are clipped to zero.
    """
    D = np.asarray(D, dtype=np.float64)
    n = D.shape[0]
    if k > n:
        raise InvalidArgument(f"cannot extract {k} MDS axes from {n} samples")
    D2 = D ** 2
    row = D2.mean(axis=1, keepdims=True)
    B = -0.5 * (D2 - row - row.T + D2.mean())
    B = 0.5 * (B + B.T)
    if n <= 2000 or k >= n - 1:
        vals, vecs = scipy.linalg.eigh(B, subset_by_index=[n - k, n - 1])
    else:
        v0 = stream(seed, _STREAM_INIT, 1).standard_normal(n)
        vals, vecs = scipy.sparse.linalg.eigsh(B, k=k, which="LA", v0=v0)
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], _fix_signs(vecs[:, order])
    return vecs * np.sqrt(np.clip(vals, 0.0, None))


def spectral_layout(graph, k, seed=0):
    """Eigenvectors 2..k+1 of the symmetric normalised Laplacian of ``graph``."""
    n = graph.shape[0]
    deg = np.asarray(graph.sum(axis=1)).ravel()
    inv = 1.0 / np.sqrt(np.where(deg > 0, deg, 1.0))
    L = scipy.sparse.identity(n) - scipy.sparse.diags(inv) @ graph @ scipy.sparse.diags(inv)
    if n <= 2000 or k + 1 >= n:
        L = L.toarray()
        vals, vecs = scipy.linalg.eigh(0.5 * (L + L.T), subset_by_index=[0, min(k, n - 1)])
    else:
        v0 = stream(seed, _STREAM_INIT, 2).standard_normal(n)
        vals, vecs = scipy.sparse.linalg.eigsh(L, k=k + 1, which="SM", v0=v0)
    order = np.argsort(vals)
    vecs = _fix_signs(vecs[:, order])[:, 1:k + 1]
    if vecs.shape[1] < k:
        vecs = np.hstack([vecs, np.zeros((n, k - vecs.shape[1]))])
    return vecs


def initial_layout(D, graph, cfg: EmbedConfig):
    """Starting coordinates ``n x k_embed``, centred, each axis at std ``INIT_STD``."""
    n = D.shape[0]
    rng = stream(cfg.seed, _STREAM_INIT, 0)
    if cfg.init == "classical_mds":
        Y = classical_mds(D, cfg.k_embed, cfg.seed)
    elif cfg.init == "spectral":
        Y = spectral_layout(graph, cfg.k_embed, cfg.seed)
    else:
        Y = rng.uniform(-10, 10, size=(n, cfg.k_embed))
    Y = Y - Y.mean(axis=0)
    sd = Y.std(axis=0)
    for ax in np.flatnonzero(sd < 1e-12 * max(1.0, float(np.abs(D).max()))):
        # collapsed axis (e.g. rank-deficient input): replace with seeded noise
        Y[:, ax] = rng.standard_normal(n)
        Y[:, ax] -= Y[:, ax].mean()
    return Y * (INIT_STD / Y.std(axis=0))


# --------------------------------------------------------------------------
# optimisation


@njit(cache=True, fastmath=False)
def _clip(v):
    if v > 4.0:
        return 4.0
    if v < -4.0:
        return -4.0
    return v


@njit(cache=True)
def _sweep(Y, head, tail, eps, next_sample, eps_neg, next_neg, draws, a, b, alpha, epoch):
    dim = Y.shape[1]
    for e in range(head.shape[0]):
        _edge_update(Y, head, tail, eps, next_sample, eps_neg, next_neg, draws, a, b, alpha, epoch, e, dim)


@njit(cache=True, parallel=True)
def _sweep_parallel(Y, head, tail, eps, next_sample, eps_neg, next_neg, draws, a, b, alpha, epoch):
    dim = Y.shape[1]
    for e in prange(head.shape[0]):
        _edge_update(Y, head, tail, eps, next_sample, eps_neg, next_neg, draws, a, b, alpha, epoch, e, dim)


@njit(cache=True)
def _edge_update(Y, head, tail, eps, next_sample, eps_neg, next_neg, draws, a, b, alpha, epoch, e, dim):
    if next_sample[e] > epoch:
        return
    i = head[e]
    j = tail[e]
    d2 = 0.0
    for c in range(dim):
        diff = Y[i, c] - Y[j, c]
        d2 += diff * diff
    if d2 > 0.0:
        coeff = -2.0 * a * b * d2 ** (b - 1.0) / (a * d2 ** b + 1.0)
    else:
        coeff = 0.0
    for c in range(dim):
        g = _clip(coeff * (Y[i, c] - Y[j, c]))
        Y[i, c] += g * alpha
        Y[j, c] -= g * alpha
    next_sample[e] += eps[e]

    if eps_neg[e] <= 0.0:
        return
    n_neg = int((epoch - next_neg[e]) / eps_neg[e])
    if n_neg > draws.shape[1]:
        n_neg = draws.shape[1]
    for p in range(n_neg):
        k = draws[e, p]
        if k == i:
            continue
        d2 = 0.0
        for c in range(dim):
            diff = Y[i, c] - Y[k, c]
            d2 += diff * diff
        if d2 > 0.0:
            coeff = 2.0 * b / ((0.001 + d2) * (a * d2 ** b + 1.0))
        else:
            coeff = 0.0
        for c in range(dim):
            if coeff > 0.0:
                g = _clip(coeff * (Y[i, c] - Y[k, c]))
            else:
                g = 0.0
            Y[i, c] += g * alpha
    next_neg[e] += n_neg * eps_neg[e]


def edge_schedule(graph, n_epochs):
    """COO edge list and epochs-between-samples for each directed edge.

    Edges too weak to be sampled once in ``n_epochs`` are dropped.
    """
    G = graph.tocoo()
    w = G.data
    keep = w >= w.max() / float(n_epochs)
    head = G.row[keep].astype(np.int64)
    tail = G.col[keep].astype(np.int64)
    w = w[keep]
    eps = w.max() / w
    return head, tail, eps


def optimize_layout(Y, graph, a, b, cfg: EmbedConfig, callback=None):
    """Run ``cfg.n_epochs`` sweeps of attraction/repulsion updates on ``Y`` (n x k, in place).

    ``callback(epoch, Y)`` is invoked after every epoch if given.
    """
    n = Y.shape[0]
    head, tail, eps = edge_schedule(graph, cfg.n_epochs)
    next_sample = eps.copy()
    if cfg.negative_samples > 0:
        eps_neg = eps / cfg.negative_samples
    else:
        eps_neg = np.zeros_like(eps)
    next_neg = eps_neg.copy()
    width = cfg.negative_samples + 2
    sweep = _sweep_parallel if cfg.mode == "parallel" else _sweep
    for epoch in range(cfg.n_epochs):
        draws = stream(cfg.seed, _STREAM_EPOCH, epoch).integers(0, n, size=(head.size, width))
        alpha = cfg.learning_rate * (1.0 - epoch / float(cfg.n_epochs))
        sweep(Y, head, tail, eps, next_sample, eps_neg, next_neg, draws, a, b, alpha, epoch)
        if callback is not None:
            callback(epoch, Y)
    return Y


def cross_entropy(graph, Y, a, b, eps=1e-4):
    """Fuzzy-set cross-entropy between ``graph`` and the low-dimensional kernel of ``Y`` (n x k).

    Dense over all off-diagonal pairs; meant for diagnostics at small n.
    """
    P = np.asarray(graph.toarray() if scipy.sparse.issparse(graph) else graph, dtype=np.float64)
    diff = Y[:, None, :] - Y[None, :, :]
    d2 = (diff ** 2).sum(-1)
    Q = 1.0 / (1.0 + a * d2 ** b)
    Q = np.clip(Q, eps, 1 - eps)
    off = ~np.eye(P.shape[0], dtype=bool)
    ce = -(P * np.log(Q) + (1 - P) * np.log(1 - Q))
    return float(ce[off].sum())


def embed(D_in, cfg: EmbedConfig = EmbedConfig(), stage_tag="stage1", callback=None) -> Embedding:
    """Lay out a precomputed distance matrix in ``cfg.k_embed`` dimensions."""
    D = D_in.values if isinstance(D_in, DistanceMatrix) else np.asarray(D_in, dtype=np.float64)
    n = D.shape[0]
    if not cfg.n_neighbors < n:
        raise InvalidArgument(f"n_neighbors={cfg.n_neighbors} must be < n={n}")
    off = D[~np.eye(n, dtype=bool)]
    if not np.any(off > 0):
        raise DegenerateInput("distance matrix is identically zero off the diagonal")
    graph = fuzzy_graph(D, cfg.n_neighbors)
    a, b = find_ab_params(cfg.min_dist)
    Y = initial_layout(D, graph, cfg)
    log.debug("embedding n=%d with %d graph edges, a=%.4f b=%.4f", n, graph.nnz, a, b)
    optimize_layout(Y, graph, a, b, cfg, callback=callback)
    return Embedding(Y.T, stage_tag=stage_tag)
