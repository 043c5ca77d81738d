"""Monte Carlo checks of the two distance-ordering results.

``mc_order_probability``/``cantelli_bound`` concern two isotropic Gaussian
classes: how often is a within-class squared distance at least as large as
a between-class one? ``mc_rank_flip_rate``/``flip_rate_bound`` concern a
fixed point set perturbed by Gaussian noise: how often does the order of two
distances from a common anchor flip?

Mean separations enter the closed forms per coordinate, i.e. as
``||mu1 - mu2||^2 / d``, so the expected gap is
``E[Z] = d * (sigma2^2 - sigma1^2) + ||mu1 - mu2||^2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DataMatrix, compute_distance_matrix
from .errors import InvalidArgument, PreconditionViolated
from .rng import stream

SWEEP_DIMS = (2, 10, 20, 50, 100, 200, 500, 1000)
_CHUNK = 4_000_000  # floats per sampling block


@dataclass(frozen=True)
class GaussianPairModel:
    mu1: np.ndarray
    mu2: np.ndarray
    sigma1: float
    sigma2: float

    def __post_init__(self):
        mu1 = np.atleast_1d(np.asarray(self.mu1, dtype=np.float64))
        mu2 = np.atleast_1d(np.asarray(self.mu2, dtype=np.float64))
        if mu1.shape != mu2.shape or mu1.ndim != 1:
            raise InvalidArgument("mu1 and mu2 must be vectors of equal length")
        if self.sigma1 <= 0 or self.sigma2 <= 0:
            raise InvalidArgument("sigma1 and sigma2 must be positive")
        object.__setattr__(self, "mu1", mu1)
        object.__setattr__(self, "mu2", mu2)

    @classmethod
    def centered(cls, d, sigma1, sigma2, separation=0.0):
        """Class 1 at the origin, class 2 at distance ``separation`` along the diagonal."""
        mu2 = np.full(d, separation / np.sqrt(d))
        return cls(np.zeros(d), mu2, sigma1, sigma2)

    @property
    def d(self) -> int:
        return self.mu1.size

    @property
    def mean_gap_sq(self) -> float:
        """Squared mean separation per coordinate."""
        return float(((self.mu1 - self.mu2) ** 2).sum()) / self.d

    @property
    def separability(self) -> float:
        return self.sigma2 ** 2 - self.sigma1 ** 2 + self.mean_gap_sq

    def swapped(self) -> "GaussianPairModel":
        return GaussianPairModel(self.mu2, self.mu1, self.sigma2, self.sigma1)


def _failure_fraction(model, m, rng):
    """Fraction of ``m`` fresh triples with ``|x_i - x_j|^2 >= |x_i - y_k|^2``."""
    d = model.d
    hits = 0
    block = max(1, _CHUNK // (3 * d))
    done = 0
    while done < m:
        b = min(block, m - done)
        xi = model.mu1 + model.sigma1 * rng.standard_normal((b, d))
        xj = model.mu1 + model.sigma1 * rng.standard_normal((b, d))
        yk = model.mu2 + model.sigma2 * rng.standard_normal((b, d))
        dij = ((xi - xj) ** 2).sum(axis=1)
        dik = ((xi - yk) ** 2).sum(axis=1)
        hits += int(np.count_nonzero(dij >= dik))
        done += b
    return hits / m


def mc_order_probability(model: GaussianPairModel, pairs_per_trial=2000, trials=10, seed=0):
    """Estimate ``P(d_ij >= d_ik)`` as the mean over ``trials``; returns ``(estimate, stderr)``.

    The standard error is the across-trial standard deviation over
    ``sqrt(trials)`` (zero when ``trials == 1``).
    """
    if pairs_per_trial < 1 or trials < 1:
        raise InvalidArgument("pairs_per_trial and trials must be >= 1")
    rates = np.array([_failure_fraction(model, pairs_per_trial, stream(seed, 0x7A1, t))
                      for t in range(trials)])
    se = rates.std(ddof=1) / np.sqrt(trials) if trials > 1 else 0.0
    return float(rates.mean()), float(se)


def gap_moments(model: GaussianPairModel):
    """``(E[Z], upper bound on Var(Z))`` for ``Z = d_ik - d_ij``."""
    d = model.d
    s1, s2 = model.sigma1 ** 2, model.sigma2 ** 2
    g = model.mean_gap_sq
    mean = d * (s2 - s1 + g)
    var = 8 * d * g * (s1 + s2) + 4 * d * (s1 + s2) ** 2 + 16 * d * s1 ** 2
    return mean, var


def theoretical_bound_thm1(model: GaussianPairModel) -> float:
    """Cantelli lower bound on ``P(Z > 0)``: ``E[Z]^2 / (Var + E[Z]^2)``."""
    if model.separability <= 0:
        raise InvalidArgument(f"separability {model.separability:.4g} must be positive")
    mean, var = gap_moments(model)
    return 1.0 - var / (var + mean ** 2)


cantelli_bound = theoretical_bound_thm1


@dataclass(frozen=True)
class NoiseTrialConfig:
    base_points: DataMatrix
    noise_sigma: float
    trials: int
    triple: tuple

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidArgument("trials must be >= 1")
        if not self.noise_sigma >= 0:
            raise InvalidArgument("noise_sigma must be non-negative")
        i, j, k = (int(t) for t in self.triple)
        n = self.base_points.n
        if not all(0 <= t < n for t in (i, j, k)):
            raise InvalidArgument(f"triple {self.triple} out of range for n={n}")
        D = compute_distance_matrix(self.base_points).values
        if not D[i, j] < D[i, k]:
            raise PreconditionViolated(f"need D[i,j] < D[i,k], got {D[i, j]:.6g} >= {D[i, k]:.6g}")
        object.__setattr__(self, "triple", (i, j, k))


def flip_rate_bound(dij, dik, d, sigma) -> float:
    """Leading-order Chebyshev bound ``16 d sigma^2 (Dij^2 + Dik^2) / (Dik^2 - Dij^2)^2``."""
    return 16.0 * d * sigma ** 2 * (dij ** 2 + dik ** 2) / (dik ** 2 - dij ** 2) ** 2


def sigma_for_bound(dij, dik, d, bound) -> float:
    """Noise level at which :func:`flip_rate_bound` equals ``bound``."""
    return float(np.sqrt(bound * (dik ** 2 - dij ** 2) ** 2 / (16.0 * d * (dij ** 2 + dik ** 2))))


def mc_rank_flip_rate(cfg: NoiseTrialConfig, seed=0):
    """Empirical ``P(D'_ij^2 > D'_ik^2)`` under fresh noise per trial, and its bound.

    Only the three columns involved are perturbed; the remaining columns do
    not enter either distance.
    """
    X = cfg.base_points.values
    i, j, k = cfg.triple
    d = X.shape[0]
    xi, xj, xk = X[:, i], X[:, j], X[:, k]
    dij = float(np.linalg.norm(xi - xj))
    dik = float(np.linalg.norm(xi - xk))
    rng = stream(seed, 0x7A2)
    flips = 0
    block = max(1, _CHUNK // (3 * d))
    done = 0
    while done < cfg.trials:
        b = min(block, cfg.trials - done)
        e = cfg.noise_sigma * rng.standard_normal((3, b, d))
        pi, pj, pk = xi + e[0], xj + e[1], xk + e[2]
        flips += int(np.count_nonzero(((pi - pj) ** 2).sum(1) > ((pi - pk) ** 2).sum(1)))
        done += b
    return flips / cfg.trials, flip_rate_bound(dij, dik, d, cfg.noise_sigma)


def binomial_stderr(p, trials) -> float:
    return float(np.sqrt(max(p * (1 - p), 0.0) / trials))


def dimension_sweep(dims=SWEEP_DIMS, sigma1=1.0, sigma2=1.1, pairs_per_trial=2000, trials=10, seed=0):
    """Rows ``(d, estimate, stderr, cantelli_bound)`` over ``dims`` for zero-mean classes."""
    rows = []
    for d in dims:
        model = GaussianPairModel.centered(d, sigma1, sigma2)
        est, se = mc_order_probability(model, pairs_per_trial, trials, seed=seed + d)
        rows.append((d, est, se, theoretical_bound_thm1(model)))
    return rows


def noise_sweep(d=10, n=10, bounds=(0.05, 0.1, 0.2, 0.3, 0.4), trials=10_000, seed=0):
    """Sweep noise levels on one random configuration; rows ``(sigma, flip_rate, stderr, bound)``.

    The triple is anchor 0, its nearest neighbour and its second nearest.
    """
    X = DataMatrix(stream(seed, 0x7A3).standard_normal((d, n)))
    D = compute_distance_matrix(X).values
    order = np.argsort(D[0], kind="stable")
    j, k = int(order[1]), int(order[2])
    rows = []
    for t, target in enumerate(bounds):
        sigma = sigma_for_bound(D[0, j], D[0, k], d, target)
        cfg = NoiseTrialConfig(X, sigma, trials, (0, j, k))
        rate, bound = mc_rank_flip_rate(cfg, seed=seed + t)
        rows.append((sigma, rate, binomial_stderr(rate, trials), bound))
    return rows
