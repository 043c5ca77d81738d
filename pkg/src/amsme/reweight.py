"""Label-driven reweighting of a distance matrix."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import DistanceMatrix
from .errors import InvalidArgument, LengthMismatch


@dataclass(frozen=True)
class ReweightConfig:
    alpha: float = 2.0

    def __post_init__(self):
        if not self.alpha >= 1:
            raise InvalidArgument(f"alpha must be >= 1, got {self.alpha}")
        if self.alpha <= 1:
            warnings.warn("alpha <= 1 leaves no margin between intra- and inter-cluster distances",
                          stacklevel=3)


def reweight_distances(D, labels, cfg: ReweightConfig = ReweightConfig()) -> DistanceMatrix:
    """Scale each intra-cluster block to max 1 and set every inter-cluster entry to ``alpha``.

    A block whose maximum is zero (a singleton, or coincident samples) is
    left as zeros.
    """
    v = D.values if isinstance(D, DistanceMatrix) else np.asarray(D, dtype=np.float64)
    lab = np.asarray(getattr(labels, "labels", labels))
    if lab.size != v.shape[0]:
        raise LengthMismatch(f"{lab.size} labels for {v.shape[0]} samples")
    out = np.full(v.shape, float(cfg.alpha))
    for c in np.unique(lab):
        members = np.flatnonzero(lab == c)
        block = v[np.ix_(members, members)]
        top = block.max()
        out[np.ix_(members, members)] = block / top if top > 0 else block
    np.fill_diagonal(out, 0.0)
    return DistanceMatrix(out, metric_tag="precomputed")
