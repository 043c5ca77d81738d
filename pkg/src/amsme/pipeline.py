"""End-to-end two-stage embedding.

``amsme`` runs every step on an in-memory distance matrix; ``run_pipeline``
adds loading and writes each artifact to disk as soon as its step finishes,
so a failure late in the run still leaves the earlier files behind.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import __version__
from .cluster import accuracy, kmeans, neighbor_purity
from .core import (DistanceMatrix, LabelVector, compute_distance_matrix, load_dataset,
                   load_distance_matrix, read_labels, standardize, write_embedding_csv,
                   write_fmat, write_labels)
from .embed import EmbedConfig, Embedding, embed
from .errors import AmsmeError, InvalidArgument, PipelineError
from .graph import local_scales, neighborhood_budget, similarity_graph, stage1_distance
from .ordinal import ordinal_matrix
from .plot import emit_scatter
from .reweight import ReweightConfig, reweight_distances

log = logging.getLogger(__name__)

INPUT_FORMATS = ("csv", "fmat", "dmat")
SEED_OFFSETS = {"stage1": 0, "kmeans": 1, "stage2": 2}
KMEANS_N_INIT = 10


@dataclass(frozen=True)
class PipelineConfig:
    input: str
    n_c: int
    format: str = "csv"
    metric: str = "euclidean"
    alpha: float = 2.0
    embed_stage1: EmbedConfig = field(default_factory=EmbedConfig)
    embed_stage2: EmbedConfig = field(default_factory=EmbedConfig)
    seed: int = 42
    output_dir: str = "results"
    standardize: bool = False
    truth_labels: Optional[str] = None
    transpose: bool = False
    secondary_connection: str = "matmul"

    def __post_init__(self):
        if self.n_c < 1:
            raise InvalidArgument(f"cluster count must be >= 1, got {self.n_c}")
        if not self.alpha >= 1:
            raise InvalidArgument(f"alpha must be >= 1, got {self.alpha}")
        if self.format not in INPUT_FORMATS:
            raise InvalidArgument(f"format must be one of {INPUT_FORMATS}")
        if self.metric not in ("euclidean", "cosine"):
            raise InvalidArgument(f"metric must be euclidean or cosine, got {self.metric!r}")

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclass
class PipelineArtifacts:
    Y1: Embedding
    ell1: LabelVector
    Y2: Embedding
    metrics: dict
    provenance: dict = field(default_factory=dict)
    intermediates: dict = field(default_factory=dict)


class _Steps:
    """Times steps, attributes failures and forwards finished artifacts."""

    def __init__(self, sink=None):
        self.sink = sink
        self.runtime = {}

    def __call__(self, name, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            out = fn(*args, **kwargs)
        except PipelineError:
            raise
        except (AmsmeError, OSError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
            raise PipelineError(name, exc) from exc
        self.runtime[name] = time.perf_counter() - t0
        return out

    def emit(self, name, value):
        if self.sink is not None:
            self.sink(name, value)


def amsme(D, n_c, alpha=2.0, stage1: EmbedConfig = EmbedConfig(), stage2: EmbedConfig = EmbedConfig(),
          seed=42, truth=None, secondary_connection="matmul",
          on_artifact: Optional[Callable] = None) -> PipelineArtifacts:
    """Two-stage embedding of a distance matrix into ``stage1.k_embed`` dimensions.

    Parameters
    ----------
    D : DistanceMatrix or array
        Pairwise distances between the ``n`` samples.
    n_c : int
        Number of clusters used for the neighbourhood budget and pseudo-labels.
    alpha : float
        Distance assigned to every pair of samples with different pseudo-labels.
    stage1, stage2 : EmbedConfig
        Embedding settings for each stage. Their ``seed`` fields are replaced
        by ``seed`` plus a fixed per-stage offset.
    truth : LabelVector, optional
        Ground-truth classes; when given, clustering accuracy of k-means on
        both embeddings is reported.
    on_artifact : callable, optional
        ``on_artifact(name, value)`` is called as each intermediate result is
        produced.

    Returns
    -------
    PipelineArtifacts
    """
    if not isinstance(D, DistanceMatrix):
        D = DistanceMatrix(D)
    rw = ReweightConfig(alpha)
    steps = _Steps(on_artifact)
    n = D.n
    if truth is not None and len(truth) != n:
        raise PipelineError("truth", InvalidArgument(f"{len(truth)} truth labels for {n} samples"))

    O = steps("ordinal", ordinal_matrix, D)
    steps.emit("O", O)
    k = steps("budget", neighborhood_budget, n, n_c)
    scales = steps("scales", local_scales, O, k)
    S = steps("graph", similarity_graph, O, scales, secondary_connection)
    steps.emit("S", S)
    DO = steps("stage1_distance", stage1_distance, S)
    steps.emit("DO", DO)

    cfg1 = stage1.replace(seed=seed + SEED_OFFSETS["stage1"])
    Y1 = steps("embed_stage1", embed, DO, cfg1, "stage1")
    steps.emit("Y1", Y1)
    km = steps("kmeans", kmeans, Y1, n_c, seed + SEED_OFFSETS["kmeans"], KMEANS_N_INIT)
    ell1 = km.labels
    steps.emit("ell1", ell1)

    DM = steps("reweight", reweight_distances, D, ell1, rw)
    steps.emit("DM", DM)
    cfg2 = stage2.replace(seed=seed + SEED_OFFSETS["stage2"])
    Y2 = steps("embed_stage2", embed, DM, cfg2, "stage2")
    steps.emit("Y2", Y2)

    acc1 = acc2 = None
    if truth is not None:
        acc1 = accuracy(ell1, truth)
        km2 = steps("kmeans_stage2", kmeans, Y2, n_c, seed + SEED_OFFSETS["kmeans"], KMEANS_N_INIT)
        acc2 = accuracy(km2.labels, truth)
    metrics = {
        "acc_stage1": acc1,
        "acc_stage2": acc2,
        "n": n,
        "n_c": int(n_c),
        "k_budget": int(k),
        "runtime_seconds": steps.runtime,
    }
    return PipelineArtifacts(
        Y1=Y1, ell1=ell1, Y2=Y2, metrics=metrics,
        intermediates={"O": O, "scales": scales, "S": S, "DO": DO, "DM": DM},
    )


def _library_versions():
    import numba
    import scipy
    return {"amsme": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "numba": numba.__version__}


class _DiskSink:
    def __init__(self, out: Path, plot_labels=None):
        self.out = out
        self.plot_labels = plot_labels
        self.ell1 = None

    def __call__(self, name, value):
        out = self.out
        if name == "D":
            write_fmat(out / "D.fmat", value.values)
        elif name == "O":
            write_fmat(out / "O.fmat", value.values)
        elif name == "S":
            write_fmat(out / "S.fmat", value.S)
        elif name == "DO":
            write_fmat(out / "DO.fmat", value.values)
        elif name == "DM":
            write_fmat(out / "DM.fmat", value.values)
        elif name == "ell1":
            self.ell1 = value
            write_labels(out / "labels.txt", value)
        elif name in ("Y1", "Y2"):
            write_embedding_csv(out / f"{name}.csv", value.Y)
            if value.k_embed == 2:
                colour = self.plot_labels if self.plot_labels is not None else self.ell1
                stage = "stage1" if name == "Y1" else "stage2"
                emit_scatter(value, colour, out / f"{stage}.svg", title=f"AMSME {stage}")


def _load_distances(cfg: PipelineConfig, steps: _Steps):
    if cfg.format == "dmat":
        return steps("load", load_distance_matrix, cfg.input)
    X = steps("load", load_dataset, cfg.input, cfg.format, cfg.transpose)
    if cfg.standardize:
        X = steps("standardize", standardize, X)
    return steps("distance", compute_distance_matrix, X, cfg.metric)


def run_pipeline(cfg: PipelineConfig) -> PipelineArtifacts:
    """Load, embed in two stages and write every artifact under ``cfg.output_dir``."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    steps = _Steps()
    D = _load_distances(cfg, steps)
    truth = None
    if cfg.truth_labels:
        truth = steps("truth", read_labels, cfg.truth_labels, D.n)
    sink = _DiskSink(out, plot_labels=truth)
    sink("D", D)

    res = amsme(D, cfg.n_c, cfg.alpha, cfg.embed_stage1, cfg.embed_stage2, cfg.seed, truth,
                cfg.secondary_connection, on_artifact=sink)
    res.metrics["runtime_seconds"] = {**steps.runtime, **res.metrics["runtime_seconds"]}
    res.provenance = {
        "config": cfg.to_dict(),
        "versions": _library_versions(),
        "input_sha256": hashlib.sha256(Path(cfg.input).read_bytes()).hexdigest(),
        "seed_offsets": SEED_OFFSETS,
    }
    (out / "metrics.json").write_text(json.dumps(res.metrics, indent=2, sort_keys=True) + "\n")
    (out / "provenance.json").write_text(json.dumps(res.provenance, indent=2, sort_keys=True) + "\n")
    return res
