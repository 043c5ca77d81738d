"""``amsme`` command-line interface.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .cluster import accuracy, kmeans
from .core import (compute_distance_matrix, load_dataset, load_distance_matrix, read_embedding_csv,
                   read_labels, standardize, write_embedding_csv, write_fmat, write_labels)
from .embed import INIT_METHODS, OPT_MODES, EmbedConfig, embed
from .errors import AmsmeError, InvalidArgument
from .graph import (SECONDARY_MODES, edge_report, local_scales, neighborhood_budget,
                    similarity_graph)
from .ordinal import ordinal_matrix
from .pipeline import INPUT_FORMATS, PipelineConfig, run_pipeline
from .plot import emit_lines
from .reweight import ReweightConfig, reweight_distances
from .theory import dimension_sweep, noise_sweep

log = logging.getLogger("amsme")

# run-option defaults; the config file and then the command line override them
RUN_DEFAULTS = {
    "input": None,
    "format": "csv",
    "transpose": False,
    "metric": "euclidean",
    "clusters": None,
    "alpha": 2.0,
    "seed": 42,
    "out": "results",
    "truth": None,
    "standardize": False,
    "k_embed": 2,
    "neighbors": 15,
    "min_dist": 0.1,
    "epochs": 500,
    "learning_rate": 1.0,
    "negative_samples": 5,
    "init": "classical_mds",
    "mode": "deterministic",
    "secondary_connection": "matmul",
}
_BOOL_KEYS = {"transpose", "standardize"}


def read_config_file(path):
    """Parse ``key = value`` lines (``#`` comments) into a dict of run options."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        parser.read_string("[run]\n" + Path(path).read_text())
    except configparser.Error as exc:
        raise InvalidArgument(f"{path}: {exc}") from None
    out = {}
    for raw_key, value in parser["run"].items():
        key = raw_key.strip().lstrip("-").replace("-", "_")
        if key == "in":
            key = "input"
        if key not in RUN_DEFAULTS:
            raise InvalidArgument(f"{path}: unknown option {raw_key!r}")
        if key in _BOOL_KEYS:
            out[key] = parser["run"].getboolean(raw_key)
        else:
            default = RUN_DEFAULTS[key]
            try:
                out[key] = type(default)(value) if default is not None and key != "clusters" else value
            except ValueError:
                raise InvalidArgument(f"{path}: bad value {value!r} for {raw_key!r}") from None
    return out


def _parse_clusters(spec):
    try:
        values = [int(tok) for tok in str(spec).split(",") if tok.strip()]
    except ValueError:
        raise InvalidArgument(f"--clusters expects integers, got {spec!r}") from None
    if not values:
        raise InvalidArgument("--clusters is required")
    return values


def _embed_args(p, defaults=True):
    d = (lambda k: RUN_DEFAULTS[k]) if defaults else (lambda k: None)
    p.add_argument("--k-embed", type=int, default=d("k_embed"))
    p.add_argument("--neighbors", type=int, default=d("neighbors"))
    p.add_argument("--min-dist", type=float, default=d("min_dist"))
    p.add_argument("--epochs", type=int, default=d("epochs"))
    p.add_argument("--learning-rate", type=float, default=d("learning_rate"))
    p.add_argument("--negative-samples", type=int, default=d("negative_samples"))
    p.add_argument("--init", choices=INIT_METHODS, default=d("init"))
    p.add_argument("--mode", choices=OPT_MODES, default=d("mode"))


def _embed_config(opts, seed):
    return EmbedConfig(k_embed=opts["k_embed"], n_neighbors=opts["neighbors"], min_dist=opts["min_dist"],
                       n_epochs=opts["epochs"], learning_rate=opts["learning_rate"],
                       negative_samples=opts["negative_samples"], seed=seed, init=opts["init"],
                       mode=opts["mode"])


def _data_args(p):
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--format", choices=INPUT_FORMATS, default="csv")
    p.add_argument("--transpose", action="store_true", help="CSV rows are samples")
    p.add_argument("--metric", choices=("euclidean", "cosine"), default="euclidean")
    p.add_argument("--standardize", action="store_true")


def _distances(args):
    if args.format == "dmat":
        return load_distance_matrix(args.input)
    X = load_dataset(args.input, args.format, args.transpose)
    if args.standardize:
        X = standardize(X)
    return compute_distance_matrix(X, args.metric)


# --------------------------------------------------------------------------
# subcommands


def cmd_run(args):
    opts = dict(RUN_DEFAULTS)
    if args.config:
        opts.update(read_config_file(args.config))
    for key in RUN_DEFAULTS:
        val = getattr(args, key, None)
        if val is not None and val is not False:
            opts[key] = val
    if not opts["input"]:
        raise InvalidArgument("--in is required (on the command line or in --config)")
    clusters = _parse_clusters(opts["clusters"])
    out_root = Path(opts["out"])
    emb = _embed_config(opts, seed=0)
    for n_c in clusters:
        out = out_root if len(clusters) == 1 else out_root / f"nc{n_c}"
        cfg = PipelineConfig(
            input=str(opts["input"]), n_c=n_c, format=opts["format"], metric=opts["metric"],
            alpha=float(opts["alpha"]), embed_stage1=emb, embed_stage2=emb, seed=int(opts["seed"]),
            output_dir=str(out), standardize=bool(opts["standardize"]), truth_labels=opts["truth"],
            transpose=bool(opts["transpose"]), secondary_connection=opts["secondary_connection"],
        )
        res = run_pipeline(cfg)
        m = res.metrics
        print(json.dumps({"out": str(out), "n_c": n_c, "acc_stage1": m["acc_stage1"],
                          "acc_stage2": m["acc_stage2"], "k_budget": m["k_budget"]}))
    return 0


def cmd_ordinal(args):
    O = ordinal_matrix(load_distance_matrix(args.input))
    write_fmat(args.out, O.values)
    return 0


def cmd_graph(args):
    D = _distances(args)
    O = ordinal_matrix(D)
    k = neighborhood_budget(D.n, args.clusters)
    graph = similarity_graph(O, local_scales(O, k), args.secondary_connection)
    write_fmat(args.out, graph.S)
    if args.edge_report:
        labels = read_labels(args.labels, D.n) if args.labels else None
        with open(args.edge_report, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["i", "j", "s", "flag"])
            for i, j, s, flag in edge_report(graph, args.tau, labels):
                w.writerow([i, j, repr(s), flag])
    return 0


def cmd_embed(args):
    D = load_distance_matrix(args.input)
    opts = {k: getattr(args, k) for k in ("k_embed", "neighbors", "min_dist", "epochs",
                                          "learning_rate", "negative_samples", "init", "mode")}
    Y = embed(D, _embed_config(opts, args.seed))
    write_embedding_csv(args.out, Y.Y)
    return 0


def cmd_cluster(args):
    Y = read_embedding_csv(args.input)
    res = kmeans(Y, args.clusters, seed=args.seed, n_init=args.n_init, max_iter=args.max_iter)
    write_labels(args.out, res.labels)
    return 0


def cmd_acc(args):
    pred = read_labels(args.pred)
    truth = read_labels(args.truth, len(pred))
    n_c = int(np.unique(pred.labels).size)
    print(json.dumps({"acc": accuracy(pred, truth), "n": len(pred), "n_clusters": n_c}))
    return 0


def cmd_reweight(args):
    D = load_distance_matrix(args.input)
    labels = read_labels(args.labels, D.n)
    DM = reweight_distances(D, labels, ReweightConfig(args.alpha))
    write_fmat(args.out, DM.values)
    return 0


def cmd_theory(args):
    if args.experiment == "fig2":
        rows = dimension_sweep(pairs_per_trial=args.pairs, trials=args.trials, seed=args.seed)
        header = ["d", "estimate", "stderr", "cantelli_bound"]
        xs = [r[0] for r in rows]
        series = {"P(d_ij >= d_ik)": [r[1] for r in rows], "1 - Cantelli bound": [1 - r[3] for r in rows]}
        xlabel, logx = "dimension d", True
    else:
        rows = noise_sweep(trials=args.noise_draws, seed=args.seed)
        header = ["sigma", "flip_rate", "stderr", "bound"]
        xs = [r[0] for r in rows]
        series = {"flip rate": [r[1] for r in rows], "leading-order bound": [r[3] for r in rows]}
        xlabel, logx = "noise sigma", False
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([r[0]] + [repr(float(v)) for v in r[1:]])
    if args.plot:
        emit_lines(xs, series, args.plot, xlabel=xlabel, ylabel="probability", logx=logx)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="amsme", description="Adaptive multi-scale manifold embedding")
    p.add_argument("--version", action="version", version=f"amsme {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="full two-stage pipeline")
    r.add_argument("--config", help="key = value file; command-line flags take precedence")
    r.add_argument("--in", dest="input")
    r.add_argument("--format", choices=INPUT_FORMATS)
    r.add_argument("--transpose", action="store_true", default=None)
    r.add_argument("--metric", choices=("euclidean", "cosine"))
    r.add_argument("--clusters", help="cluster count, or a comma list for a sweep")
    r.add_argument("--alpha", type=float)
    r.add_argument("--seed", type=int)
    r.add_argument("--out")
    r.add_argument("--truth", help="ground-truth labels file for ACC")
    r.add_argument("--standardize", action="store_true", default=None)
    r.add_argument("--secondary-connection", choices=SECONDARY_MODES)
    _embed_args(r, defaults=False)
    r.set_defaults(func=cmd_run)

    o = sub.add_parser("ordinal", help="symmetrised ordinal matrix of a distance matrix")
    o.add_argument("--in", dest="input", required=True)
    o.add_argument("--out", required=True)
    o.set_defaults(func=cmd_ordinal)

    g = sub.add_parser("graph", help="adaptive similarity graph")
    _data_args(g)
    g.add_argument("--clusters", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--edge-report")
    g.add_argument("--labels")
    g.add_argument("--tau", type=float, default=0.5)
    g.add_argument("--secondary-connection", choices=SECONDARY_MODES, default="matmul")
    g.set_defaults(func=cmd_graph)

    e = sub.add_parser("embed", help="embed a precomputed distance matrix")
    e.add_argument("--in", dest="input", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--seed", type=int, default=42)
    _embed_args(e)
    e.set_defaults(func=cmd_embed)

    c = sub.add_parser("cluster", help="k-means on an embedding CSV")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--clusters", type=int, required=True)
    c.add_argument("--seed", type=int, default=42)
    c.add_argument("--n-init", type=int, default=10)
    c.add_argument("--max-iter", type=int, default=300)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_cluster)

    a = sub.add_parser("acc", help="clustering accuracy of predicted labels")
    a.add_argument("--pred", required=True)
    a.add_argument("--truth", required=True)
    a.set_defaults(func=cmd_acc)

    w = sub.add_parser("reweight", help="label-driven distance reweighting")
    w.add_argument("--in", dest="input", required=True)
    w.add_argument("--labels", required=True)
    w.add_argument("--alpha", type=float, default=2.0)
    w.add_argument("--out", required=True)
    w.set_defaults(func=cmd_reweight)

    t = sub.add_parser("theory", help="Monte Carlo distance-ordering experiments")
    t.add_argument("--experiment", choices=("fig2", "thm2"), required=True)
    t.add_argument("--out", required=True)
    t.add_argument("--plot")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--trials", type=int, default=10)
    t.add_argument("--pairs", type=int, default=2000, help="triples per trial (fig2)")
    t.add_argument("--noise-draws", type=int, default=10_000, help="noise draws per level (thm2)")
    t.set_defaults(func=cmd_theory)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except AmsmeError as exc:
        print(f"amsme: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"amsme: error: {exc}", file=sys.stderr)
        return 3
    except (np.linalg.LinAlgError, FloatingPointError, ArithmeticError) as exc:
        print(f"amsme: numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
