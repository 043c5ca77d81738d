import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from amsme.cli import main
from amsme.core import read_embedding_csv, read_fmat, read_labels, write_fmat, write_labels

from conftest import gaussian_blobs


@pytest.fixture
def blobs(tmp_path):
    X, truth = gaussian_blobs(np.eye(2, 6) * 8, 25, seed=3)
    data = tmp_path / "x.csv"
    np.savetxt(data, X, delimiter=",")
    D = np.sqrt(((X[:, :, None] - X[:, None, :]) ** 2).sum(0))
    D = (D + D.T) / 2
    np.fill_diagonal(D, 0)
    dmat = tmp_path / "d.fmat"
    write_fmat(dmat, D)
    tpath = tmp_path / "truth.txt"
    write_labels(tpath, truth)
    return tmp_path, data, dmat, tpath


def test_run_and_acc(blobs, capsys):
    tmp, data, _, tpath = blobs
    out = tmp / "res"
    assert main(["run", "--in", str(data), "--clusters", "2", "--out", str(out),
                 "--truth", str(tpath), "--epochs", "100"]) == 0
    line = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert line["acc_stage2"] == 1.0
    assert main(["acc", "--pred", str(out / "labels.txt"), "--truth", str(tpath)]) == 0
    acc = json.loads(capsys.readouterr().out)
    assert acc == {"acc": 1.0, "n": 50, "n_clusters": 2}


def test_run_config_file_and_override(blobs, capsys):
    tmp, data, _, _ = blobs
    cfg = tmp / "run.cfg"
    cfg.write_text(f"in = {data}\nclusters = 2\nepochs = 50  # quick\nout = {tmp / 'fromfile'}\nalpha = 3\n")
    assert main(["run", "--config", str(cfg), "--out", str(tmp / "override")]) == 0
    assert (tmp / "override" / "Y2.csv").exists()
    assert not (tmp / "fromfile").exists()
    prov = json.loads((tmp / "override" / "provenance.json").read_text())
    assert prov["config"]["alpha"] == 3.0
    assert prov["config"]["embed_stage1"]["n_epochs"] == 50


def test_run_bad_config_key(blobs):
    tmp, data, _, _ = blobs
    cfg = tmp / "bad.cfg"
    cfg.write_text("colour = red\n")
    assert main(["run", "--config", str(cfg)]) == 2


def test_cluster_sweep(blobs, capsys):
    tmp, data, _, _ = blobs
    assert main(["run", "--in", str(data), "--clusters", "2,3", "--out", str(tmp / "sw"), "--epochs", "50"]) == 0
    for n_c in (2, 3):
        lab = read_labels(tmp / "sw" / f"nc{n_c}" / "labels.txt")
        assert np.unique(lab.labels).size == n_c


def test_stepwise_commands(blobs, capsys):
    tmp, data, dmat, tpath = blobs
    assert main(["ordinal", "--in", str(dmat), "--out", str(tmp / "O.fmat")]) == 0
    O = read_fmat(tmp / "O.fmat")
    assert O.shape == (50, 50) and O.max() <= 49

    rep = tmp / "edges.csv"
    assert main(["graph", "--in", str(data), "--clusters", "2", "--out", str(tmp / "S.fmat"),
                 "--edge-report", str(rep), "--labels", str(tpath)]) == 0
    rows = list(csv.DictReader(open(rep)))
    assert rows and all(float(r["s"]) > 0.5 for r in rows)

    assert main(["embed", "--in", str(dmat), "--out", str(tmp / "Y.csv"), "--epochs", "50"]) == 0
    assert read_embedding_csv(tmp / "Y.csv").shape == (2, 50)
    assert main(["cluster", "--in", str(tmp / "Y.csv"), "--clusters", "2", "--out", str(tmp / "l.txt")]) == 0
    assert main(["reweight", "--in", str(dmat), "--labels", str(tmp / "l.txt"), "--out", str(tmp / "DM.fmat")]) == 0
    DM = read_fmat(tmp / "DM.fmat")
    assert set(np.unique(DM[DM > 1]).tolist()) == {2.0}


def test_theory_command(tmp_path):
    out, plot = tmp_path / "t.csv", tmp_path / "t.svg"
    assert main(["theory", "--experiment", "thm2", "--noise-draws", "500", "--out", str(out),
                 "--plot", str(plot)]) == 0
    rows = list(csv.reader(open(out)))
    assert rows[0] == ["sigma", "flip_rate", "stderr", "bound"] and len(rows) == 6
    assert "<polyline" in plot.read_text()


def test_exit_codes(blobs, tmp_path):
    tmp, data, dmat, _ = blobs
    # missing file: data error
    assert main(["ordinal", "--in", str(tmp / "nope.fmat"), "--out", str(tmp / "o")]) == 3
    # malformed CSV: data error
    bad = tmp / "bad.csv"
    bad.write_text("1,2\n3\n")
    assert main(["graph", "--in", str(bad), "--clusters", "2", "--out", str(tmp / "s")]) == 3
    # alpha below one: configuration error
    assert main(["reweight", "--in", str(dmat), "--labels", str(tmp / "truth.txt"), "--alpha", "0.5",
                 "--out", str(tmp / "x")]) == 2
    # all-zero distances: numerical failure
    zero = tmp / "zero.fmat"
    write_fmat(zero, np.zeros((20, 20)))
    assert main(["embed", "--in", str(zero), "--out", str(tmp / "z.csv")]) == 4
    with pytest.raises(SystemExit) as info:
        main(["run", "--bogus"])
    assert info.value.code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "amsme", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "amsme" in res.stdout
