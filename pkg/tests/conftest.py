import numpy as np
import pytest

from amsme.rng import stream


def gaussian_blobs(centers, per_blob, seed, spread=1.0):
    """Samples as columns (d x n) plus the blob index of each column."""
    centers = np.asarray(centers, dtype=np.float64)
    rng = stream(seed, 99)
    X = np.concatenate([c + spread * rng.standard_normal((per_blob, centers.shape[1])) for c in centers])
    return X.T, np.repeat(np.arange(len(centers)), per_blob)


def four_blob_benchmark(seed=42, d=100, per_blob=200):
    # orthogonal centres scaled so every pair is exactly 10 apart
    centers = np.eye(4, d) * (10 / np.sqrt(2))
    return gaussian_blobs(centers, per_blob, seed)


def two_blob_benchmark(seed, d, per_blob, gap):
    centers = np.zeros((2, d))
    centers[1, 0] = gap
    return gaussian_blobs(centers, per_blob, seed)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES = []


def report(number, title, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
