import numpy as np
import pytest

from amsme.embed import Embedding
from amsme.errors import DimensionError
from amsme.plot import PALETTE, emit_lines, emit_scatter


def test_three_points_default_colour(tmp_path):
    svg = emit_scatter(np.array([[0.0, 1, 2], [0, 1, 0]]), path=tmp_path / "a.svg")
    assert svg.count("<circle") == 3
    assert (tmp_path / "a.svg").read_text() == svg
    assert 'class="legend"' not in svg


def test_two_labels_two_colours():
    svg = emit_scatter(Embedding(np.array([[0.0, 1, 2, 3], [0, 1, 0, 1]])), [0, 1, 0, 1])
    body, legend = svg.split('class="legend"')
    assert body.count(PALETTE[0]) == 2 and body.count(PALETTE[1]) == 2
    assert legend.count("<circle") == 2 and ">0</text>" in legend and ">1</text>" in legend


def test_palette_cycles():
    svg = emit_scatter(np.random.default_rng(0).standard_normal((2, 25)), np.arange(25))
    legend = svg.split('class="legend"')[1]
    assert legend.count(PALETTE[0]) == 2  # labels 0 and 20


def test_large_plot_size(tmp_path):
    Y = np.random.default_rng(1).standard_normal((2, 10_000))
    emit_scatter(Y, np.arange(10_000) % 10, tmp_path / "big.svg")
    assert (tmp_path / "big.svg").stat().st_size < 10 * 2 ** 20


def test_points_inside_canvas():
    svg = emit_scatter(np.array([[5.0, 5.0], [1.0, 1.0]]))
    assert "nan" not in svg


def test_rejects_non_2d():
    with pytest.raises(DimensionError):
        emit_scatter(np.zeros((3, 4)))


def test_lines():
    svg = emit_lines([2, 10, 100], {"a": [0.4, 0.2, 0.1]}, logx=True)
    assert svg.count("<polyline") == 1
