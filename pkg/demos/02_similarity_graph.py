"""Inspect the adaptive similarity graph on two Gaussian blobs.

Prints the neighbourhood budget, how often a density gap was found, the
fraction of strong edges that cross blobs, and the points left without
strong intra-blob edges (boundary points get tight bandwidths).
"""
import sys

import numpy as np

from amsme import DataMatrix, compute_distance_matrix, ordinal_matrix
from amsme.graph import edge_report, local_scales, neighborhood_budget, similarity_graph

d = int(sys.argv[1]) if len(sys.argv) > 1 else 20
rng = np.random.default_rng(1)
centres = np.zeros((2, d))
centres[1, 0] = 12.0
X = np.concatenate([c + rng.standard_normal((100, d)) for c in centres]).T
labels = np.repeat([0, 1], 100)

O = ordinal_matrix(compute_distance_matrix(DataMatrix(X)))
k = neighborhood_budget(200, 2)
scales = local_scales(O, k)
print(f"budget k = {k}; rows with a density gap: {np.mean(scales.a > 1):.0%}")
print(f"chosen neighbourhood index s: min {scales.s.min()}, median {int(np.median(scales.s))}, max {scales.s.max()}")

for mode in ("matmul", "hadamard"):
    g = similarity_graph(O, scales, mode)
    edges = edge_report(g, 0.5, labels)
    cross = sum(1 for *_, flag in edges if flag == "inter")
    strong = ((g.S > 0.5) & (labels[:, None] == labels[None, :])).sum(axis=1) - 1
    print(f"{mode:>8}: {len(edges)} edges above 0.5, {cross} across blobs, "
          f"{np.count_nonzero(strong < 3)} points with fewer than 3 strong intra edges")
