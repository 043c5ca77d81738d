"""Ranks survive any increasing rescaling of distances; raw distances do not.

We build distances for a small point cloud, push them through a few
monotone maps, and compare the ordinal matrices. Then we show why ranks help
in high dimension: the spread of raw distances collapses relative to their
mean while ranks keep their full range.
"""
import numpy as np

from amsme import DataMatrix, DistanceMatrix, compute_distance_matrix, ordinal_matrix

rng = np.random.default_rng(0)
X = DataMatrix(rng.standard_normal((5, 30)))
D = compute_distance_matrix(X)
O = ordinal_matrix(D)

for name, f in [("square", np.square), ("exp - 1", np.expm1), ("log1p", np.log1p)]:
    O2 = ordinal_matrix(DistanceMatrix(f(D.values)))
    print(f"{name:>8}: ordinal matrix unchanged = {np.array_equal(O.values, O2.values)}")

print("\nrelative contrast of distances from one point (std / mean):")
for d in (2, 20, 200, 2000):
    Dd = compute_distance_matrix(DataMatrix(rng.standard_normal((d, 200)))).values
    row = np.delete(Dd[0], 0)
    ranks = np.delete(ordinal_matrix(DistanceMatrix(Dd)).values[0], 0)
    print(f"  d={d:>5}: raw {row.std() / row.mean():.3f}   ranks {ranks.std() / ranks.mean():.3f}")
