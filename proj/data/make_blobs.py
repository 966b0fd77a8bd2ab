"""Regenerates blobs.csv: 1000 labeled points in 10 Gaussian clusters, d = 8."""
import numpy as np

rng = np.random.default_rng(20240521)
k, per, d = 10, 100, 8
centers = rng.uniform(0.0, 1.0, size=(k, d))
rows = []
for label, c in enumerate(centers):
    pts = c + rng.normal(0.0, 0.05, size=(per, d))
    rows += [list(p) + [label] for p in pts]
order = rng.permutation(len(rows))
with open("blobs.csv", "w") as f:
    f.write("# 1000 points, 10 Gaussian clusters (std 0.05) in [0,1]^8; last column is the cluster\n")
    for i in order:
        *p, label = rows[i]
        f.write(",".join(f"{v:.6f}" for v in p) + f",{label}\n")
