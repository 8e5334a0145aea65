"""Corner minima of GUE matrices against the determinantal density."""
import numpy as np

from qwalk.gue import gue1_density, gue_orthant_prob, mean_smallest_n2, sample_gue_corners

y = sample_gue_corners(3, np.random.default_rng(0), 50_000)
print("E[Y1], n=2: exact", mean_smallest_n2(), " sampled", sample_gue_corners(2, np.random.default_rng(1), 50_000)[:, 0].mean())
for u in ([-1, -0.5, 0], [0, 0, 0], [0.5, 1, 1.5]):
    emp = np.mean(np.all(y <= np.array(u), axis=1))
    print(f"P(Y <= {u}): exact {gue_orthant_prob(u):.4f}  sampled {emp:.4f}")
print("density at (-1, 0, 0.5):", gue1_density([-1.0, 0.0, 0.5]))
