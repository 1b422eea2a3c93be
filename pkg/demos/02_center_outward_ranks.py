"""Center-outward ranks and signs in R^d, and the scores built on them.

Run with ``python3 demos/02_center_outward_ranks.py``.
"""
# %%
import numpy as np

from otdcov.ranks_rd import (ScoreSpec, biloop_radial, build_ball_grid, center_outward,
                             factorize_n, score_ranks)

n, d = 50, 2
n_R, n_S, n_0 = factorize_n(n)
print(f"n={n} splits into {n_R} radii x {n_S} directions + {n_0} origin copies")

# %% Transport a skewed sample to the ball grid.
rng = np.random.default_rng(0)
x = rng.gamma(2.0, size=(n, d)) @ np.array([[1.0, 0.4], [0.0, 1.0]])
grid = build_ball_grid(n, d)
co = center_outward(x, grid)
print("rank counts (0 = origin):", np.bincount(co.rank))

# The deepest points get rank 1; the most outlying get rank n_R.
deepest = np.argsort(co.rank)[n_0:n_0 + 3]
print("observations with rank 1:", x[deepest].round(2).tolist())
print("most outlying observation:", x[np.argmax(co.rank)].round(2))

# %% Scores turn (rank, sign) pairs into vectors.
for kind in ("wilcoxon", "van_der_waerden", "sign", "biloop-wilcoxon"):
    emb = score_ranks(co, ScoreSpec.parse(kind))
    print(f"{kind:16s} width {emb.shape[1]}  max norm {np.linalg.norm(emb, axis=1).max():.3f}")

# %% The biloop map is bounded and comes back to zero for far-out radii.
v = np.array([0.0, 0.25, 0.5, 1.0, 2.0, 10.0])
print("|psi(v)| =", np.linalg.norm(biloop_radial(v), axis=1).round(4))
