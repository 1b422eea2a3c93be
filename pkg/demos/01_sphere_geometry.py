"""Geometry on the sphere: geodesics, log/exp maps, the Fréchet mean and the cap law.

Run with ``python3 demos/01_sphere_geometry.py``.
"""
# %%
import numpy as np

from otdcov.geometry import (cap_cdf, cap_quantile, exp_map, frechet_mean, geodesic_distance,
                             log_map, rotation_to)
from otdcov.testkit import sample_vmf

e1, e2, e3 = np.eye(3)
print("d(e1, e2) =", geodesic_distance(e1, e2))          # pi / 2
print("d(e3, -e3) =", geodesic_distance(e3, -e3))        # pi

# %% The logarithm at e3 points towards e1 with length pi/2; exp undoes it.
v = log_map(e3, e1)
print("log_e3(e1) =", v, " exp_e3(v) =", exp_map(e3, v))

# %% Fréchet mean of a concentrated sample sits near its mode.
z = sample_vmf(500, 3, e3, kappa=20.0, seed=1)
mu, info = frechet_mean(z, full_output=True)
print("Fréchet mean", mu.round(4), "after", info["iterations"], "iterations")

# Rotating the data rotates the mean.
R = rotation_to(e3, e1)
print("rotated mean", frechet_mean(z @ R.T).round(4), "vs R @ mu", (R @ mu).round(4))

# %% Cap law: fraction of the uniform measure below a given height <z, pole>.
for d in (2, 3, 5, 10):
    u = cap_quantile(0.9, d)
    print(f"d={d:2d}: 90% of the sphere lies below height {u:+.4f} (check {cap_cdf(u, d):.6f})")
