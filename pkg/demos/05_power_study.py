"""Rejection rates under independence and under noisy rotation dependence.

Run with ``python3 demos/05_power_study.py`` (about a minute).
"""
# %%
from otdcov.testkit import TestConfig, power_study

cfg = TestConfig(space="sphere", n_null_draws=499, seed=1)

# %% Level: the rate should be close to alpha = 0.05.
for row in power_study("independent", [40], cfg, 200, d1=3, d2=3):
    print(f"independent n={row['n']}: rate {row['rate']:.3f} +- {row['stderr']:.3f}")

# %% Power grows with n when Y is a noisy rotation of X.
for row in power_study("rotation", [15, 30, 60], cfg, 200, d1=3, d2=3, kappa=2.0):
    print(f"rotation (kappa=2) n={row['n']}: rate {row['rate']:.3f} +- {row['stderr']:.3f}")
