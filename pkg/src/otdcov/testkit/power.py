"""Monte-Carlo rejection rates of the test under simulated scenarios."""
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .._rng import derive_rng
from .config import TestConfig
from .null import resolve_threads
from .run import DEFAULT_CACHE, run_test
from .samplers import generate_scenario


def replicate_sample(scenario, n, cfg, rep, d1, d2, kappa=np.inf, r=0.5, rotation=None):
    """Data of replicate ``rep``; its stream depends on ``(seed, scenario, n, rep)`` only."""
    rng = derive_rng(cfg.seed, f"power-{scenario}", n, rep)
    return generate_scenario(scenario, n, cfg.space, d1, d2, rng,
                             kappa=kappa, r=r, rotation=rotation)


def power_study(scenario, n_values, cfg: TestConfig, replications=500, *, d1=2, d2=2,
                kappa=np.inf, r=0.5, rotation=None, threads=None, cache=None):
    """Rejection rate at level ``cfg.alpha`` for each sample size.

    Returns a list of rows ``{scenario, n, rejections, reps, rate, stderr}``
    where ``stderr`` is the binomial standard error of ``rate``.
    """
    if replications < 100:
        raise ValueError("replications must be >= 100")
    cache = DEFAULT_CACHE if cache is None else cache
    workers = resolve_threads(threads)
    rows = []
    for n in n_values:
        n = int(n)

        def one(rep, n=n):
            x, y = replicate_sample(scenario, n, cfg, rep, d1, d2, kappa, r, rotation)
            return run_test(x, y, cfg, cache=cache, threads=1).reject

        if cfg.space != "sphere" or cfg.variant == "two_step":
            cache.get(cfg, n, (d1, d2), threads=workers)  # fill the shared table once
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(one, range(replications)))
        else:
            outcomes = [one(rep) for rep in range(replications)]
        k = int(sum(outcomes))
        rate = k / replications
        rows.append({"scenario": scenario, "n": n, "rejections": k, "reps": replications,
                     "rate": rate, "stderr": math.sqrt(rate * (1.0 - rate) / replications)})
    return rows
