"""One complete test: statistic, calibrated null, p-value and report."""
import numpy as np

from .config import TestConfig, TestReport
from .null import NullTableCache, critical_value, null_distribution, p_value
from .statistics import compute_statistic

#: Shared in-memory cache used when ``run_test`` is not given one.
DEFAULT_CACHE = NullTableCache()


def run_test(X, Y, cfg: TestConfig, cache=None, threads=None, full_output=False):
    """Run the rank distance covariance test of independence of ``X`` and ``Y``.

    Null tables of data-free statistics are taken from ``cache`` (the
    module-level in-memory cache by default).  The step-1 spherical
    statistic has a data-dependent reference grid and is calibrated afresh.

    Returns a :class:`TestReport`, or ``(report, result, draws)`` with
    ``full_output=True``.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if Y.ndim == 1:
        Y = Y[:, None]
    result = compute_statistic(X, Y, cfg)
    n = X.shape[0]
    dims = (X.shape[1], Y.shape[1])
    if result.data_free:
        cache = DEFAULT_CACHE if cache is None else cache
        draws = cache.get(cfg, n, dims, threads=threads)
    else:
        draws = null_distribution(cfg, n, dims, references=(result.A, result.B), threads=threads)
    p = p_value(result.statistic, draws)
    crit = critical_value(draws, cfg.alpha)
    report = TestReport(
        statistic=result.statistic,
        p_value=p,
        critical_value=crit,
        n=n,
        alpha=cfg.alpha,
        config=cfg.to_dict(),
        fingerprint=cfg.fingerprint(),
        seed=cfg.seed,
        n_null_draws=cfg.n_null_draws,
        reject=bool(result.statistic > crit),
        flags=list(result.flags),
    )
    if full_output:
        return report, result, draws
    return report
