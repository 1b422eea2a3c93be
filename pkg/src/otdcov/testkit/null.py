"""Permutation null laws, p-values, critical values and null-table files.

Under independence the pairing of the two grid labellings is uniform over
all permutations, so the null law of the rank statistic is obtained by
evaluating it on the fixed reference embeddings under random pairings.
"""
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .._rng import derive_rng
from .config import TestConfig
from .statistics import batch_statistics, reference_embedding

NULL_HEADER = "otdcov-null v1"

# values held in memory per batch; the batch size depends on n only so the
# reduction order (and hence every draw) is independent of the thread count
_BATCH_BUDGET = 1 << 21


def resolve_threads(threads=None):
    """Worker count: explicit argument, else ``OTDCOV_THREADS``, else CPU count."""
    if threads is None:
        env = os.environ.get("OTDCOV_THREADS", "").strip()
        if env:
            try:
                threads = int(env)
            except ValueError:
                raise ValueError(f"OTDCOV_THREADS must be an integer, got {env!r}") from None
        else:
            threads = os.cpu_count() or 1
    return max(1, int(threads))


def _batch_size(n):
    return max(1, _BATCH_BUDGET // (n * n))


def random_pairings(n, n_draws, seed):
    """``n_draws`` uniform random permutations of ``range(n)``, one per row."""
    rng = derive_rng(seed, "null-permutations")
    base = np.broadcast_to(np.arange(n, dtype=np.intp), (n_draws, n))
    return rng.permuted(base, axis=1)


def evaluate_pairings(A, B, perms, threads=None):
    """Statistic for every row of ``perms``, in row order."""
    perms = np.asarray(perms, dtype=np.intp)
    step = _batch_size(A.shape[0])
    chunks = [perms[i:i + step] for i in range(0, perms.shape[0], step)]
    workers = min(resolve_threads(threads), len(chunks)) if chunks else 1
    if workers <= 1:
        parts = [batch_statistics(A, B, c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: batch_statistics(A, B, c), chunks))
    return np.concatenate(parts) if parts else np.empty(0)


def permutation_draws(A, B, n_draws, seed, threads=None):
    """Sorted Monte-Carlo null draws for the centred matrices ``A`` and ``B``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A and B must be square matrices of the same size")
    perms = random_pairings(A.shape[0], int(n_draws), seed)
    return np.sort(evaluate_pairings(A, B, perms, threads))


def exact_permutation_law(A, B, max_n=8):
    """Statistic under every one of the ``n!`` pairings, sorted."""
    n = A.shape[0]
    if n > max_n:
        raise ValueError(f"exhaustive enumeration limited to n <= {max_n}")
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    return np.sort(evaluate_pairings(A, B, perms, threads=1))


def null_distribution(cfg: TestConfig, n, dims, references=None, threads=None):
    """Sorted null draws of the statistic described by ``cfg``.

    ``references`` may supply the centred reference matrices ``(A, B)``
    explicitly; this is required when the reference grid depends on the
    data (the step-1 spherical variant).
    """
    d1, d2 = dims
    if references is None:
        _, A = reference_embedding(cfg, n, d1, "x")
        _, B = reference_embedding(cfg, n, d2, "y")
    else:
        A, B = references
    if A.shape[0] != n or B.shape[0] != n:
        raise ValueError("reference matrices do not match n")
    return permutation_draws(A, B, cfg.n_null_draws, cfg.seed, threads)


def p_value(statistic, null_draws):
    """``(1 + #{draws >= statistic}) / (M + 1)`` for draws sorted ascending."""
    draws = np.asarray(null_draws, dtype=float)
    if draws.size == 0:
        raise ValueError("null draws must be nonempty")
    at_least = draws.size - np.searchsorted(draws, statistic, side="left")
    return float((1.0 + at_least) / (draws.size + 1.0))


def critical_value(null_draws, alpha):
    """Threshold ``c`` such that ``statistic > c`` exactly when ``p_value <= alpha``.

    With draws sorted in decreasing order, ``c`` is the ``K``-th largest
    (counting from zero) where ``K`` is the largest count allowed by
    ``(1 + K) / (M + 1) <= alpha``; ``inf`` if even ``K = 0`` is too many.
    """
    draws = np.asarray(null_draws, dtype=float)
    if draws.size == 0:
        raise ValueError("null draws must be nonempty")
    m = draws.size
    # tolerate rounding in alpha * (M + 1)
    k = math.floor(alpha * (m + 1) * (1 + 1e-12)) - 1
    if k < 0:
        return math.inf
    k = min(k, m - 1)
    return float(draws[m - 1 - k])


# null-table files -------------------------------------------------------

def write_null_table(path, draws, fingerprint):
    """Write ``otdcov-null v1 <fingerprint>`` then one draw per line (17 significant digits)."""
    draws = np.sort(np.asarray(draws, dtype=float))
    lines = [f"{NULL_HEADER} {fingerprint}"] + [format(float(x), ".17g") for x in draws]
    text = "\n".join(lines) + "\n"
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="ascii")
    os.replace(tmp, path)


def read_null_table(path, fingerprint=None):
    """Read a null table; check the header fingerprint when one is given."""
    lines = Path(path).read_text(encoding="ascii").splitlines()
    if not lines or not lines[0].startswith(NULL_HEADER + " "):
        raise ValueError(f"{path}: not an otdcov null table")
    found = lines[0][len(NULL_HEADER) + 1:].strip()
    if fingerprint is not None and found != fingerprint:
        raise ValueError(f"{path}: fingerprint {found} does not match {fingerprint}")
    draws = np.array([float(x) for x in lines[1:] if x.strip()])
    if np.any(np.diff(draws) < 0):
        raise ValueError(f"{path}: draws are not sorted")
    return draws, found


class NullTableCache:
    """Null tables keyed by :meth:`TestConfig.null_key`, in memory and optionally on disk."""

    def __init__(self, directory=None):
        self.directory = None if directory is None else Path(directory)
        self._tables = {}
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)

    def path_for(self, key):
        return None if self.directory is None else self.directory / f"{key}.null"

    def get(self, cfg, n, dims, threads=None):
        key = cfg.null_key(n, *dims)
        draws = self._tables.get(key)
        if draws is not None:
            return draws
        path = self.path_for(key)
        if path is not None and path.exists():
            draws, _ = read_null_table(path, key)
            if draws.size != cfg.n_null_draws:
                draws = None
        if draws is None:
            draws = null_distribution(cfg, n, dims, threads=threads)
            if path is not None:
                write_null_table(path, draws, key)
        draws.setflags(write=False)
        self._tables[key] = draws
        return draws

    def __len__(self):
        return len(self._tables)

    def clear(self):
        self._tables.clear()
