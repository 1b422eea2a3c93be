"""Rank-based distance covariance statistics for paired samples.

Each margin is mapped to a set of reference embeddings (the scored grid
points) and a labelling of the observations by grid index.  The statistic
``n * dCov^2`` is evaluated on the reference embeddings paired through the
two labellings, so it depends on the data only through the pairing
permutation ``sigma``: the grid point of ``X_i`` is matched with the grid
point of ``Y_i``.  Null draws use exactly the same evaluation with a
uniformly random ``sigma``.
"""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .._rng import derive_rng
from ..dcov import double_center, dcov_sq, pairwise_distances
from ..exceptions import PoleCollisionError
from ..geometry import ANTIPODAL_MARGIN, as_unit
from ..ranks_rd import (build_ball_grid, center_outward, random_ball_transport, score_embedding,
                        spherical_uniform)
from ..ranks_sphere import (_frame_basis, canonical_sphere_grid, chart_embed, directional_ranks,
                            step1_transport, tangent_embedding)
from .config import TestConfig

_STREAM = {"x": 0, "y": 1}


@dataclass(frozen=True)
class Margin:
    """One margin after transport and scoring.

    ``reference[labels[i]]`` is the embedding of observation ``i``;
    ``embedding`` holds the same vectors expressed in the data frame.
    """
    labels: np.ndarray
    reference: np.ndarray
    embedding: np.ndarray
    matrix: np.ndarray = field(repr=False)
    data_free: bool = True
    flags: tuple = ()
    detail: object = field(default=None, repr=False)


@dataclass(frozen=True)
class StatisticResult:
    statistic: float
    sigma: np.ndarray
    A: np.ndarray
    B: np.ndarray
    margin_x: Margin
    margin_y: Margin
    flags: tuple = ()

    @property
    def data_free(self):
        return self.margin_x.data_free and self.margin_y.data_free

    @property
    def embeddings(self):
        return self.margin_x.embedding, self.margin_y.embedding

    def __iter__(self):
        return iter((self.statistic, self.embeddings))


def centered_distances(emb):
    return double_center(pairwise_distances(emb, "euclidean"))


def batch_statistics(A, B, perms):
    """``n * dCov^2`` for each row ``sigma`` of ``perms``: ``(1/n) sum_kl A_kl B_{sigma k, sigma l}``.

    Every value is reduced in the same order regardless of batch size, so a
    given pairing always yields bit-identical output.
    """
    perms = np.atleast_2d(np.asarray(perms, dtype=np.intp))
    n = A.shape[0]
    Bp = B[perms[:, :, None], perms[:, None, :]]
    prod = (A[None, :, :] * Bp).reshape(perms.shape[0], n * n)
    vals = prod.sum(axis=1) / n
    return np.maximum(vals, 0.0)


def pairing_statistic(A, B, sigma):
    return float(batch_statistics(A, B, sigma[None, :])[0])


def pairing_from_labels(labels_x, labels_y):
    """Permutation ``sigma`` with ``sigma[labels_x[i]] = labels_y[i]``."""
    sigma = np.empty_like(labels_y)
    sigma[labels_x] = labels_y
    return sigma


def _check_sample(z, name):
    z = np.asarray(z, dtype=float)
    if z.ndim == 1:
        z = z[:, None]
    if z.ndim != 2 or not np.all(np.isfinite(z)):
        raise ValueError(f"{name} must be a finite (n, d) array")
    return z


# reference embeddings ---------------------------------------------------

@lru_cache(maxsize=64)
def _reference_cached(cfg, n, d, side):
    spec = cfg.score_x if side == "x" else cfg.score_y
    stream = _STREAM[side]
    if cfg.space == "euclidean":
        if cfg.variant == "two_step":
            grid = build_ball_grid(n, d, cfg.seed, stream)
            ref = score_embedding(grid.ranks / (grid.n_R + 1), grid.signs, spec)
        else:
            pts = spherical_uniform(n, d, derive_rng(cfg.seed, "ball-step1", stream))
            radius = np.linalg.norm(pts, axis=1)
            ref = score_embedding(radius, pts / radius[:, None], spec)
    else:
        if cfg.variant != "two_step":
            raise ValueError("the step-1 spherical statistic has no data-free reference")
        grid = canonical_sphere_grid(n, d, cfg.seed, stream)
        if cfg.chart is None:
            ref = tangent_embedding(grid.ranks, grid.signs, grid.n_R, spec, d)
        else:
            ref = chart_embed(grid.points, grid.pole, cfg.chart, basis=grid.basis)
    ref.setflags(write=False)
    A = centered_distances(ref)
    A.setflags(write=False)
    return ref, A


def reference_embedding(cfg, n, d, side="x"):
    """Data-free scored grid of one margin and its double-centred distance matrix."""
    return _reference_cached(cfg, int(n), int(d), side)


# margins ----------------------------------------------------------------

def euclidean_margin(x, cfg, side="x"):
    x = _check_sample(x, side)
    n, d = x.shape
    ref, A = reference_embedding(cfg, n, d, side)
    stream = _STREAM[side]
    if cfg.variant == "two_step":
        grid = build_ball_grid(n, d, cfg.seed, stream)
        co = center_outward(x, grid)
        labels = co.grid_index
        detail = co
    else:
        _, _, tmap = random_ball_transport(x, derive_rng(cfg.seed, "ball-step1", stream),
                                           full_output=True)
        labels = tmap.perm
        detail = tmap
    return Margin(labels, ref, ref[labels], A, True, (), detail)


def _check_pole(z, pole, side):
    antipodal = z @ pole <= np.cos(np.pi - ANTIPODAL_MARGIN)
    if np.any(antipodal):
        idx = int(np.flatnonzero(antipodal)[0])
        raise PoleCollisionError(
            f"{side}: observation {idx} is antipodal to the estimated pole", index=idx)


def sphere_margin(z, cfg, side="x", frame=None):
    z = _check_sample(z, side)
    n, d = z.shape
    if d < 2:
        raise ValueError("directional data need dimension >= 2")
    norms = np.linalg.norm(z, axis=1)
    if not np.allclose(norms, 1.0, atol=1e-6):
        raise ValueError(f"{side}: directional observations must have unit norm")
    z = as_unit(z)
    spec = cfg.score_x if side == "x" else cfg.score_y
    stream = _STREAM[side]
    flags = []
    if cfg.variant == "two_step":
        dr = directional_ranks(z, cfg.seed, stream=stream, frame=frame)
        _check_pole(z, dr.pole, side)
        ref, A = reference_embedding(cfg, n, d, side)
        if cfg.chart is None:
            emb = tangent_embedding(dr.rank, dr.sign, dr.grid.n_R, spec, d)
            if dr.grid.n_0 > 0 and spec.kind == "sign":
                flags.append(f"sign-scores-pole-copies-zeroed:{side}")
        else:
            emb = chart_embed(dr.image, dr.pole, cfg.chart, basis=dr.grid.basis)
        if not dr.step1.converged:
            flags.append(f"frechet-mean-not-converged:{side}")
        return Margin(dr.grid_index, ref, emb, A, True, tuple(flags), dr)

    s1 = step1_transport(z, derive_rng(cfg.seed, "step1-grid", stream), frame=frame)
    _check_pole(z, s1.pole, side)
    basis = _frame_basis(s1.pole, frame)
    emb = chart_embed(s1.images, s1.pole, cfg.effective_chart, basis=basis)
    ref = chart_embed(s1.grid, s1.pole, cfg.effective_chart, basis=basis)
    if not s1.converged:
        flags.append(f"frechet-mean-not-converged:{side}")
    return Margin(s1.perm, ref, emb, centered_distances(ref), False, tuple(flags), s1)


# statistics -------------------------------------------------------------

def _assemble(mx, my):
    n = mx.labels.shape[0]
    if my.labels.shape[0] != n:
        raise ValueError("X and Y must have the same number of observations")
    A, B = mx.matrix, my.matrix
    sigma = pairing_from_labels(mx.labels, my.labels)
    stat = pairing_statistic(A, B, sigma)
    flags = list(mx.flags) + list(my.flags)
    if dcov_sq(A, A) == 0.0 or dcov_sq(B, B) == 0.0:
        flags.append("degenerate-dcor")
    return StatisticResult(stat, sigma, A, B, mx, my, tuple(flags))


def rank_dcov_euclidean(X, Y, cfg):
    """Center-outward rank distance covariance ``n * dCov^2`` of two Euclidean samples.

    Returns a :class:`StatisticResult` (unpacks as ``statistic, embeddings``).
    """
    if cfg.space != "euclidean":
        raise ValueError("configuration is not for Euclidean data")
    X = _check_sample(X, "X")
    Y = _check_sample(Y, "Y")
    if X.shape[0] != Y.shape[0]:
        raise ValueError("X and Y must have the same number of observations")
    if X.shape[0] < 4:
        raise ValueError("need n >= 4")
    return _assemble(euclidean_margin(X, cfg, "x"), euclidean_margin(Y, cfg, "y"))


def directional_dcov(X, Y, cfg, *, frame_x=None, frame_y=None):
    """Directional rank distance covariance ``n * dCov^2`` of two samples of unit vectors.

    ``frame_x`` / ``frame_y`` rotate the grids of each margin (used to check
    rotation equivariance).
    """
    if cfg.space != "sphere":
        raise ValueError("configuration is not for directional data")
    X = _check_sample(X, "X")
    Y = _check_sample(Y, "Y")
    if X.shape[0] != Y.shape[0]:
        raise ValueError("X and Y must have the same number of observations")
    if X.shape[0] < 4:
        raise ValueError("need n >= 4")
    return _assemble(sphere_margin(X, cfg, "x", frame_x), sphere_margin(Y, cfg, "y", frame_y))


def compute_statistic(X, Y, cfg: TestConfig):
    if cfg.space == "euclidean":
        return rank_dcov_euclidean(X, Y, cfg)
    return directional_dcov(X, Y, cfg)
