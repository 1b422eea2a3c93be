"""Center-outward ranks and signs in R^d, and the score functions applied to them.

The empirical center-outward distribution function is the optimal
assignment (half squared Euclidean cost) of the sample to a grid made of
``n_R`` concentric spheres of radii ``r / (n_R + 1)`` times ``n_S`` unit
directions, plus ``n_0`` copies of the origin.  An observation's rank is
the index ``r`` of the sphere it lands on and its sign is the direction.
"""
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import special

from ._rng import as_rng
from .assignment import cost_matrix, solve_assignment

PLAIN_KINDS = ("wilcoxon", "van_der_waerden", "sign")

_ALIASES = {
    "wilcoxon": "wilcoxon",
    "vdw": "van_der_waerden",
    "van_der_waerden": "van_der_waerden",
    "van-der-waerden": "van_der_waerden",
    "gaussian": "van_der_waerden",
    "sign": "sign",
    "sign_test": "sign",
    "sign-test": "sign",
}


def factorize_n(n):
    """Split ``n`` into ``n_R * n_S + n_0`` with ``0 <= n_0 < min(n_R, n_S)``.

    Starts from ``n_R = n_S = floor(sqrt(n))`` and widens ``n_S`` while the
    remainder is too large.
    """
    n = int(n)
    if n < 4:
        raise ValueError(f"need n >= 4 to build a grid, got {n}")
    k = int(np.floor(np.sqrt(n)))
    while k * k > n:
        k -= 1
    while (k + 1) * (k + 1) <= n:
        k += 1
    n_R = n_S = k
    n_0 = n - n_R * n_S
    while n_0 >= min(n_R, n_S):
        n_S += 1
        n_0 = n - n_R * n_S
    return n_R, n_S, n_0


def grid_shape(n, d):
    """Grid factorisation used for ball grids in dimension ``d``.

    On the line there are only two directions, so the grid is
    ``(n // 2, 2, n % 2)``; otherwise :func:`factorize_n`.
    """
    if d == 1:
        if n < 4:
            raise ValueError(f"need n >= 4 to build a grid, got {n}")
        return n // 2, 2, n % 2
    return factorize_n(n)


def direction_set(n_S, d, seed=0, stream=0):
    """Directions of a ball grid, shape ``(n_S, d)``.

    ``d = 1``: alternating +1, -1.  ``d = 2``: ``n_S`` equispaced angles
    starting at 0.  ``d >= 3``: i.i.d. uniform unit vectors from the seeded
    generator.
    """
    if n_S < 1 or d < 1:
        raise ValueError("n_S and d must be positive")
    if d == 1:
        return np.where(np.arange(n_S) % 2 == 0, 1.0, -1.0)[:, None]
    if d == 2:
        angles = 2.0 * np.pi * np.arange(n_S) / n_S
        return np.column_stack([np.cos(angles), np.sin(angles)])
    g = as_rng(seed, "ball-directions", stream).standard_normal((n_S, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


@dataclass(frozen=True)
class BallGrid:
    """Structured grid in the open unit ball of R^d.

    Points are ordered radius-major (all directions of radius 1, then of
    radius 2, ...), followed by the ``n_0`` origin copies.  ``ranks`` and
    ``signs`` hold each point's label; they stay fixed under
    :meth:`translated`.
    """
    n_R: int
    n_S: int
    n_0: int
    directions: np.ndarray
    points: np.ndarray
    ranks: np.ndarray
    signs: np.ndarray

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def translated(self, offset):
        offset = np.asarray(offset, dtype=float)
        return BallGrid(self.n_R, self.n_S, self.n_0, self.directions,
                        self.points + offset, self.ranks, self.signs)


def ball_grid(n_R, n_S, n_0, d, seed=0, directions=None, stream=0):
    if n_R < 1 or n_S < 1 or n_0 < 0:
        raise ValueError("need n_R >= 1, n_S >= 1 and n_0 >= 0")
    if n_0 >= min(n_R, n_S):
        raise ValueError(f"n_0 = {n_0} must be < min(n_R, n_S) = {min(n_R, n_S)}")
    if directions is None:
        directions = direction_set(n_S, d, seed, stream)
    directions = np.asarray(directions, dtype=float).reshape(n_S, d)
    radii = np.arange(1, n_R + 1) / (n_R + 1)
    pts = (radii[:, None, None] * directions[None, :, :]).reshape(-1, d)
    ranks = np.concatenate([np.repeat(np.arange(1, n_R + 1), n_S), np.zeros(n_0, dtype=int)])
    signs = np.concatenate([np.tile(directions, (n_R, 1)), np.zeros((n_0, d))])
    points = np.concatenate([pts, np.zeros((n_0, d))])
    return BallGrid(n_R, n_S, n_0, directions, points, ranks, signs)


def build_ball_grid(n, d, seed=0, stream=0):
    """Ball grid with ``n`` points, factorised by :func:`grid_shape`.

    ``stream`` selects an independent set of random directions (``d >= 3``)
    for the same seed, e.g. one per margin of a paired sample.
    """
    n_R, n_S, n_0 = grid_shape(n, d)
    return ball_grid(n_R, n_S, n_0, d, seed, stream=stream)


class CenterOutwardRecord(NamedTuple):
    rank: int
    sign: np.ndarray
    image: np.ndarray


@dataclass(frozen=True)
class CenterOutward:
    """Center-outward ranks, signs and grid images of a sample (row-aligned)."""
    rank: np.ndarray
    sign: np.ndarray
    image: np.ndarray
    grid_index: np.ndarray
    total_cost: float
    n_R: int
    grid: BallGrid = field(repr=False)

    def records(self):
        return [CenterOutwardRecord(int(r), s, im)
                for r, s, im in zip(self.rank, self.sign, self.image)]


def center_outward(sample, grid):
    """Empirical center-outward transport of ``sample`` onto ``grid``."""
    x = np.asarray(sample, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] != grid.n:
        raise ValueError(f"sample has {x.shape[0]} points but the grid has {grid.n}")
    tmap = solve_assignment(cost_matrix(x, grid.points, "euclidean_sq_half"))
    idx = tmap.perm
    return CenterOutward(rank=grid.ranks[idx], sign=grid.signs[idx], image=grid.points[idx],
                         grid_index=idx, total_cost=tmap.total_cost, n_R=grid.n_R, grid=grid)


def spherical_uniform(n, d, seed=0, stream=0):
    """``n`` i.i.d. draws of ``R * U``, ``R ~ Uniform[0, 1]`` independent of a uniform direction ``U``."""
    rng = as_rng(seed, "spherical-uniform", stream)
    g = rng.standard_normal((n, d))
    u = g / np.linalg.norm(g, axis=1, keepdims=True)
    return rng.uniform(0.0, 1.0, size=(n, 1)) * u


def random_ball_transport(sample, seed=0, full_output=False, stream=0):
    """Transport of the sample to ``n`` i.i.d. spherical-uniform points.

    Returns the image of every observation; with ``full_output`` also the
    generated grid and the :class:`~otdcov.assignment.TransportMap`.
    """
    x = np.asarray(sample, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n, d = x.shape
    if n < 1:
        raise ValueError("empty sample")
    grid = spherical_uniform(n, d, seed, stream)
    tmap = solve_assignment(cost_matrix(x, grid, "euclidean_sq_half"))
    images = grid[tmap.perm]
    if full_output:
        return images, grid, tmap
    return images


def chi2_quantile(p, d):
    """Quantile of the chi-square law with ``d`` degrees of freedom.

    Bisection against the regularised lower incomplete gamma function.
    """
    if int(d) != d or d < 1:
        raise ValueError(f"degrees of freedom must be a positive integer, got {d}")
    p_arr = np.asarray(p, dtype=float)
    if np.any(np.isnan(p_arr)) or np.any(p_arr < 0) or np.any(p_arr >= 1):
        raise ValueError("p must lie in [0, 1)")
    a = d / 2.0
    flat = p_arr.ravel()
    lo = np.zeros_like(flat)
    hi = np.full_like(flat, max(2.0 * d, 2.0))
    while True:
        short = special.gammainc(a, hi / 2.0) < flat
        if not np.any(short):
            break
        hi[short] *= 2.0
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if np.all((mid <= lo) | (mid >= hi)):
            break
        below = special.gammainc(a, mid / 2.0) < flat
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = np.where(flat == 0, 0.0, 0.5 * (lo + hi)).reshape(p_arr.shape)
    return float(out) if out.ndim == 0 else out


def chi2_cdf(x, d):
    return special.gammainc(d / 2.0, np.asarray(x, dtype=float) / 2.0)


def biloop_radial(v, c=1.0):
    """Planar loop ``(c (1 + cos(2 pi tanh(v/c) + pi)), sin(2 pi tanh(v/c)))``.

    Bounded by ``sqrt(4 c^2 + 1)``, zero at 0 and tending to 0 as ``v`` grows.
    Returns shape ``v.shape + (2,)``.
    """
    if c <= 0:
        raise ValueError("biloop constant c must be positive")
    t = 2.0 * np.pi * np.tanh(np.asarray(v, dtype=float) / c)
    return np.stack([c * (1.0 + np.cos(t + np.pi)), np.sin(t)], axis=-1)


@dataclass(frozen=True)
class ScoreSpec:
    """Score applied to (rank, sign) pairs.

    ``kind`` is one of ``wilcoxon``, ``van_der_waerden``, ``sign`` or
    ``biloop``; a biloop score composes the loop with ``base``.  ``dim``
    overrides the chi-square degrees of freedom of van der Waerden scores,
    which otherwise default to the dimension of the signs.
    """
    kind: str = "wilcoxon"
    base: str | None = None
    c: float = 1.0
    dim: int | None = None

    def __post_init__(self):
        if self.kind == "biloop":
            if self.base not in PLAIN_KINDS:
                raise ValueError(f"biloop base must be one of {PLAIN_KINDS}, got {self.base!r}")
            if not self.c > 0:
                raise ValueError("biloop constant c must be positive")
        elif self.kind not in PLAIN_KINDS:
            raise ValueError(f"unknown score kind {self.kind!r}")

    @classmethod
    def parse(cls, text, c=1.0, dim=None):
        """Build a score from ``"wilcoxon"``, ``"vdw"``, ``"sign"``, ``"biloop"``
        (Wilcoxon base) or ``"biloop-<base>"`` / ``"biloop:<base>"``."""
        if isinstance(text, ScoreSpec):
            return text
        key = str(text).strip().lower()
        if key.startswith("biloop"):
            rest = key[len("biloop"):].lstrip(":-_")
            base = _ALIASES.get(rest or "wilcoxon")
            if base is None:
                raise ValueError(f"unknown biloop base in {text!r}")
            return cls("biloop", base, float(c), dim)
        kind = _ALIASES.get(key)
        if kind is None:
            raise ValueError(f"unknown score kind {text!r}")
        return cls(kind, None, float(c), dim)

    @property
    def label(self):
        if self.kind == "biloop":
            return f"biloop-{self.base}(c={self.c!r})"
        return self.kind

    def width(self, d):
        """Embedding dimension for signs in R^d."""
        return 2 * d if self.kind == "biloop" else d

    def radial(self, u, dof):
        """Radial score of ``u`` in [0, 1); shape ``u.shape`` or ``u.shape + (2,)`` for biloop."""
        kind = self.base if self.kind == "biloop" else self.kind
        u = np.asarray(u, dtype=float)
        dof = self.dim if self.dim is not None else dof
        if kind == "wilcoxon":
            j = u
        elif kind == "van_der_waerden":
            j = np.sqrt(chi2_quantile(u, dof))
        else:
            j = np.ones_like(u)
        if self.kind == "biloop":
            return biloop_radial(j, self.c)
        return j


def score_embedding(u, signs, spec):
    """Scored embedding ``J(u) * s`` for rows of ``signs``; zero signs stay zero."""
    spec = ScoreSpec.parse(spec)
    signs = np.asarray(signs, dtype=float)
    u = np.asarray(u, dtype=float)
    j = spec.radial(u, signs.shape[1])
    if spec.kind == "biloop":
        return np.concatenate([j[:, 0:1] * signs, j[:, 1:2] * signs], axis=1)
    return j[:, None] * signs


def apply_score(record, spec, n_R):
    """Scored embedding of a single :class:`CenterOutwardRecord`."""
    u = np.array([record.rank / (n_R + 1)])
    return score_embedding(u, np.atleast_2d(record.sign), spec)[0]


def score_ranks(co, spec):
    """Scored embeddings of every observation in a :class:`CenterOutward` result."""
    return score_embedding(co.rank / (co.n_R + 1), co.sign, spec)
