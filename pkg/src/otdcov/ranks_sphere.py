"""Directional ranks and signs on S^{d-1} by two-step empirical transport.

Step 1 transports the sample (half squared geodesic cost) to ``n`` i.i.d.
uniform points and reads off a data-driven pole: the image of the
observation nearest to the sample Fréchet mean.  Step 2 transports the
sample to a grid of ``n_R`` parallels times ``n_S`` meridians around that
pole, plus ``n_0`` copies of the pole.  The parallel an observation lands
on is its rank, the meridian (a unit vector in the equatorial hyperplane)
is its sign.
"""
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._rng import as_rng
from .assignment import cost_matrix, solve_assignment
from .exceptions import DomainError, PoleCollisionError
from .geometry import (ANTIPODAL_MARGIN, _log_many, as_unit, cap_quantile, exp_map,
                       frechet_mean, geodesic_distance, tangent_basis)
from .ranks_rd import ScoreSpec, factorize_n

CHARTS = ("azimuthal_equidistant", "azimuthal_equidistant_normalized")
TANGENT_RADIALS = ("wilcoxon", "van_der_waerden", "sign_test")


def uniform_sphere(n, d, seed=0, stream=0):
    """``n`` i.i.d. uniform points on S^{d-1} (normalised Gaussian vectors)."""
    g = as_rng(seed, "uniform-sphere", stream).standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sphere_grid_shape(n, d):
    """Factorisation of ``n`` for a sphere grid.

    On the circle (``d = 2``) there are only two half-meridians, so the
    grid is ``(n // 2, 2, n % 2)``.
    """
    if d == 2:
        if n < 4:
            raise ValueError(f"need n >= 4 to build a grid, got {n}")
        return n // 2, 2, n % 2
    return factorize_n(n)


def _frame_basis(pole, frame):
    if frame is None:
        return tangent_basis(pole)
    frame = np.asarray(frame, dtype=float)
    return tangent_basis(frame.T @ pole) @ frame.T


@dataclass(frozen=True)
class Step1:
    """Outcome of the first transport: images on the uniform grid and the pole."""
    images: np.ndarray
    pole: np.ndarray
    grid: np.ndarray
    perm: np.ndarray
    total_cost: float
    frechet: np.ndarray
    center_index: int
    converged: bool

    def __iter__(self):
        return iter((self.images, self.pole))


def step1_transport(sample, seed=0, *, grid=None, frame=None):
    """Transport to ``n`` i.i.d. uniform points and estimate the pole.

    Parameters
    ----------
    sample : array_like, shape (n, d)
        Unit vectors.
    seed : int or numpy.random.Generator
        Seeds the uniform grid unless ``grid`` is supplied.
    grid : array_like, shape (n, d), optional
    frame : array_like, shape (d, d), optional
        Rotation applied to the generated grid.

    Returns
    -------
    Step1
        Unpacks as ``images, pole``.
    """
    z = as_unit(np.asarray(sample, dtype=float))
    if z.ndim != 2 or z.shape[0] < 2:
        raise ValueError("step 1 needs at least two observations")
    n, d = z.shape
    if grid is None:
        grid = uniform_sphere(n, d, seed)
        if frame is not None:
            grid = grid @ np.asarray(frame, dtype=float).T
    else:
        grid = as_unit(np.asarray(grid, dtype=float))
        if grid.shape != z.shape:
            raise ValueError("grid and sample must have the same shape")
    tmap = solve_assignment(cost_matrix(z, grid, "geodesic_sq_half"))
    images = grid[tmap.perm]
    fm, info = frechet_mean(z, full_output=True)
    center = int(np.argmin(geodesic_distance(z, fm)))
    return Step1(images, images[center].copy(), grid, tmap.perm, tmap.total_cost,
                 fm, center, info["converged"])


def latitude_longitude(image, pole):
    """Latitude ``1 - <image, pole>`` and the unit longitude in the equatorial hyperplane.

    The longitude is ``None`` when ``image`` is (numerically) a pole or its
    antipode.
    """
    image = np.asarray(image, dtype=float)
    pole = np.asarray(pole, dtype=float)
    c = float(np.clip(image @ pole, -1.0, 1.0))
    w = image - c * pole
    s = float(np.linalg.norm(w))
    if s <= 1e-12:
        return 1.0 - c, None
    return 1.0 - c, w / s


@dataclass(frozen=True)
class SphereGrid:
    """Parallels-by-meridians grid around ``pole``.

    ``heights[r-1]`` is the inner product with the pole of every point on
    parallel ``r``; the cap above parallel
    ``r`` has uniform mass ``r / (n_R + 1)``.  Points are ordered
    parallel-major, then the ``n_0`` pole copies.  ``ranks``/``signs`` label
    each point; pole copies carry rank 0 and a zero sign.
    """
    pole: np.ndarray
    basis: np.ndarray
    n_R: int
    n_S: int
    n_0: int
    heights: np.ndarray
    longitude_coords: np.ndarray
    longitudes: np.ndarray
    points: np.ndarray
    ranks: np.ndarray
    signs: np.ndarray

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def parallel_latitudes(self):
        return self.heights

    def rotated(self, R):
        """The same grid moved by the rotation ``R`` (labels unchanged)."""
        R = np.asarray(R, dtype=float)
        return SphereGrid(R @ self.pole, self.basis @ R.T, self.n_R, self.n_S, self.n_0,
                          self.heights, self.longitude_coords, self.longitudes @ R.T,
                          self.points @ R.T, self.ranks, self.signs @ R.T)


def meridian_coordinates(n_S, d, seed=0):
    """Longitudes in equatorial coordinates, shape ``(n_S, d - 1)``.

    Two half-circles on S^1, equispaced angles on S^2 and seeded i.i.d.
    uniform directions beyond.
    """
    if d == 2:
        if n_S > 2:
            raise ValueError("on the circle there are at most two meridians (n_S <= 2)")
        return np.array([[1.0], [-1.0]])[:n_S]
    if d == 3:
        a = 2.0 * np.pi * np.arange(n_S) / n_S
        return np.column_stack([np.cos(a), np.sin(a)])
    g = as_rng(seed, "meridians").standard_normal((n_S, d - 1))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def build_sphere_grid(pole, n_R, n_S, n_0, d, seed=0, *, basis=None):
    """Grid of parallels and meridians around ``pole`` on S^{d-1}.

    ``basis`` (rows: orthonormal basis of the equatorial hyperplane) fixes
    the orientation of the meridians; it defaults to
    :func:`~otdcov.geometry.tangent_basis`.
    """
    if int(d) != d or d < 2:
        raise ValueError("d must be an integer >= 2")
    pole = as_unit(pole)
    if pole.shape != (d,):
        raise ValueError(f"pole must have dimension {d}")
    if n_R < 1 or n_S < 1 or n_0 < 0:
        raise ValueError("need n_R >= 1, n_S >= 1 and n_0 >= 0")
    if n_0 >= min(n_R, n_S):
        raise ValueError(f"n_0 = {n_0} must be < min(n_R, n_S) = {min(n_R, n_S)}")
    if basis is None:
        basis = tangent_basis(pole)
    basis = np.asarray(basis, dtype=float)
    if basis.shape != (d - 1, d):
        raise ValueError(f"basis must have shape {(d - 1, d)}")

    r = np.arange(1, n_R + 1)
    heights = np.asarray(cap_quantile(1.0 - r / (n_R + 1), d), dtype=float).reshape(n_R)
    coords = meridian_coordinates(n_S, d, seed)
    longitudes = coords @ basis
    ring = np.sqrt(np.clip(1.0 - heights ** 2, 0.0, None))
    pts = (heights[:, None, None] * pole[None, None, :]
           + ring[:, None, None] * longitudes[None, :, :]).reshape(-1, d)
    points = np.concatenate([pts, np.tile(pole, (n_0, 1))])
    ranks = np.concatenate([np.repeat(r, n_S), np.zeros(n_0, dtype=int)])
    signs = np.concatenate([np.tile(longitudes, (n_R, 1)), np.zeros((n_0, d))])
    return SphereGrid(pole, basis, n_R, n_S, n_0, heights, coords, longitudes, points, ranks, signs)


class DirectionalRankSign(NamedTuple):
    rank: int
    sign: np.ndarray
    image: np.ndarray
    latitude: float
    pole_used: np.ndarray


@dataclass(frozen=True)
class DirectionalRanks:
    """Step-2 output for a whole sample (row-aligned with the sample)."""
    rank: np.ndarray
    sign: np.ndarray
    image: np.ndarray
    latitude: np.ndarray
    grid_index: np.ndarray
    total_cost: float
    grid: SphereGrid = field(repr=False)
    step1: Step1 | None = field(default=None, repr=False)

    @property
    def pole(self):
        return self.grid.pole

    def records(self):
        return [DirectionalRankSign(int(r), s, im, float(lat), self.grid.pole)
                for r, s, im, lat in zip(self.rank, self.sign, self.image, self.latitude)]


def step2_transport(sample, grid):
    """Transport the sample onto a :class:`SphereGrid`; ranks and signs are the image's labels."""
    z = as_unit(np.asarray(sample, dtype=float))
    if z.ndim != 2 or z.shape[0] != grid.n:
        raise ValueError(f"sample has {z.shape[0]} points but the grid has {grid.n}")
    tmap = solve_assignment(cost_matrix(z, grid.points, "geodesic_sq_half"))
    idx = tmap.perm
    image = grid.points[idx]
    latitude = 1.0 - np.clip(image @ grid.pole, -1.0, 1.0)
    return DirectionalRanks(grid.ranks[idx], grid.signs[idx], image, latitude, idx,
                            tmap.total_cost, grid)


def canonical_sphere_grid(n, d, seed=0, stream=0, shape=None):
    """The step-2 grid that :func:`directional_ranks` would build around ``e_d``.

    Grids around other poles are rotations of this one with identical
    labels, so scored embeddings of its points are data-free references.
    """
    n_R, n_S, n_0 = shape if shape is not None else sphere_grid_shape(n, d)
    pole = np.zeros(d)
    pole[-1] = 1.0
    return build_sphere_grid(pole, n_R, n_S, n_0, d, as_rng(seed, "step2-meridians", stream))


def directional_ranks(sample, seed=0, *, stream=0, shape=None, frame=None):
    """Full two-step pipeline: pole from step 1, then ranks and signs from step 2.

    ``(seed, stream)`` drive both the uniform grid of step 1 and, for
    ``d > 3``, the meridians of step 2.  ``frame`` rotates every generated
    grid, so that ``directional_ranks(x @ Q.T, frame=Q)`` reproduces the
    ranks of ``x`` with signs rotated by ``Q``.
    """
    z = as_unit(np.asarray(sample, dtype=float))
    n, d = z.shape
    n_R, n_S, n_0 = shape if shape is not None else sphere_grid_shape(n, d)
    s1 = step1_transport(z, as_rng(seed, "step1-grid", stream), frame=frame)
    grid = build_sphere_grid(s1.pole, n_R, n_S, n_0, d, as_rng(seed, "step2-meridians", stream),
                             basis=_frame_basis(s1.pole, frame))
    s2 = step2_transport(z, grid)
    return DirectionalRanks(s2.rank, s2.sign, s2.image, s2.latitude, s2.grid_index,
                            s2.total_cost, grid, s1)


def _radial_spec(radial):
    if isinstance(radial, ScoreSpec):
        return radial
    key = str(radial).lower()
    if key not in TANGENT_RADIALS and key not in ("vdw", "sign", "biloop") and not key.startswith("biloop"):
        raise ValueError(f"unknown radial score {radial!r}; expected one of {TANGENT_RADIALS}")
    return ScoreSpec.parse(key)


def tangent_embedding(ranks, signs, n_R, radial, d):
    """Vectorised tangent-space embedding: radial score of ``rank/(n_R+1)`` times the sign.

    Van der Waerden scores use ``d - 1`` degrees of freedom (the dimension
    of the tangent space).  Returns an array of shape ``(n, d)`` (``(n, 2d)``
    for biloop scores).
    """
    spec = _radial_spec(radial)
    u = np.asarray(ranks, dtype=float) / (n_R + 1)
    signs = np.asarray(signs, dtype=float)
    j = spec.radial(u, d - 1)
    if spec.kind == "biloop":
        return np.concatenate([j[:, 0:1] * signs, j[:, 1:2] * signs], axis=1)
    return j[:, None] * signs


def tangent_embed(rs, radial, grid):
    """Embedding of one :class:`DirectionalRankSign` in the tangent space at the pole.

    Pole copies (rank 0) map to the zero vector.
    """
    return tangent_embedding(np.array([rs.rank]), np.atleast_2d(rs.sign), grid.n_R,
                             radial, grid.dim)[0]


def chart_embed(image, pole, chart="azimuthal_equidistant", basis=None):
    """Azimuthal equidistant chart centred at ``pole``.

    Returns the logarithm at ``pole`` in the coordinates of ``basis``
    (shape ``(d - 1,)`` or ``(m, d - 1)``); the normalised chart divides by
    pi so that its range is the open unit ball.

    Raises
    ------
    PoleCollisionError
        If some image is the antipode of ``pole``.
    """
    if chart not in CHARTS:
        raise ValueError(f"unknown chart {chart!r}; expected one of {CHARTS}")
    pole = as_unit(pole)
    image = np.asarray(image, dtype=float)
    single = image.ndim == 1
    v, antipodal = _log_many(pole, np.atleast_2d(image))
    if np.any(antipodal):
        idx = int(np.flatnonzero(antipodal)[0])
        raise PoleCollisionError(
            f"observation {idx} is antipodal to the chart pole (within {ANTIPODAL_MARGIN})", index=idx)
    if basis is None:
        basis = tangent_basis(pole)
    coords = v @ np.asarray(basis).T
    if chart == "azimuthal_equidistant_normalized":
        coords = coords / np.pi
    return coords[0] if single else coords


def chart_inverse(coords, pole, chart="azimuthal_equidistant", basis=None):
    """Inverse of :func:`chart_embed`."""
    if chart not in CHARTS:
        raise ValueError(f"unknown chart {chart!r}; expected one of {CHARTS}")
    pole = as_unit(pole)
    coords = np.asarray(coords, dtype=float)
    if chart == "azimuthal_equidistant_normalized":
        coords = coords * np.pi
    if basis is None:
        basis = tangent_basis(pole)
    v = coords @ np.asarray(basis)
    if np.any(np.linalg.norm(np.atleast_2d(v), axis=1) >= np.pi):
        raise DomainError("chart coordinates outside the open ball of radius pi")
    return exp_map(pole, v)
