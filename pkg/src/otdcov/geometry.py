"""Primitives on the unit hypersphere S^{d-1} embedded in R^d.

Points are plain numpy arrays of unit norm, tangent vectors are arrays
orthogonal to their base point.  Functions that take a single point also
accept a stack of points of shape ``(m, d)`` where noted.
"""
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .exceptions import DomainError

#: Points closer than this (in geodesic distance) to the antipode of a chart
#: centre are treated as antipodal.
ANTIPODAL_MARGIN = 1e-9


def as_unit(z, *, min_dim=2):
    """Return ``z`` as a float array renormalised to unit Euclidean norm.

    Works row-wise on 2-D input.
    """
    z = np.asarray(z, dtype=float)
    if z.ndim not in (1, 2):
        raise ValueError(f"expected a vector or a stack of vectors, got shape {z.shape}")
    if z.shape[-1] < min_dim:
        raise ValueError(f"dimension must be >= {min_dim}, got {z.shape[-1]}")
    norms = np.linalg.norm(z, axis=-1, keepdims=True)
    if np.any(norms == 0) or not np.all(np.isfinite(norms)):
        raise ValueError("cannot normalise a zero or non-finite vector")
    return z / norms


def _check_same_dim(a, b):
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")


def geodesic_distance(z1, z2):
    """Great-circle distance ``|arccos <z1, z2>|`` in ``[0, pi]``.

    Inputs broadcast against each other along leading axes.
    """
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    _check_same_dim(z1, z2)
    inner = np.clip(np.sum(z1 * z2, axis=-1), -1.0, 1.0)
    return np.abs(np.arccos(inner))


def transport_cost(z1, z2):
    """Half squared geodesic distance, the cost used for spherical transport."""
    return 0.5 * geodesic_distance(z1, z2) ** 2


def _log_many(base, z):
    """Logarithm of each row of ``z`` at ``base``; also returns the antipodal mask."""
    c = z @ base
    w = z - c[:, None] * base
    s = np.linalg.norm(w, axis=1)
    theta = np.arctan2(s, c)
    antipodal = theta >= np.pi - ANTIPODAL_MARGIN
    scale = np.divide(theta, s, out=np.zeros_like(s), where=s > 0)
    v = w * scale[:, None]
    v[antipodal] = 0.0
    return v, antipodal


def log_map(base, z):
    """Riemannian logarithm: the tangent vector at ``base`` pointing to ``z``.

    Its norm equals the geodesic distance.  ``z`` may be a single point or a
    stack of points.

    Raises
    ------
    DomainError
        If some ``z`` is (numerically) antipodal to ``base``.
    """
    base = np.asarray(base, dtype=float)
    z = np.asarray(z, dtype=float)
    _check_same_dim(base, z)
    single = z.ndim == 1
    v, antipodal = _log_many(base, np.atleast_2d(z))
    if np.any(antipodal):
        idx = np.flatnonzero(antipodal)
        raise DomainError(f"log map undefined at the antipode of the base point (rows {idx.tolist()})")
    return v[0] if single else v


def exp_map(base, v):
    """Riemannian exponential ``cos|v| base + sin|v| v/|v|``.

    Raises
    ------
    DomainError
        If ``|v| >= pi``; the map stops being injective there.
    """
    base = np.asarray(base, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_same_dim(base, v)
    single = v.ndim == 1
    v2 = np.atleast_2d(v)
    nv = np.linalg.norm(v2, axis=1)
    if np.any(nv >= np.pi):
        raise DomainError("tangent vector norm must be < pi")
    tol = 1e-8 * np.maximum(1.0, nv)
    if np.any(np.abs(v2 @ base) > tol):
        raise ValueError("vector is not tangent at the base point")
    direction = np.divide(v2, nv[:, None], out=np.zeros_like(v2), where=nv[:, None] > 0)
    out = np.cos(nv)[:, None] * base + np.sin(nv)[:, None] * direction
    out /= np.linalg.norm(out, axis=1, keepdims=True)
    return out[0] if single else out


def _frechet_objective(mu, points, weights):
    return 0.5 * np.sum(weights * geodesic_distance(points, mu) ** 2)


def frechet_mean(points, weights=None, *, tol=1e-10, max_iter=1000, full_output=False):
    """Weighted Fréchet mean under half squared geodesic distance.

    Gradient descent with unit step: average the logarithms at the current
    estimate and move along the exponential of that average.  The iteration
    starts at the normalised extrinsic mean, or at ``points[0]`` when the
    extrinsic mean nearly vanishes, so the minimiser found is a deterministic
    function of the input.

    Parameters
    ----------
    points : array_like, shape (m, d)
    weights : array_like, shape (m,), optional
        Nonnegative weights, uniform by default.
    tol : float
        Stop once the step norm falls below this.
    max_iter : int
    full_output : bool
        Also return a dict with ``converged``, ``iterations`` and ``step_norm``.

    Notes
    -----
    Points exactly antipodal to the current iterate contribute no gradient.
    If the iteration does not converge, the iterate with the smallest
    objective is returned and ``converged`` is False.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ValueError("points must be a nonempty (m, d) array")
    points = as_unit(points)
    m = points.shape[0]
    if weights is None:
        weights = np.ones(m)
    else:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (m,) or np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite, nonnegative and match the points")
    total = weights.sum()
    if total <= 0:
        raise ValueError("weights must have a positive sum")

    extrinsic = weights @ points / total
    norm = np.linalg.norm(extrinsic)
    mu = points[0].copy() if norm < 1e-8 else extrinsic / norm

    best, best_obj = mu, _frechet_objective(mu, points, weights)
    converged = False
    step_norm = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        v, _ = _log_many(mu, points)
        step = weights @ v / total
        step_norm = float(np.linalg.norm(step))
        if step_norm < tol:
            converged = True
            break
        mu = exp_map(mu, step - (step @ mu) * mu)
        obj = _frechet_objective(mu, points, weights)
        if obj <= best_obj:
            best, best_obj = mu, obj
    result = mu if converged else best
    if full_output:
        return result, {"converged": converged, "iterations": it, "step_norm": step_norm}
    return result


def _check_dim(d):
    if int(d) != d or d < 2:
        raise ValueError(f"sphere ambient dimension must be an integer >= 2, got {d}")
    return int(d)


@lru_cache(maxsize=None)
def _cap_norm(d):
    # integral of (1 - s^2)^((d-3)/2) over [-1, 1]
    return special.beta(0.5, (d - 1) / 2.0)


def _cap_cdf_quad(u, d):
    k = (d - 3) / 2.0

    def f(s):
        return (1.0 - s * s) ** k

    if u <= 0:
        val, _ = integrate.quad(f, -1.0, u, epsabs=1e-12, epsrel=1e-12, limit=200)
        return val / _cap_norm(d)
    val, _ = integrate.quad(f, u, 1.0, epsabs=1e-12, epsrel=1e-12, limit=200)
    return 1.0 - val / _cap_norm(d)


def cap_cdf(u, d):
    """Distribution function of ``<U, theta>`` for ``U`` uniform on S^{d-1}.

    Closed forms for ``d`` in {2, 3}; adaptive quadrature otherwise.
    Accepts scalars or arrays.
    """
    d = _check_dim(d)
    u_arr = np.asarray(u, dtype=float)
    if np.any(np.isnan(u_arr)) or np.any(u_arr < -1) or np.any(u_arr > 1):
        raise ValueError("u must lie in [-1, 1]")
    if d == 3:
        out = (u_arr + 1.0) / 2.0
    elif d == 2:
        out = np.arcsin(u_arr) / np.pi + 0.5
    else:
        out = np.vectorize(_cap_cdf_quad, otypes=[float])(u_arr, d)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=4096)
def _cap_quantile_scalar(p, d):
    if p == 0.0:
        return -1.0
    if p == 1.0:
        return 1.0
    if d == 3:
        return 2.0 * p - 1.0
    if d == 2:
        return float(np.sin(np.pi * (p - 0.5)))
    lo, hi = -1.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _cap_cdf_quad(mid, d) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def cap_quantile(p, d):
    """Inverse of :func:`cap_cdf` in its first argument (bisection for d >= 4)."""
    d = _check_dim(d)
    p_arr = np.asarray(p, dtype=float)
    if np.any(np.isnan(p_arr)) or np.any(p_arr < 0) or np.any(p_arr > 1):
        raise ValueError("p must lie in [0, 1]")
    out = np.vectorize(lambda q: _cap_quantile_scalar(float(q), d), otypes=[float])(p_arr)
    return float(out) if out.ndim == 0 else out


def rotation_to(source, target):
    """Rotation taking ``source`` to ``target`` in their common plane.

    The returned matrix has determinant one and fixes the orthogonal
    complement of ``span{source, target}``.
    """
    a = as_unit(source, min_dim=2)
    b = as_unit(target, min_dim=2)
    _check_same_dim(a, b)
    d = a.shape[0]
    c = float(np.clip(a @ b, -1.0, 1.0))
    w = b - c * a
    s = float(np.linalg.norm(w))
    if np.arctan2(s, c) >= np.pi - ANTIPODAL_MARGIN:
        raise DomainError("rotation between antipodal points is not unique")
    if s == 0.0:
        return np.eye(d)
    v = w / s
    # renormalise the cosine/sine pair so the matrix is orthogonal to rounding
    r = np.hypot(c, s)
    c, s = c / r, s / r
    return (np.eye(d)
            + (c - 1.0) * (np.outer(a, a) + np.outer(v, v))
            + s * (np.outer(v, a) - np.outer(a, v)))


def tangent_basis(pole):
    """Orthonormal basis (rows) of the hyperplane orthogonal to ``pole``.

    The basis is the image of ``e_1, ..., e_{d-1}`` under the rotation taking
    ``e_d`` (or ``-e_d`` for poles in the lower hemisphere) to ``pole``.
    """
    pole = as_unit(pole)
    d = pole.shape[0]
    anchor = np.zeros(d)
    anchor[-1] = 1.0 if pole[-1] >= 0 else -1.0
    R = rotation_to(anchor, pole)
    return R[:, :-1].T.copy()


def equatorial_coordinates(v, pole, basis=None):
    """Coordinates of vectors orthogonal to ``pole`` in a tangent basis."""
    if basis is None:
        basis = tangent_basis(pole)
    return np.asarray(v, dtype=float) @ basis.T


def from_equatorial_coordinates(coords, pole, basis=None):
    if basis is None:
        basis = tangent_basis(pole)
    return np.asarray(coords, dtype=float) @ basis
