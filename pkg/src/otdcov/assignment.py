"""Exact linear assignment, i.e. discrete optimal transport between two
equally sized point clouds with uniform weights."""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass(frozen=True)
class TransportMap:
    """Optimal pairing of sample points to grid points.

    ``perm[i]`` is the (0-based) grid index assigned to sample point ``i``.
    """
    perm: np.ndarray
    total_cost: float

    def inverse(self):
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.perm.size)
        return inv


def solve_assignment(cost):
    """Minimise ``sum_i cost[i, perm[i]]`` over permutations.

    Uses scipy's shortest augmenting path solver (O(n^3) worst case), which
    is deterministic: ties between optimal permutations always resolve the
    same way for the same matrix.
    """
    C = np.asarray(cost, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {C.shape}")
    if np.any(np.isnan(C)) or not np.all(np.isfinite(C)):
        raise ValueError("cost matrix must be finite")
    if np.any(C < 0):
        raise ValueError("cost matrix entries must be nonnegative")
    n = C.shape[0]
    if n == 0:
        return TransportMap(np.zeros(0, dtype=np.intp), 0.0)
    rows, cols = linear_sum_assignment(C)
    perm = np.empty(n, dtype=np.intp)
    perm[rows] = cols
    return TransportMap(perm, float(C[np.arange(n), perm].sum()))


def cost_matrix(sample, grid, metric="euclidean_sq_half"):
    """Transport costs between every sample point and every grid point.

    ``metric`` is ``"euclidean_sq_half"`` (half squared Euclidean distance)
    or ``"geodesic_sq_half"`` (half squared great-circle distance; inputs
    must be unit vectors).
    """
    x = np.asarray(sample, dtype=float)
    g = np.asarray(grid, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if g.ndim == 1:
        g = g[:, None]
    if x.shape[0] != g.shape[0]:
        raise ValueError(f"cardinality mismatch: {x.shape[0]} sample points vs {g.shape[0]} grid points")
    if x.shape[1] != g.shape[1]:
        raise ValueError(f"dimension mismatch: {x.shape[1]} vs {g.shape[1]}")
    if metric == "euclidean_sq_half":
        diff = x[:, None, :] - g[None, :, :]
        return 0.5 * np.einsum("ijk,ijk->ij", diff, diff)
    if metric == "geodesic_sq_half":
        inner = np.clip(x @ g.T, -1.0, 1.0)
        return 0.5 * np.arccos(inner) ** 2
    raise ValueError(f"unknown metric {metric!r}")


def optimal_transport(sample, grid, metric="euclidean_sq_half"):
    return solve_assignment(cost_matrix(sample, grid, metric))
