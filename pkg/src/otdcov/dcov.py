"""Empirical (V-statistic) distance covariance and correlation."""
import numpy as np
from scipy.spatial.distance import pdist, squareform

#: Largest sample size accepted, bounding the O(n^2) memory footprint.
MAX_N = 20_000


def pairwise_distances(sample, metric="euclidean"):
    """Matrix of pairwise distances between the rows of ``sample``.

    Parameters
    ----------
    sample : array_like, shape (n, d) or (n,)
        One-dimensional input is read as ``n`` scalar observations.
    metric : {"euclidean", "geodesic"}
        ``"geodesic"`` expects unit vectors and returns great-circle distances.

    Returns
    -------
    ndarray, shape (n, n)
        Exactly symmetric with a zero diagonal.
    """
    x = np.asarray(sample, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError("sample must be a list of points of equal dimension")
    n = x.shape[0]
    if n < 1:
        raise ValueError("sample must contain at least one point")
    if n > MAX_N:
        raise ValueError(f"n = {n} exceeds the configured maximum {MAX_N}")
    if metric == "euclidean":
        if n == 1:
            return np.zeros((1, 1))
        return squareform(pdist(x, "euclidean"))
    if metric == "geodesic":
        norms = np.linalg.norm(x, axis=1)
        if not np.allclose(norms, 1.0, atol=1e-9):
            raise ValueError("geodesic metric requires unit vectors")
        g = x @ x.T
        g = 0.5 * (g + g.T)
        out = np.arccos(np.clip(g, -1.0, 1.0))
        np.fill_diagonal(out, 0.0)
        return out
    raise ValueError(f"unknown metric {metric!r}")


def double_center(D):
    """Double-centre a distance matrix: ``D_ij - mean_i - mean_j + grand mean``."""
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {D.shape}")
    m = D.mean(axis=1)
    # m_i + m_j is commutative in floating point, so the result stays symmetric
    return D - (m[:, None] + m[None, :]) + m.mean()


def _check_pair(A, B):
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"size mismatch: {A.shape} vs {B.shape}")
    return A, B


def dcov_sq(A, B):
    """Squared distance covariance ``(1/n^2) sum_ij A_ij B_ij`` of two double-centred matrices."""
    A, B = _check_pair(A, B)
    n = A.shape[0]
    val = float(np.sum(A * B)) / (n * n)
    return max(val, 0.0)


def dcor_sq(A, B):
    """Squared distance correlation; 0 when either margin is degenerate."""
    A, B = _check_pair(A, B)
    denom = dcov_sq(A, A) * dcov_sq(B, B)
    if denom <= 0.0:
        return 0.0
    return min(dcov_sq(A, B) / np.sqrt(denom), 1.0)


def distance_covariance_sq(x, y, metric_x="euclidean", metric_y="euclidean"):
    """Convenience wrapper: ``dcov_sq`` straight from two samples."""
    A = double_center(pairwise_distances(x, metric_x))
    B = double_center(pairwise_distances(y, metric_y))
    return dcov_sq(A, B)


def distance_correlation_sq(x, y, metric_x="euclidean", metric_y="euclidean"):
    A = double_center(pairwise_distances(x, metric_x))
    B = double_center(pairwise_distances(y, metric_y))
    return dcor_sq(A, B)
