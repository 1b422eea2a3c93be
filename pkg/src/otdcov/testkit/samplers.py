"""Random samples for simulation: uniform and von Mises-Fisher directions,
random rotations and the dependence scenarios used in power studies."""
import numpy as np

from .._rng import as_rng
from ..geometry import as_unit

SCENARIOS = ("independent", "rotation", "copula")


def sample_uniform_sphere(n, d, seed=0):
    """``n`` i.i.d. uniform points on S^{d-1}."""
    rng = as_rng(seed, "sample-uniform-sphere")
    g = rng.standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _vmf_cosines(n, d, kappa, rng):
    # Wood (1994) rejection sampler for W = <X, mu>
    if kappa == 0:
        return 1.0 - 2.0 * rng.beta((d - 1) / 2.0, (d - 1) / 2.0, size=n)
    m = d - 1
    b = m / (2.0 * kappa + np.sqrt(4.0 * kappa ** 2 + m ** 2))
    x0 = (1.0 - b) / (1.0 + b)
    c = kappa * x0 + m * np.log(1.0 - x0 ** 2)
    out = np.empty(n)
    filled = 0
    while filled < n:
        k = max(2 * (n - filled), 16)
        z = rng.beta(m / 2.0, m / 2.0, size=k)
        w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z)
        u = rng.uniform(size=k)
        ok = kappa * w + m * np.log(1.0 - x0 * w) - c >= np.log(u)
        take = w[ok][: n - filled]
        out[filled:filled + take.size] = take
        filled += take.size
    return out


def vmf_around(mus, kappa, rng):
    """One von Mises-Fisher draw around each row of ``mus``; ``kappa = inf`` returns ``mus``."""
    mus = as_unit(np.atleast_2d(np.asarray(mus, dtype=float)))
    n, d = mus.shape
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    if np.isinf(kappa):
        return mus.copy()
    w = _vmf_cosines(n, d, float(kappa), rng)
    g = rng.standard_normal((n, d))
    g -= np.sum(g * mus, axis=1, keepdims=True) * mus
    v = g / np.linalg.norm(g, axis=1, keepdims=True)
    x = w[:, None] * mus + np.sqrt(np.clip(1.0 - w ** 2, 0.0, None))[:, None] * v
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def sample_vmf(n, d, mu, kappa, seed=0):
    """``n`` i.i.d. von Mises-Fisher directions with mean ``mu`` and concentration ``kappa``.

    ``kappa = 0`` gives the uniform distribution.
    """
    mu = as_unit(mu)
    if mu.shape != (d,):
        raise ValueError(f"mu must have dimension {d}")
    rng = as_rng(seed, "sample-vmf")
    return vmf_around(np.tile(mu, (n, 1)), kappa, rng)


def random_rotation(d, seed=0):
    """Haar-distributed rotation (determinant +1)."""
    rng = as_rng(seed, "random-rotation")
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def generate_scenario(scenario, n, space, d1, d2, rng, *, kappa=np.inf, r=0.5, rotation=None):
    """Draw one paired sample ``(X, Y)``.

    Scenarios
    ---------
    independent
        Gaussian margins in R^d, uniform margins on spheres.
    rotation
        ``Y = R X`` (plus Gaussian noise of variance ``1/kappa`` in R^d, or a
        von Mises-Fisher perturbation of concentration ``kappa`` on spheres).
        Requires ``d1 == d2``.
    copula
        Gaussian pairs with cross-correlation ``r`` between matching
        coordinates; on spheres each margin is then normalised.
    """
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")
    if scenario == "independent":
        x = rng.standard_normal((n, d1))
        y = rng.standard_normal((n, d2))
    elif scenario == "rotation":
        if d1 != d2:
            raise ValueError("rotation scenario needs d1 == d2")
        R = random_rotation(d1, 0) if rotation is None else np.asarray(rotation, dtype=float)
        x = rng.standard_normal((n, d1))
        if space == "sphere":
            x = x / np.linalg.norm(x, axis=1, keepdims=True)
            return x, vmf_around(x @ R.T, kappa, rng)
        y = x @ R.T
        if np.isfinite(kappa):
            y = y + rng.standard_normal((n, d2)) / np.sqrt(kappa)
        return x, y
    else:
        if not -1.0 <= r <= 1.0:
            raise ValueError("copula correlation must lie in [-1, 1]")
        x = rng.standard_normal((n, d1))
        y = rng.standard_normal((n, d2))
        k = min(d1, d2)
        y[:, :k] = r * x[:, :k] + np.sqrt(1.0 - r * r) * y[:, :k]
    if space == "sphere":
        x = x / np.linalg.norm(x, axis=1, keepdims=True)
        y = y / np.linalg.norm(y, axis=1, keepdims=True)
    return x, y
