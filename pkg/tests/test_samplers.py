import numpy as np
import pytest
from scipy import stats

from otdcov.geometry import cap_cdf
from otdcov.testkit import generate_scenario, random_rotation, sample_uniform_sphere, sample_vmf

MU = np.array([0.0, 0.0, 1.0])


def test_uniform_sphere_norms_mean_and_seed():
    z = sample_uniform_sphere(10_000, 3, seed=1)
    np.testing.assert_allclose(np.linalg.norm(z, axis=1), 1.0)
    assert np.linalg.norm(z.mean(axis=0)) < 0.05
    np.testing.assert_array_equal(z, sample_uniform_sphere(10_000, 3, seed=1))


@pytest.mark.parametrize("d", [2, 3, 5])
def test_vmf_zero_concentration_is_uniform(d):
    mu = np.eye(d)[0]
    z = sample_vmf(2000, d, mu, 0.0, seed=2)
    np.testing.assert_allclose(np.linalg.norm(z, axis=1), 1.0)
    assert stats.kstest(z @ mu, lambda u: cap_cdf(np.clip(u, -1, 1), d)).pvalue > 0.01


def test_vmf_concentrates_around_mean():
    z = sample_vmf(1000, 3, MU, 50.0, seed=3)
    m = z.mean(axis=0)
    assert (m / np.linalg.norm(m)) @ MU > 0.9
    np.testing.assert_allclose(np.linalg.norm(z, axis=1), 1.0)


def test_vmf_cosine_law_in_three_dimensions():
    # on S^2 the cosine has density proportional to exp(kappa t) on [-1, 1]
    kappa = 4.0
    t = sample_vmf(3000, 3, MU, kappa, seed=4) @ MU
    cdf = lambda u: (np.exp(kappa * (u + 1)) - 1) / (np.exp(2 * kappa) - 1)
    assert stats.kstest(t, cdf).pvalue > 0.01


def test_vmf_errors_and_limits():
    with pytest.raises(ValueError):
        sample_vmf(5, 3, MU, -1.0)
    with pytest.raises(ValueError):
        sample_vmf(5, 4, MU, 1.0)
    np.testing.assert_array_equal(sample_vmf(4, 3, MU, np.inf), np.tile(MU, (4, 1)))


def test_random_rotation():
    R = random_rotation(4, 7)
    np.testing.assert_allclose(R.T @ R, np.eye(4), atol=1e-12)
    assert np.linalg.det(R) == pytest.approx(1.0)
    np.testing.assert_array_equal(R, random_rotation(4, 7))


def test_generate_scenarios():
    rng = np.random.default_rng(0)
    x, y = generate_scenario("independent", 20, "euclidean", 2, 3, rng)
    assert x.shape == (20, 2) and y.shape == (20, 3)
    x, y = generate_scenario("rotation", 20, "sphere", 3, 3, rng)
    np.testing.assert_allclose(y, x @ random_rotation(3, 0).T, atol=1e-12)
    x, y = generate_scenario("copula", 20, "sphere", 3, 2, rng, r=0.9)
    np.testing.assert_allclose(np.linalg.norm(y, axis=1), 1.0)
    with pytest.raises(ValueError):
        generate_scenario("rotation", 20, "sphere", 3, 2, rng)
    with pytest.raises(ValueError):
        generate_scenario("mixture", 20, "sphere", 3, 3, rng)
    with pytest.raises(ValueError):
        generate_scenario("copula", 20, "euclidean", 2, 2, rng, r=1.5)
