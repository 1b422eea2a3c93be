import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from otdcov.exceptions import DomainError
from otdcov.geometry import (cap_cdf, cap_quantile, exp_map, frechet_mean, geodesic_distance,
                             log_map, rotation_to, tangent_basis, transport_cost)
from otdcov.testkit.samplers import random_rotation

E1, E2, E3 = np.eye(3)


def unit_vectors(rng, n, d):
    g = rng.standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


@st.composite
def unit_vector(draw, d=3):
    v = np.array(draw(st.lists(st.floats(-1, 1), min_size=d, max_size=d)))
    if np.linalg.norm(v) < 1e-3:
        v = np.eye(d)[0]
    return v / np.linalg.norm(v)


# distances -------------------------------------------------------------

def test_geodesic_distance_special_cases():
    z = np.array([0.6, 0.0, 0.8])
    assert geodesic_distance(z, z) == 0.0
    assert geodesic_distance(z, -z) == pytest.approx(np.pi, abs=1e-12)
    assert geodesic_distance(E1, E2) == pytest.approx(np.pi / 2, abs=1e-15)


def test_geodesic_distance_clamps_rounding():
    z = np.array([1.0, 1e-17, 0.0]) * (1 + 1e-15)
    assert np.isfinite(geodesic_distance(z, z))


def test_geodesic_distance_dimension_mismatch():
    with pytest.raises(ValueError):
        geodesic_distance(E1, np.array([1.0, 0.0]))


def test_transport_cost_values():
    z = E3
    assert transport_cost(z, z) == 0.0
    assert transport_cost(z, -z) == pytest.approx(np.pi ** 2 / 2, rel=1e-12)
    assert transport_cost(E1, E2) == pytest.approx(np.pi ** 2 / 8, rel=1e-12)


def test_geodesic_is_metric_on_random_triples():
    rng = np.random.default_rng(11)
    a, b, c = (unit_vectors(rng, 500, 4) for _ in range(3))
    assert np.array_equal(geodesic_distance(a, b), geodesic_distance(b, a))
    assert np.all(geodesic_distance(a, c) <= geodesic_distance(a, b) + geodesic_distance(b, c) + 1e-10)


# log / exp -------------------------------------------------------------

def test_log_map_of_base_is_zero():
    assert np.array_equal(log_map(E3, E3), np.zeros(3))


def test_log_map_quarter_turn():
    v = log_map(E3, E1)
    np.testing.assert_allclose(v, np.pi / 2 * E1, atol=1e-15)
    np.testing.assert_allclose(exp_map(E3, np.pi / 2 * E1), E1, atol=1e-15)


def test_exp_map_examples():
    np.testing.assert_array_equal(exp_map(E3, np.zeros(3)), E3)
    np.testing.assert_allclose(exp_map(E3, np.pi / 4 * E1), [np.sqrt(2) / 2, 0, np.sqrt(2) / 2],
                               atol=1e-15)


def test_log_map_antipode_raises():
    with pytest.raises(DomainError):
        log_map(E3, -E3)


def test_exp_map_rejects_long_vectors():
    with pytest.raises(DomainError):
        exp_map(E3, np.pi * E1)


def test_exp_map_rejects_non_tangent():
    with pytest.raises(ValueError):
        exp_map(E3, 0.1 * E3)


def test_log_exp_round_trip_random_pairs():
    rng = np.random.default_rng(3)
    base = unit_vectors(rng, 100, 3)
    z = unit_vectors(rng, 100, 3)
    for b, x in zip(base, z):
        v = log_map(b, x)
        assert np.linalg.norm(v) == pytest.approx(geodesic_distance(b, x), abs=1e-12)
        np.testing.assert_allclose(exp_map(b, v), x, atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(unit_vector(4), unit_vector(4))
def test_exp_log_inverse_property(b, z):
    if geodesic_distance(b, z) >= np.pi - 1e-6:
        return
    np.testing.assert_allclose(exp_map(b, log_map(b, z)), z, atol=1e-9)


# Fréchet mean ----------------------------------------------------------

def test_frechet_mean_single_and_repeated_point():
    p = np.array([0.0, 0.6, 0.8])
    np.testing.assert_allclose(frechet_mean(p[None, :]), p, atol=1e-15)
    np.testing.assert_allclose(frechet_mean(np.tile(p, (3, 1))), p, atol=1e-15)


def test_frechet_mean_symmetric_pair_against_grid_search():
    alpha = 0.7
    pts = np.array([[np.sin(alpha), 0, np.cos(alpha)], [-np.sin(alpha), 0, np.cos(alpha)]])
    mu = frechet_mean(pts)
    # grid-search oracle over a mesh of the upper hemisphere
    th, ph = np.meshgrid(np.linspace(0, np.pi / 2, 301), np.linspace(0, 2 * np.pi, 601))
    cand = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], -1).reshape(-1, 3)
    obj = sum(0.5 * geodesic_distance(cand, p) ** 2 for p in pts)
    best = cand[np.argmin(obj)]
    np.testing.assert_allclose(mu, E3, atol=1e-12)
    assert geodesic_distance(mu, best) < 0.01


def test_frechet_mean_weights_and_metadata():
    rng = np.random.default_rng(5)
    pts = unit_vectors(rng, 20, 3) + 3 * E3
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    mu, info = frechet_mean(pts, np.ones(20), full_output=True)
    assert info["converged"] and info["step_norm"] < 1e-10
    # stationarity: the mean of the logarithms vanishes
    assert np.linalg.norm(log_map(mu, pts).mean(axis=0)) < 1e-9


def test_frechet_mean_errors():
    with pytest.raises(ValueError):
        frechet_mean(np.empty((0, 3)))
    with pytest.raises(ValueError):
        frechet_mean(np.eye(3), weights=[1.0, -1.0, 1.0])
    with pytest.raises(ValueError):
        frechet_mean(np.eye(3), weights=[0.0, 0.0, 0.0])


def test_frechet_mean_nonconvergence_reports_best_iterate():
    rng = np.random.default_rng(9)
    pts = unit_vectors(rng, 30, 3)
    mu, info = frechet_mean(pts, max_iter=1, tol=0.0, full_output=True)
    assert not info["converged"]
    assert np.linalg.norm(mu) == pytest.approx(1.0)


def test_frechet_mean_rotation_equivariant():
    rng = np.random.default_rng(21)
    for k in range(10):
        pts = unit_vectors(rng, 25, 3) + 2.0 * unit_vectors(rng, 1, 3)
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        R = random_rotation(3, k)
        np.testing.assert_allclose(frechet_mean(pts @ R.T), R @ frechet_mean(pts), atol=1e-6)


# cap law ---------------------------------------------------------------

@pytest.mark.parametrize("d", [2, 3, 4, 5, 7])
def test_cap_cdf_endpoints(d):
    assert cap_cdf(-1.0, d) == 0.0
    assert cap_cdf(1.0, d) == pytest.approx(1.0, abs=1e-14)


def test_cap_cdf_closed_forms():
    u = np.linspace(-1, 1, 41)
    np.testing.assert_allclose(cap_cdf(u, 3), (u + 1) / 2, atol=1e-15)
    assert cap_cdf(0.0, 2) == 0.5


@pytest.mark.parametrize("d", [4, 5, 6])
def test_cap_cdf_quadrature_matches_fixed_order_gauss(d):
    # independent route: Gauss-Jacobi style substitution s = sin(t)
    def oracle(u):
        f = lambda t: np.cos(t) ** (d - 2)
        return integrate.fixed_quad(f, -np.pi / 2, np.arcsin(u), n=80)[0] / \
            integrate.fixed_quad(f, -np.pi / 2, np.pi / 2, n=80)[0]
    for u in (-0.9, -0.3, 0.0, 0.4, 0.95):
        assert cap_cdf(u, d) == pytest.approx(oracle(u), abs=1e-11)


@pytest.mark.parametrize("d", [2, 3, 4, 6])
def test_cap_cdf_symmetry_and_monotonicity(d):
    u = np.linspace(-0.99, 0.99, 25)
    f = cap_cdf(u, d)
    np.testing.assert_allclose(f + cap_cdf(-u, d), 1.0, atol=1e-10)
    assert np.all(np.diff(f) > 0)


def test_cap_cdf_range_check():
    with pytest.raises(ValueError):
        cap_cdf(1.5, 3)
    with pytest.raises(ValueError):
        cap_cdf(0.0, 1)


def test_cap_quantile_examples():
    for d in (2, 3, 5):
        assert cap_quantile(0.0, d) == -1.0
        assert cap_quantile(1.0, d) == 1.0
    assert cap_quantile(0.5, 3) == 0.0
    assert cap_quantile(0.25, 2) == pytest.approx(-np.sqrt(2) / 2, abs=1e-15)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_cap_quantile_round_trip(d):
    p = np.random.default_rng(d).uniform(0.001, 0.999, 20)
    np.testing.assert_allclose(cap_cdf(cap_quantile(p, d), d), p, atol=1e-9)


# rotations -------------------------------------------------------------

def test_rotation_to_identity_and_quarter_turn():
    z = np.array([0.0, 0.6, 0.8])
    np.testing.assert_array_equal(rotation_to(z, z), np.eye(3))
    R = rotation_to(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    np.testing.assert_allclose(R, [[0, -1], [1, 0]], atol=1e-15)


def test_rotation_to_properties():
    rng = np.random.default_rng(2)
    for _ in range(20):
        a, b = unit_vectors(rng, 2, 5)
        R = rotation_to(a, b)
        np.testing.assert_allclose(R @ a, b, atol=1e-10)
        np.testing.assert_allclose(R.T @ R, np.eye(5), atol=1e-12)
        assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-12)
        v = rng.standard_normal((100, 5))
        np.testing.assert_allclose(np.linalg.norm(v @ R.T, axis=1), np.linalg.norm(v, axis=1),
                                   rtol=1e-12)
        # identity on the complement of span{a, b}
        w = rng.standard_normal(5)
        q, _ = np.linalg.qr(np.column_stack([a, b]))
        w -= q @ (q.T @ w)
        np.testing.assert_allclose(R @ w, w, atol=1e-12)


def test_rotation_to_antipodal_raises():
    with pytest.raises(DomainError):
        rotation_to(E1, -E1)


def test_tangent_basis_orthonormal_and_orthogonal():
    rng = np.random.default_rng(8)
    for p in unit_vectors(rng, 10, 4):
        B = tangent_basis(p)
        np.testing.assert_allclose(B @ B.T, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(B @ p, 0.0, atol=1e-12)
