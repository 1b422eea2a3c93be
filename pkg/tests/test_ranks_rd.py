import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from oracles import classical_center_outward_ranks
from otdcov.ranks_rd import (ScoreSpec, apply_score, ball_grid, biloop_radial, build_ball_grid,
                             center_outward, chi2_quantile, direction_set, factorize_n, grid_shape,
                             random_ball_transport, score_embedding, score_ranks, spherical_uniform)


# grids -----------------------------------------------------------------

def test_factorize_examples():
    assert factorize_n(100) == (10, 10, 0)
    assert factorize_n(10) == (3, 3, 1)


def test_factorize_constraint_exhaustive():
    for n in range(4, 10001):
        n_R, n_S, n_0 = factorize_n(n)
        assert n_R * n_S + n_0 == n
        assert 0 <= n_0 < min(n_R, n_S)


def test_factorize_rejects_small_n():
    with pytest.raises(ValueError):
        factorize_n(3)


def test_grid_shape_on_the_line():
    assert grid_shape(7, 1) == (3, 2, 1)
    assert grid_shape(10, 2) == factorize_n(10)


def test_direction_set_planar_equispaced():
    D = direction_set(4, 2)
    np.testing.assert_allclose(D, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-15)


def test_direction_set_line_alternates():
    np.testing.assert_array_equal(direction_set(3, 1).ravel(), [1, -1, 1])


def test_direction_set_seeded_and_uniform():
    a, b = direction_set(50, 3, seed=4), direction_set(50, 3, seed=4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, direction_set(50, 3, seed=5))
    np.testing.assert_allclose(np.linalg.norm(a, axis=1), 1.0)
    big = direction_set(10_000, 3, seed=0)
    assert np.linalg.norm(big.mean(axis=0)) < 0.05


def test_ball_grid_structure():
    g = ball_grid(3, 4, 2, 2)
    assert g.n == 14 and g.dim == 2
    radii = np.linalg.norm(g.points, axis=1)
    np.testing.assert_allclose(np.sort(radii[:12]), np.repeat([0.25, 0.5, 0.75], 4))
    assert np.all(radii[12:] == 0)
    np.testing.assert_array_equal(np.bincount(g.ranks), [2, 4, 4, 4])
    np.testing.assert_allclose(g.signs[:12] * radii[:12, None], g.points[:12], atol=1e-15)


def test_ball_grid_constraint():
    with pytest.raises(ValueError):
        ball_grid(3, 3, 3, 2)


# center-outward transport ----------------------------------------------

def test_center_outward_on_grid_is_identity():
    g = build_ball_grid(20, 2)
    co = center_outward(g.points, g)
    assert co.total_cost == 0.0
    np.testing.assert_array_equal(co.image, g.points)


def test_center_outward_line_is_monotone():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(9)
    co = center_outward(x, build_ball_grid(9, 1))
    order = np.argsort(x)
    assert np.all(np.diff(co.image[order, 0]) >= 0)


def test_center_outward_line_matches_classical_ranks():
    rng = np.random.default_rng(1)
    for n in (4, 5, 10, 11, 30):
        x = rng.standard_t(3, n)
        co = center_outward(x, build_ball_grid(n, 1))
        np.testing.assert_array_equal(co.rank, classical_center_outward_ranks(x.tolist()))


@pytest.mark.parametrize("n,d", [(10, 2), (17, 3), (30, 4)])
def test_rank_multiset(n, d):
    g = build_ball_grid(n, d, seed=3)
    x = np.random.default_rng(n).standard_normal((n, d))
    co = center_outward(x, g)
    counts = np.bincount(co.rank, minlength=g.n_R + 1)
    assert counts[0] == g.n_0
    assert np.all(counts[1:] == g.n_S)


def test_records_consistent_with_images():
    g = build_ball_grid(26, 3, seed=1)
    co = center_outward(np.random.default_rng(2).standard_normal((26, 3)), g)
    for rec in co.records():
        norm = np.linalg.norm(rec.image)
        assert rec.rank == round((g.n_R + 1) * norm)
        if rec.rank:
            np.testing.assert_allclose(rec.sign, rec.image / norm, atol=1e-15)
        else:
            assert np.all(rec.sign == 0)


def test_joint_translation_leaves_records_unchanged():
    g = build_ball_grid(16, 2)
    x = np.random.default_rng(4).standard_normal((16, 2))
    shift = np.array([3.0, -7.0])
    a, b = center_outward(x, g), center_outward(x + shift, g.translated(shift))
    np.testing.assert_array_equal(a.rank, b.rank)
    np.testing.assert_array_equal(a.sign, b.sign)


def test_center_outward_size_mismatch():
    with pytest.raises(ValueError):
        center_outward(np.zeros((5, 2)), build_ball_grid(6, 2))


def test_random_ball_transport():
    x = np.random.default_rng(5).standard_normal((12, 3))
    a, grid, tm = random_ball_transport(x, seed=7, full_output=True)
    np.testing.assert_array_equal(a, random_ball_transport(x, seed=7))
    assert sorted(map(tuple, a)) == sorted(map(tuple, grid))
    assert np.all(np.linalg.norm(grid, axis=1) < 1)
    one = random_ball_transport(np.array([[0.3, 0.1]]), seed=2)
    np.testing.assert_array_equal(one, spherical_uniform(1, 2, seed=2))


# scores ----------------------------------------------------------------

def test_apply_score_origin_copy_is_zero():
    g = build_ball_grid(10, 2)
    co = center_outward(np.random.default_rng(6).standard_normal((10, 2)), g)
    rec = next(r for r in co.records() if r.rank == 0)
    for kind in ("wilcoxon", "vdw", "sign", "biloop"):
        assert np.all(apply_score(rec, ScoreSpec.parse(kind), g.n_R) == 0)


def test_biloop_values():
    np.testing.assert_allclose(biloop_radial(0.0), [0.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(biloop_radial(np.arctanh(0.25)), [1.0, 1.0], atol=1e-12)
    assert np.linalg.norm(biloop_radial(100.0)) < 1e-3


def test_score_norms():
    g = build_ball_grid(25, 3, seed=2)
    co = center_outward(np.random.default_rng(7).standard_normal((25, 3)), g)
    u = co.rank / (g.n_R + 1)
    w = score_ranks(co, "wilcoxon")
    assert np.all(np.linalg.norm(w, axis=1) < 1)
    v = score_ranks(co, "van_der_waerden")
    np.testing.assert_allclose(np.linalg.norm(v, axis=1), np.sqrt(stats.chi2.ppf(u, 3)), rtol=1e-9)
    b = score_ranks(co, ScoreSpec("biloop", "van_der_waerden", c=0.5))
    assert b.shape == (25, 6)
    assert np.all(np.linalg.norm(b, axis=1) <= np.sqrt(4 * 0.25 + 1) + 1e-12)


def test_biloop_embedding_layout():
    signs = np.array([[0.6, 0.8]])
    psi = biloop_radial(0.3)
    np.testing.assert_allclose(score_embedding(np.array([0.3]), signs, "biloop")[0],
                               np.concatenate([psi[0] * signs[0], psi[1] * signs[0]]))


def test_score_parse():
    assert ScoreSpec.parse("gaussian").kind == "van_der_waerden"
    s = ScoreSpec.parse("biloop:sign", c=2.0)
    assert (s.kind, s.base, s.c) == ("biloop", "sign", 2.0)
    assert s.width(3) == 6
    with pytest.raises(ValueError):
        ScoreSpec.parse("spearman")
    with pytest.raises(ValueError):
        ScoreSpec("biloop", "biloop")


# chi-square quantile ----------------------------------------------------

def test_chi2_quantile_examples():
    assert chi2_quantile(0.0, 4) == 0.0
    assert chi2_quantile(1 - np.exp(-1), 2) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(ValueError):
        chi2_quantile(1.0, 2)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-6, 0.999999), st.integers(1, 10))
def test_chi2_quantile_round_trip(p, d):
    q = chi2_quantile(p, d)
    assert stats.chi2.cdf(q, d) == pytest.approx(p, abs=1e-9)
