import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfzeros import correlations, kernels, moments
from pfzeros import montecarlo as mc
from pfzeros.errors import EigensolveFailure, InsufficientSamples, NearSingularCovariance, TruncationTooCoarse


def test_truncation_degree():
    assert mc.truncation_degree(0.5) == 21
    assert mc.truncation_degree(0.99) == 1570
    for r in (0.05, 0.3, 0.5, 0.9, 0.95, 0.99):
        n = mc.truncation_degree(r)
        assert mc.tail_variance(r, n) < mc.TRUNCATION_EPS
        # smallest n with r^(2n) / (1 - r^2) below eps
        assert mc.tail_variance(r, n - 2) >= mc.TRUNCATION_EPS


def test_check_truncation():
    mc.check_truncation(0.5, 64)
    with pytest.raises(TruncationTooCoarse):
        mc.check_truncation(0.9, 64)
    with pytest.raises(TruncationTooCoarse):
        mc.estimate_count_stats(0.9, degree=64, samples=10)


def test_rng_reproducible_and_independent():
    a = mc.sample_series(10, mc.RngSpec(7, 0)).coeffs
    b = mc.sample_series(10, mc.RngSpec(7, 0)).coeffs
    c = mc.sample_series(10, mc.RngSpec(7, 1)).coeffs
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    with pytest.raises(ValueError):
        mc.sample_series(1, mc.RngSpec())


def test_coefficients_are_standard_normal():
    a0 = mc.sample_coefficients(100_000, 2, mc.RngSpec(3, 0))[:, 0]
    assert abs(a0.mean()) < 3 / math.sqrt(1e5)
    assert abs(a0.var() - 1) < 0.02


def test_series_validation():
    with pytest.raises(ValueError):
        mc.TruncatedSeries([1.0])
    with pytest.raises(ValueError):
        mc.TruncatedSeries([1.0, np.inf])
    p = mc.TruncatedSeries([1.0, 2.0, 3.0])
    assert p.degree == 2
    assert p(2.0) == 17.0
    assert p.derivative(2.0) == 14.0


def test_real_zeros_simple_cases():
    assert mc.real_zeros(mc.TruncatedSeries([0.0, 1.0]), 0.5) == [0.0]
    assert mc.real_zeros(mc.TruncatedSeries([1.0, 0.0, 1e-3]), 0.9) == []
    roots = mc.real_zeros(mc.TruncatedSeries([-0.06, -0.1, 1.0]), 0.9)
    np.testing.assert_allclose(roots, [-0.2, 0.3], atol=1e-14)
    for method in ("companion", "grid"):
        assert mc.real_zeros(mc.TruncatedSeries([1.0, 0.0, 0.0, 0.0]), 0.5, method) == []
    with pytest.raises(ValueError):
        mc.real_zeros(mc.TruncatedSeries([0.0, 1.0]), 1.0)


def test_real_zeros_residual_small():
    for k in range(20):
        p = mc.sample_series(64, mc.RngSpec(11, k))
        scale = np.sum(np.abs(p.coeffs))
        for t in mc.real_zeros(p, 0.95):
            assert abs(p(t)) < 1e-10 * scale


def test_complex_zeros_simple_cases():
    assert mc.complex_zeros(mc.TruncatedSeries([1.0, 0.0, 1.0]), 0.9) == []
    (z,) = mc.complex_zeros(mc.TruncatedSeries([1.0, 0.0, 4.0]), 0.9)
    assert z == pytest.approx(0.5j, abs=1e-14)
    with pytest.raises(ValueError):
        mc.complex_zeros(mc.TruncatedSeries([1.0, 0.0, 1.0]), 1.1)


def test_complex_zeros_conjugate_symmetry():
    for k in range(10):
        p = mc.sample_series(40, mc.RngSpec(5, k))
        all_roots = np.roots(p.coeffs[::-1])
        nonreal = np.sort_complex(all_roots[np.abs(all_roots.imag) >= 1e-8])
        upper = np.array(mc.complex_zeros(p, 0.999999))
        inside = nonreal[np.abs(nonreal) < 0.999999]
        rebuilt = np.sort_complex(np.concatenate([upper, upper.conj()]))
        np.testing.assert_allclose(rebuilt, np.sort_complex(inside), atol=1e-8)


def test_companion_matches_numpy_roots():
    coeffs = mc.sample_coefficients(5, 30, mc.RngSpec(2, 0))
    for row, got in zip(coeffs, mc.companion_roots(coeffs)):
        ref = np.roots(row[::-1])
        np.testing.assert_allclose(np.sort_complex(got), np.sort_complex(ref), atol=1e-8)


def test_companion_rejects_zero_leading():
    with pytest.raises(EigensolveFailure):
        mc.companion_roots(np.array([[1.0, 2.0, 0.0]]))


@pytest.mark.parametrize("degree,radius,n", [(123, 0.8, 1000), (256, 0.9, 200)])
def test_grid_and_companion_counts_agree(degree, radius, n):
    comp = mc.per_sample_values(mc._RealCounts(degree, (radius,), "companion"), n, seed=9)
    grid = mc.per_sample_values(mc._RealCounts(degree, (radius,), "grid"), n, seed=9)
    np.testing.assert_array_equal(comp, grid)


def test_grid_nodes_include_radii():
    t = mc.grid_nodes([0.5, 0.9])
    for r in (0.5, 0.9, -0.5, -0.9):
        assert r in t
    assert np.all(np.diff(t) > 0)


def test_worker_count_does_not_change_output():
    task = mc._RealCounts(20, (0.5,), "companion")
    one = mc.per_sample_values(task, 3500, seed=4, workers=1)
    two = mc.per_sample_values(task, 3500, seed=4, workers=2)
    np.testing.assert_array_equal(one, two)


def test_estimators_reproducible():
    a = mc.estimate_count_stats(0.5, samples=2000, seed=1)
    b = mc.estimate_count_stats(0.5, samples=2000, seed=1)
    assert a == b


def test_batch_mean_and_jackknife():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(10_000)
    m, se = mc.batch_mean(x)
    assert m == x.mean()
    assert se == pytest.approx(1 / 100, rel=0.2)
    jm, jse = mc.jackknife(x, np.mean)
    assert jm == pytest.approx(m) and jse == pytest.approx(se, rel=0.2)
    with pytest.raises(InsufficientSamples):
        mc.batch_mean(np.array([1.0]))
    with pytest.raises(InsufficientSamples):
        mc.per_sample_values(mc._RealCounts(20, (0.5,), "companion"), 0)


def test_report_z_score():
    rep = mc.EstimatorReport("x", 1.2, 0.1, 10, 1.0)
    assert rep.z_score == pytest.approx(2.0)
    assert math.isnan(mc.EstimatorReport("x", 0.0, 0.0, 10, 1.0).z_score)
    assert rep.to_dict()["z_score"] == rep.z_score


def test_cholesky_sampler_covariance():
    t = (0.1, 0.2, 0.3, 0.4)
    chol = moments.covariance_cholesky(t)
    rng = mc.RngSpec(8, 0).generator()
    n = 1_000_000
    x = rng.standard_normal((n, 4)) @ chol.T
    emp = x.T @ x / n
    sigma = kernels.covariance_matrix(t)
    # entrywise sd of the empirical second moment is sqrt(s_ii s_jj + s_ij^2) / sqrt(n)
    sd = np.sqrt(np.outer(np.diag(sigma), np.diag(sigma)) + sigma**2) / math.sqrt(n)
    assert np.all(np.abs(emp - sigma) < 4 * sd)


def test_near_singular_covariance():
    with pytest.raises(NearSingularCovariance):
        moments.covariance_cholesky([0.3, 0.3 + 1e-13, 0.5])


def test_small_rho1_estimate():
    (rep,) = mc.estimate_rho1([(-0.05, 0.05)], degree=64, samples=5000, seed=3)
    assert abs(rep.z_score) < 4
    assert rep.details["bin_average"] == pytest.approx(1 / math.pi, rel=1e-3)


def test_pair_repulsion_near_origin():
    rep = mc.estimate_rho2((-0.0005, 0.0005), (0.0005, 0.0015), degree=20, samples=20_000, seed=2)
    assert rep.estimate < rep.details["uncorrelated"]


def test_rho2_estimate_far_apart():
    rep = mc.estimate_rho2((-0.6, -0.4), (0.3, 0.5), degree=40, samples=20_000, seed=6)
    assert abs(rep.z_score) < 4


def test_bins_validation():
    with pytest.raises(ValueError):
        mc.estimate_rho1([(0.1, 0.3), (0.2, 0.4)], samples=10)
    with pytest.raises(ValueError):
        mc.estimate_rho1([(0.3, 0.1)], samples=10)
    with pytest.raises(ValueError):
        mc.estimate_rho1_complex((0.1, 0.2, 0.3, 1.2), samples=10)


def test_complex_abs2_estimate():
    rep = mc.estimate_complex_abs2_moment([0.3j, 0.5j], samples=20_000, seed=4)
    assert abs(rep.z_score) < 4


def test_gaussian_moment_estimates():
    for pts, kind in [((0.0,), "abs"), ((0.0, 0.6), "sgn"), ((0.1, 0.2, 0.3, 0.4), "product")]:
        rep = mc.estimate_gaussian_moments(pts, kind, samples=50_000, seed=12)
        assert abs(rep.z_score) < 4
    with pytest.raises(ValueError):
        mc.estimate_gaussian_moments((0.0,), "cube", samples=10)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**63 - 1))
def test_count_is_nonnegative_integer(seed):
    vals = mc.per_sample_values(mc._RealCounts(20, (0.5,), "companion"), 50, seed=seed)
    assert np.all(vals >= 0) and np.all(vals == np.round(vals))


def test_count_mean_smoke():
    mean, var = mc.estimate_count_stats(0.5, samples=20_000, seed=7)
    assert abs(mean.z_score) < 4
    assert mean.prediction == correlations.mean_count(0.5)
    assert var.details["method"] == "companion"
