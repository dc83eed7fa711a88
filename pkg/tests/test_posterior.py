"""Tests for the exact GP posterior."""

import numpy as np
import pytest
from conftest import make_dataset, make_hyperparams, make_posterior

from prb_bayesopt.errors import IllConditionedError
from prb_bayesopt.model.kernel import kernel_matrix
from prb_bayesopt.model.posterior import (
    PosteriorGP,
    cholesky_with_jitter,
    is_degenerate,
    posterior_cov,
    posterior_moments,
)
from prb_bayesopt.models import Dataset


def test_prior_moments():
    hyper = make_hyperparams(mean=0.7, variance=2.0)
    gp = PosteriorGP.prior(hyper)
    assert gp.t == 0
    assert posterior_moments(gp, [0.4]) == pytest.approx((0.7, 2.0))


def test_noiseless_interpolation():
    data = make_dataset(6)
    gp = PosteriorGP.from_data(make_hyperparams(noise=0.0), data)
    mean, var = gp.moments(data.points)
    np.testing.assert_allclose(mean, data.observations, atol=1e-6)
    assert np.all(var < 1e-6)


def test_matches_dense_solve():
    rng = np.random.default_rng(5)
    points = rng.uniform(size=(3, 1))
    data = Dataset(points, rng.normal(size=3))
    hyper = make_hyperparams(lengthscale=0.3, noise=0.05, mean=0.2)
    gp = PosteriorGP.from_data(hyper, data)

    xs = rng.uniform(size=(7, 1))
    K = kernel_matrix(hyper.kernel, points, points) + 0.05 * np.eye(3)
    cross = kernel_matrix(hyper.kernel, xs, points)
    expected_mean = 0.2 + cross @ np.linalg.solve(K, data.observations - 0.2)
    expected_cov = kernel_matrix(hyper.kernel, xs, xs) - cross @ np.linalg.solve(K, cross.T)

    mean, var = gp.moments(xs)
    np.testing.assert_allclose(mean, expected_mean, atol=1e-10)
    np.testing.assert_allclose(var, np.diag(expected_cov), atol=1e-10)
    np.testing.assert_allclose(gp.cross_cov(xs, xs), expected_cov, atol=1e-10)


def test_posterior_cov_single_point_is_variance(posterior):
    cov = posterior_cov(posterior, np.array([[0.33]]))
    assert cov.shape == (1, 1)
    assert cov[0, 0] == pytest.approx(posterior_moments(posterior, [0.33])[1], abs=1e-12)


def test_posterior_cov_prior_is_kernel_matrix():
    hyper = make_hyperparams(lengthscale=0.4)
    xs = np.array([[0.1], [0.5], [0.8]])
    np.testing.assert_allclose(
        posterior_cov(PosteriorGP.prior(hyper), xs), kernel_matrix(hyper.kernel, xs, xs)
    )


def test_posterior_cov_duplicated_rows(posterior):
    xs = np.array([[0.2], [0.6], [0.2]])
    cov = posterior_cov(posterior, xs)
    np.testing.assert_allclose(cov[0], cov[2])
    np.testing.assert_allclose(cov[:, 0], cov[:, 2])
    np.testing.assert_allclose(cov, cov.T)


def test_posterior_cov_needs_points(posterior):
    with pytest.raises(ValueError):
        posterior_cov(posterior, np.empty((0, 1)))


def test_gradients_match_finite_differences():
    gp = make_posterior(n=6, dim=2, noise=1e-3, lengthscale=0.3)
    h = 1e-6
    for x in np.random.default_rng(2).uniform(0.1, 0.9, size=(5, 2)):
        mean_grad, var_grad = gp.mean_grad(x), gp.variance_grad(x)
        for d in range(2):
            step = np.zeros(2)
            step[d] = h
            up, down = gp.moments(x + step), gp.moments(x - step)
            assert mean_grad[d] == pytest.approx((up[0][0] - down[0][0]) / (2 * h), abs=1e-5)
            assert var_grad[d] == pytest.approx((up[1][0] - down[1][0]) / (2 * h), abs=1e-5)


def test_conditioning_never_increases_variance(posterior):
    xs = np.linspace(0.0, 1.0, 41).reshape(-1, 1)
    updated = posterior.condition_on(np.array([0.5]), 0.1)
    assert updated.t == posterior.t + 1
    assert np.all(updated.variance(xs) <= posterior.variance(xs) + 1e-12)


def test_dimension_mismatch_raises():
    with pytest.raises(ValueError, match="dimension"):
        PosteriorGP.from_data(make_hyperparams(dim=2), make_dataset(4, dim=1))


def test_duplicate_noiseless_points_need_jitter():
    data = Dataset(np.array([[0.3], [0.3], [0.7]]), np.array([1.0, 1.0, 0.0]))
    gp = PosteriorGP.from_data(make_hyperparams(noise=0.0), data)
    assert gp.jitter > 0.0
    assert np.isfinite(gp.mean(np.array([[0.5]])))[0]


def test_cholesky_rejects_indefinite_matrix():
    with pytest.raises(IllConditionedError):
        cholesky_with_jitter(np.array([[-1.0]]))
    with pytest.raises(IllConditionedError, match="non-finite"):
        cholesky_with_jitter(np.array([[1.0, np.nan], [np.nan, 1.0]]))


def test_is_degenerate():
    assert is_degenerate(0.0)
    assert is_degenerate(1e-13)
    assert not is_degenerate(1e-6)
