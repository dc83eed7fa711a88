"""Tests for multistart maximization of scalar fields."""

import numpy as np
import pytest

from prb_bayesopt.errors import NonFiniteValueError
from prb_bayesopt.model.pathwise import build_feature_map, draw_path
from prb_bayesopt.regret import path_field
from prb_bayesopt.sample_opt import (
    OptimizerConfig,
    ScalarField,
    exceeds_gap,
    maximize,
    sobol_points,
)

CENTER = np.array([0.3, 0.3])


def quadratic(with_gradient: bool = True) -> ScalarField:
    def values(xs):
        return -np.sum((np.atleast_2d(xs) - CENTER) ** 2, axis=1)

    def gradient(x):
        return -2.0 * (np.asarray(x) - CENTER)

    return ScalarField(values, 2, gradient if with_gradient else None)


def test_concave_quadratic():
    result = maximize(quadratic(), OptimizerConfig(), seed=0)
    np.testing.assert_allclose(result.argmax, CENTER, atol=1e-4)
    assert result.maximum == pytest.approx(0.0, abs=1e-8)


def test_concave_quadratic_without_gradient():
    result = maximize(quadratic(with_gradient=False), OptimizerConfig(), seed=0)
    np.testing.assert_allclose(result.argmax, CENTER, atol=1e-3)


def test_constant_field():
    field = ScalarField(lambda xs: np.full(np.atleast_2d(xs).shape[0], 2.5), 3)
    assert maximize(field, OptimizerConfig(random_search_points=64), seed=1).maximum == 2.5


def test_result_never_below_best_sample():
    cfg = OptimizerConfig(random_search_points=128, num_starts=1)
    fn = quadratic()
    points = sobol_points(128, 2, 5)
    result = maximize(fn, cfg, seed=5)
    assert result.maximum >= np.max(fn.values(points))
    assert result.evaluations >= 128


def test_same_seed_same_result():
    fn = quadratic(with_gradient=False)
    cfg = OptimizerConfig(random_search_points=64, num_starts=2)
    a, b = maximize(fn, cfg, seed=3), maximize(fn, cfg, seed=3)
    np.testing.assert_array_equal(a.argmax, b.argmax)
    assert a.evaluations == b.evaluations


def test_non_finite_values_raise():
    field = ScalarField(lambda xs: np.full(np.atleast_2d(xs).shape[0], np.nan), 1)
    with pytest.raises(NonFiniteValueError):
        maximize(field, OptimizerConfig(random_search_points=16), seed=0)


def test_invalid_config():
    with pytest.raises(ValueError):
        OptimizerConfig(num_starts=0)


def test_sobol_points_in_cube():
    points = sobol_points(100, 3, seed=0)
    assert points.shape == (100, 3)
    assert np.all((points >= 0.0) & (points <= 1.0))


def test_sample_path_matches_dense_grid(posterior):
    fmap = build_feature_map(posterior.kernel, 1024, seed=0)
    sample = draw_path(posterior, fmap, seed=7)
    grid = np.linspace(0.0, 1.0, 10_001).reshape(-1, 1)
    result = maximize(path_field(sample), OptimizerConfig(), seed=8)
    assert result.maximum == pytest.approx(float(np.max(sample(grid))), abs=1e-3)


def test_gap_larger_than_range_is_not_exceeded():
    fn = quadratic()
    assert not exceeds_gap(fn, np.array([0.9, 0.9]), 10.0, OptimizerConfig(), seed=0)


def test_gap_at_argmax_is_not_exceeded():
    assert not exceeds_gap(quadratic(), CENTER, 1e-6, OptimizerConfig(), seed=0)


def test_gap_found_early_with_witness():
    fn = quadratic()
    x0 = np.array([0.9, 0.9])
    cfg = OptimizerConfig()
    gap = exceeds_gap(fn, x0, 0.1, cfg, seed=0)
    assert gap.exceeded
    assert gap.witness_value > gap.baseline + 0.1
    assert fn.value(gap.witness) == pytest.approx(gap.witness_value)
    assert gap.evaluations < maximize(fn, cfg, seed=0).evaluations


def test_gap_search_on_sample_paths_is_cheaper(posterior):
    fmap = build_feature_map(posterior.kernel, 512, seed=1)
    cfg = OptimizerConfig(random_search_points=512, num_starts=2)
    grid = np.linspace(0.0, 1.0, 2001).reshape(-1, 1)
    tested = cheaper = 0
    for seed in range(20):
        field = path_field(draw_path(posterior, fmap, seed=seed))
        values = field.values(grid)
        x0 = grid[int(np.argmin(values))]
        if np.max(values) - np.min(values) <= 0.4:
            continue
        gap = exceeds_gap(field, x0, 0.1, cfg, seed=seed)
        assert gap.exceeded
        tested += 1
        cheaper += gap.evaluations < maximize(field, cfg, seed=seed).evaluations
    assert tested > 0
    assert cheaper == tested
