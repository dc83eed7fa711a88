"""Tests for benchmark objectives."""

import math

import numpy as np
import pytest
from conftest import FAST_FEATURES
from scipy.optimize import minimize

from prb_bayesopt.harness.objectives import (
    OBJECTIVE_NAMES,
    Objective,
    branin_objective,
    hartmann3_objective,
    hartmann6,
    hartmann6_objective,
    make_objective,
    rosenbrock_objective,
)


def test_hartmann6_at_global_maximizer():
    objective = hartmann6_objective()
    assert objective.value(objective.maximizer) == pytest.approx(3.32237, abs=1e-4)
    assert objective.optimum == pytest.approx(3.32237, abs=1e-5)


def test_hartmann6_local_maximum():
    start = np.array([0.40465, 0.88244, 0.84610, 0.57399, 0.13893, 0.03850])
    result = minimize(
        lambda x: -float(hartmann6(x)[0]), start, method="L-BFGS-B", bounds=[(0.0, 1.0)] * 6
    )
    assert -result.fun == pytest.approx(3.2032, abs=0.01)
    assert -result.fun < hartmann6_objective().optimum - 0.1


def test_branin_at_all_three_minimizers():
    objective = branin_objective()
    minimizers = np.array([[-math.pi, 12.275], [math.pi, 2.275], [9.42478, 2.475]])
    unit = (minimizers - np.array([-5.0, 0.0])) / 15.0
    np.testing.assert_allclose(objective.evaluate(unit), -0.397887, atol=1e-5)
    assert objective.optimum == pytest.approx(-0.397887, abs=1e-6)


def test_hartmann3_at_global_maximizer():
    objective = hartmann3_objective()
    assert objective.value(objective.maximizer) == pytest.approx(3.86278, abs=1e-4)


def test_rosenbrock_optimum():
    objective = rosenbrock_objective(4)
    assert objective.optimum == pytest.approx(1.01917, abs=1e-5)
    np.testing.assert_allclose(objective.maximizer, 0.4)
    points = np.random.default_rng(0).uniform(size=(500, 4))
    assert np.all(objective.evaluate(points) <= objective.optimum)


def test_regret_and_epsilon_optimality():
    objective = rosenbrock_objective(2)
    assert objective.regret(objective.maximizer) == pytest.approx(0.0, abs=1e-12)
    assert objective.is_epsilon_optimal(objective.maximizer, 1e-9)
    assert not objective.is_epsilon_optimal(np.zeros(2), 0.1)


def test_gp_draw_is_deterministic():
    a = make_objective("gp", 2, 1e-6, seed=3, num_features=FAST_FEATURES)
    b = make_objective("gp", 2, 1e-6, seed=3, num_features=FAST_FEATURES)
    points = np.random.default_rng(1).uniform(size=(50, 2))
    np.testing.assert_array_equal(a.evaluate(points), b.evaluate(points))
    assert a.optimum == b.optimum
    assert a.hyperparams is not None
    assert a.hyperparams.kernel.lengthscales == pytest.approx((math.sqrt(2.0) / 4.0,) * 2)


def test_gp_draw_optimum_beats_random_points():
    objective = make_objective("gp", 2, 1e-6, seed=5, num_features=FAST_FEATURES)
    points = np.random.default_rng(2).uniform(size=(2000, 2))
    assert objective.optimum >= float(np.max(objective.evaluate(points))) - 1e-9
    assert objective.value(objective.maximizer) == pytest.approx(objective.optimum)


def test_different_seeds_give_different_draws():
    a = make_objective("gp", 1, 0.0, seed=0, num_features=FAST_FEATURES)
    b = make_objective("gp", 1, 0.0, seed=1, num_features=FAST_FEATURES)
    points = np.linspace(0.0, 1.0, 11).reshape(-1, 1)
    assert not np.allclose(a.evaluate(points), b.evaluate(points))


def test_make_objective_defaults():
    objective = make_objective("branin")
    assert objective.dim == 2
    assert "gp" in OBJECTIVE_NAMES


def test_make_objective_rejects_unknown_name_and_wrong_dim():
    with pytest.raises(ValueError, match="unknown objective"):
        make_objective("ackley")
    with pytest.raises(ValueError, match="dim=6"):
        make_objective("hartmann6", dim=3)
    with pytest.raises(ValueError):
        rosenbrock_objective(1)


def test_objective_needs_finite_optimum():
    with pytest.raises(ValueError, match="finite"):
        Objective("broken", 1, lambda xs: np.zeros(len(xs)), math.inf)


def test_noiseless_observation_equals_value():
    objective = hartmann3_objective()
    x = np.array([0.2, 0.5, 0.7])
    assert objective.observe(x, np.random.default_rng(0)) == objective.value(x)


def test_noisy_observations_vary():
    objective = hartmann3_objective(noise_variance=0.01)
    x = np.array([0.2, 0.5, 0.7])
    rng = np.random.default_rng(0)
    observations = [objective.observe(x, rng) for _ in range(200)]
    assert np.std(observations) == pytest.approx(0.1, rel=0.2)
