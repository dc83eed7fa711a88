"""Tests for PRB risk parameters and checkpoint schedules."""

import pytest

from prb_bayesopt.stopping.params import PRBParams, StepSchedule


def test_default_split_is_even():
    params = PRBParams(epsilon=0.1, delta=0.05, budget=64)
    assert params.delta_mod == pytest.approx(0.025)
    assert params.delta_est == pytest.approx(0.025)
    assert params.level == pytest.approx(0.975)


def test_constant_schedule_checks_until_budget():
    params = PRBParams(epsilon=0.1, delta=0.05, budget=20, initial_design=5)
    assert params.checkpoints(20) == list(range(5, 20))
    assert params.delta_est_at(5) == pytest.approx(0.025 / 15)
    assert params.delta_est_at(4) is None
    assert params.delta_est_at(20) is None


def test_constant_schedule_spends_at_most_delta_est():
    params = PRBParams(epsilon=0.1, delta=0.05, budget=64)
    assert sum(params.delta_est_at(t) for t in params.checkpoints(64)) <= 0.025 + 1e-15


def test_check_every_thins_checkpoints():
    params = PRBParams(epsilon=0.1, delta=0.05, budget=20, initial_design=5, check_every=5)
    assert params.checkpoints(20) == [5, 10, 15]


def test_check_every_rejected_for_geometric_schedule():
    with pytest.raises(ValueError, match="constant schedule only"):
        PRBParams(epsilon=0.1, delta=0.05, step_schedule=StepSchedule.GEOMETRIC, check_every=5)
    params = PRBParams(epsilon=0.1, delta=0.05, step_schedule=StepSchedule.GEOMETRIC)
    assert params.check_every == 1


def test_geometric_checkpoints():
    params = PRBParams(
        epsilon=0.1, delta=0.05, step_schedule=StepSchedule.GEOMETRIC, initial_design=5
    )
    assert params.checkpoints(40) == [5, 8, 12, 17, 26, 38]
    risk = params.delta_est_at(8)
    assert risk == pytest.approx(8 ** (-1.1) * (0.1 / 1.1) * 0.025)
    assert params.delta_est_at(9) is None


def test_geometric_schedule_spends_at_most_delta_est():
    params = PRBParams(epsilon=0.1, delta=0.05, step_schedule=StepSchedule.GEOMETRIC)
    assert sum(params.delta_est_at(t) for t in params.checkpoints(100_000)) <= 0.025


def test_uneven_split():
    params = PRBParams(epsilon=0.1, delta=0.05, delta_mod=0.04, delta_est=0.01, budget=10)
    assert params.level == pytest.approx(0.96)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"epsilon": 0.0, "delta": 0.05, "budget": 10},
        {"epsilon": 0.1, "delta": 1.0, "budget": 10},
        {"epsilon": 0.1, "delta": 0.05, "delta_mod": 0.04, "delta_est": 0.02, "budget": 10},
        {"epsilon": 0.1, "delta": 0.05},
        {"epsilon": 0.1, "delta": 0.05, "budget": 5, "initial_design": 5},
        {"epsilon": 0.1, "delta": 0.05, "budget": 10, "check_every": 0},
    ],
)
def test_invalid_parameters(kwargs):
    with pytest.raises(ValueError):
        PRBParams(**kwargs)
