"""Tests for risk and sample-size schedules."""

import itertools

import pytest

from prb_bayesopt.seqtest.schedule import make_schedule


def test_first_round_risk():
    schedule = make_schedule(0.025, alpha=1.1)
    assert schedule.risk(1) == pytest.approx(0.1 / 1.1 * 0.025)
    assert schedule.risk(1) == pytest.approx(0.0022727, abs=1e-7)


def test_geometric_sizes():
    schedule = make_schedule(0.05, beta=1.5, n0=64)
    assert [schedule.draws(j) for j in range(1, 5)] == [64, 96, 144, 216]


def test_risks_sum_below_budget():
    schedule = make_schedule(0.05)
    assert sum(schedule.risk(j) for j in range(1, 10_001)) <= 0.05


def test_rounds_agree_with_risk_and_draws():
    schedule = make_schedule(0.05, beta=1.3, n0=10)
    for j, risk, size in itertools.islice(schedule.rounds(), 12):
        assert risk == schedule.risk(j)
        assert size == schedule.draws(j)


def test_sizes_strictly_increase():
    schedule = make_schedule(0.05, beta=1.01, n0=10)
    sizes = [size for _, _, size in itertools.islice(schedule.rounds(), 50)]
    assert all(b > a for a, b in itertools.pairwise(sizes))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"delta_est_step": 0.0},
        {"delta_est_step": 0.05, "alpha": 1.0},
        {"delta_est_step": 0.05, "beta": 1.0},
        {"delta_est_step": 0.05, "n0": 0},
        {"delta_est_step": 0.05, "cap": 0},
    ],
)
def test_invalid_parameters(kwargs):
    with pytest.raises(ValueError):
        make_schedule(**kwargs)
