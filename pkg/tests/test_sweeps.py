"""Tests for interval coverage and threshold-test sweeps."""

import csv

import numpy as np
import pytest
from scipy.stats import binom

from prb_bayesopt.harness.sweeps import (
    CoverageRow,
    coverage_sweep,
    draws_sweep,
    empirical_coverage,
    simulate_decisions,
    write_rows_csv,
)
from prb_bayesopt.models import IntervalMethod
from prb_bayesopt.seqtest.intervals import bernoulli_interval


@pytest.mark.parametrize("p", [0.05, 0.5, 0.9])
def test_clopper_pearson_meets_nominal_coverage(p):
    n, delta = 100, 0.1
    method = IntervalMethod.CLOPPER_PEARSON
    intervals = [bernoulli_interval(method, k, n, delta) for k in range(n + 1)]
    contains = np.array([interval.contains(p) for interval in intervals])
    exact = float(binom.pmf(np.arange(n + 1), n, p) @ contains)
    assert exact >= 1.0 - delta
    simulated = empirical_coverage(IntervalMethod.CLOPPER_PEARSON, p, n, delta, 4000, seed=0)
    assert simulated == pytest.approx(exact, abs=0.02)


def test_coverage_sweep_grid():
    rows = coverage_sweep([0.2, 0.8], [10, 50], 0.1, 200, seed=1)
    assert len(rows) == len(IntervalMethod) * 4
    assert {row.method for row in rows} == {m.value for m in IntervalMethod}
    assert all(0.0 <= row.coverage <= 1.0 for row in rows)


def test_simulate_decisions_far_from_level():
    above = simulate_decisions(0.999, 0.95, 0.05, reps=30, seed=2)
    assert above.wrong_rate == 0.0
    assert above.guaranteed_rate == 1.0
    below = simulate_decisions(0.5, 0.95, 0.05, reps=30, seed=3)
    assert below.wrong_rate == 0.0
    assert below.median_draws <= above.median_draws


def test_simulate_decisions_is_seeded():
    a = simulate_decisions(0.97, 0.95, 0.05, reps=10, seed=4, cap=500)
    b = simulate_decisions(0.97, 0.95, 0.05, reps=10, seed=4, cap=500)
    assert a == b


def test_draws_sweep_grid():
    rows = draws_sweep([0.5, 0.999], 0.95, [0.05, 0.1], reps=5, seed=5)
    assert [(row.delta_est, row.p) for row in rows] == [
        (0.05, 0.5),
        (0.05, 0.999),
        (0.1, 0.5),
        (0.1, 0.999),
    ]


def test_write_rows_csv(tmp_path):
    rows = [CoverageRow("cp", 0.5, 10, 0.1, 100, 0.95)]
    path = write_rows_csv(rows, tmp_path / "out" / "coverage.csv")
    with open(path, newline="") as f:
        records = list(csv.DictReader(f))
    assert records == [
        {"method": "cp", "p": "0.5", "n": "10", "delta": "0.1", "sims": "100", "coverage": "0.95"}
    ]
    with pytest.raises(ValueError):
        write_rows_csv([], tmp_path / "empty.csv")
