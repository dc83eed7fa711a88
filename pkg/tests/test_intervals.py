"""Tests for Bernoulli and bounded-mean confidence intervals."""

import math

import numpy as np
import pytest
from scipy.special import betainc

from prb_bayesopt.models import IntervalMethod
from prb_bayesopt.seqtest.intervals import (
    bernoulli_interval,
    bernstein_half_width,
    beta_quantile,
    clopper_pearson,
    empirical_bernstein,
    jeffreys_interval,
)


def bisect_beta_quantile(q: float, a: float, b: float) -> float:
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if betainc(a, b, mid) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_cp_zero_successes():
    interval = clopper_pearson(0, 20, 0.05)
    assert interval.lo == 0.0
    assert interval.hi == pytest.approx(1.0 - 0.025 ** (1 / 20), abs=1e-9)
    assert interval.hi == pytest.approx(0.1684, abs=1e-4)


def test_cp_all_successes():
    interval = clopper_pearson(20, 20, 0.05)
    assert interval.hi == 1.0
    assert interval.lo == pytest.approx(0.025 ** (1 / 20), abs=1e-9)


def test_cp_half():
    interval = clopper_pearson(5, 10, 0.05)
    assert interval.lo == pytest.approx(0.187, abs=1e-3)
    assert interval.hi == pytest.approx(0.813, abs=1e-3)
    assert interval.lo == pytest.approx(bisect_beta_quantile(0.025, 5, 6), abs=1e-9)
    assert interval.hi == pytest.approx(bisect_beta_quantile(0.975, 6, 5), abs=1e-9)


def test_jeffreys_symmetric_at_half():
    interval = jeffreys_interval(50, 100, 0.05)
    assert interval.lo + interval.hi == pytest.approx(1.0, abs=1e-9)


def test_jeffreys_single_draw():
    interval = jeffreys_interval(0, 1, 0.5)
    assert interval.lo == pytest.approx(bisect_beta_quantile(0.25, 0.5, 1.5), abs=1e-9)
    assert interval.hi == pytest.approx(bisect_beta_quantile(0.75, 0.5, 1.5), abs=1e-9)


def test_jeffreys_inside_clopper_pearson():
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(1, 500))
        k = int(rng.integers(0, n + 1))
        delta = float(rng.uniform(0.001, 0.5))
        cp, jeff = clopper_pearson(k, n, delta), jeffreys_interval(k, n, delta)
        assert cp.lo <= jeff.lo + 1e-12
        assert jeff.hi <= cp.hi + 1e-12


def test_beta_quantile_inverts_incomplete_beta():
    for q, a, b in [(0.001, 64, 1), (0.3, 2.5, 7.0), (0.999, 0.5, 300.5)]:
        assert betainc(a, b, beta_quantile(q, a, b)) == pytest.approx(q, abs=1e-10)
    assert beta_quantile(0.0, 2, 3) == 0.0
    assert beta_quantile(1.0, 2, 3) == 1.0


def test_bernstein_constant_values():
    n, delta = 100, 0.05
    expected = 3 * math.log(3 / delta) / n
    assert bernstein_half_width(0.0, n, delta) == pytest.approx(expected)
    assert expected == pytest.approx(0.12283, abs=1e-5)
    interval = empirical_bernstein(np.full(n, 0.5), delta)
    assert interval.lo == pytest.approx(0.5 - expected)
    assert interval.hi == pytest.approx(0.5 + expected)


def test_bernstein_clips_to_range():
    interval = empirical_bernstein(np.ones(10), 0.05)
    assert interval.hi == 1.0
    with pytest.raises(ValueError):
        empirical_bernstein(np.array([0.5, 1.5]), 0.05)


def test_bernstein_coverage():
    n, p, delta = 200, 0.3, 0.05
    intervals = [
        empirical_bernstein(np.r_[np.ones(k), np.zeros(n - k)], delta) for k in range(n + 1)
    ]
    counts = np.random.default_rng(1).binomial(n, p, size=10_000)
    coverage = np.mean([intervals[k].contains(p) for k in counts])
    assert coverage >= 1 - delta


def test_bernoulli_interval_dispatch():
    assert bernoulli_interval("cp", 3, 10, 0.1) == clopper_pearson(3, 10, 0.1)
    assert bernoulli_interval(IntervalMethod.JEFFREYS, 3, 10, 0.1) == jeffreys_interval(
        3, 10, 0.1
    )
    eb = bernoulli_interval(IntervalMethod.EMPIRICAL_BERNSTEIN, 3, 10, 0.1)
    direct = empirical_bernstein(np.r_[np.ones(3), np.zeros(7)], 0.1)
    assert eb.lo == pytest.approx(direct.lo, abs=1e-12)
    assert eb.hi == pytest.approx(direct.hi, abs=1e-12)


@pytest.mark.parametrize("k, n, delta", [(0, 0, 0.1), (5, 4, 0.1), (1, 4, 0.0), (1, 4, 1.0)])
def test_invalid_arguments(k, n, delta):
    with pytest.raises(ValueError):
        clopper_pearson(k, n, delta)
