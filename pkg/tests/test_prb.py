"""Tests for the probabilistic regret bound stopping rule."""

import numpy as np
import pytest
from conftest import FAST_FEATURES, FAST_OPTIMIZER

from prb_bayesopt.regret import CandidateSource, incumbent
from prb_bayesopt.stopping.base import StepView
from prb_bayesopt.stopping.params import PRBParams
from prb_bayesopt.stopping.prb import prb_rule


def params(**overrides) -> PRBParams:
    settings = {
        "epsilon": 0.1,
        "delta": 0.05,
        "budget": 20,
        "initial_design": 5,
        "candidates": CandidateSource.INCUMBENT_ONLY,
        "n0": 32,
        "cap": 128,
    }
    settings.update(overrides)
    return PRBParams(**settings)


def test_huge_epsilon_stops_at_first_check(posterior):
    view = StepView(posterior, posterior.t)
    verdict = prb_rule(view, params(epsilon=100.0), FAST_OPTIMIZER, 0, FAST_FEATURES)
    assert verdict.stop
    np.testing.assert_array_equal(verdict.returned_point, incumbent(posterior))
    assert verdict.diagnostics["checked"]
    assert verdict.diagnostics["estimates"] == [1.0]


def test_skips_steps_that_are_not_checkpoints(posterior):
    view = StepView(posterior, posterior.t)
    verdict = prb_rule(view, params(initial_design=10), FAST_OPTIMIZER, 0, FAST_FEATURES)
    assert not verdict.stop
    assert verdict.diagnostics == {"checked": False}


def test_near_certain_level_is_not_reached(posterior):
    view = StepView(posterior, posterior.t)
    strict = params(epsilon=1e-3, delta=0.05, delta_mod=1e-9, delta_est=0.025, cap=64, n0=64)
    verdict = prb_rule(view, strict, FAST_OPTIMIZER, 0, FAST_FEATURES)
    assert not verdict.stop
    assert verdict.diagnostics["estimates"][0] < 1.0


def test_same_seed_same_verdict(posterior):
    view = StepView(posterior, posterior.t)
    settings = params(epsilon=0.05, cap=64)
    a = prb_rule(view, settings, FAST_OPTIMIZER, 3, FAST_FEATURES)
    b = prb_rule(view, settings, FAST_OPTIMIZER, 3, FAST_FEATURES)
    assert a.stop == b.stop
    assert a.diagnostics == b.diagnostics


def test_in_sample_candidates_are_all_tested(posterior):
    view = StepView(posterior, posterior.t)
    settings = params(epsilon=100.0, candidates=CandidateSource.IN_SAMPLE, cap=32)
    verdict = prb_rule(view, settings, FAST_OPTIMIZER, 0, FAST_FEATURES)
    assert verdict.stop
    assert verdict.diagnostics["num_candidates"] == len(verdict.diagnostics["estimates"])


def test_view_must_match_posterior(posterior):
    with pytest.raises(ValueError):
        StepView(posterior, posterior.t + 1)
