"""Adaptive Monte Carlo test of whether a Bernoulli mean exceeds a level."""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from prb_bayesopt.models import IntervalMethod, PsiEstimate
from prb_bayesopt.seqtest.intervals import bernoulli_interval
from prb_bayesopt.seqtest.schedule import TestSchedule

logger = logging.getLogger(__name__)

# Called with (start, stop), returns the 0/1 draws with indices start..stop-1
BernoulliSampler = Callable[[int, int], np.ndarray]


class Decision(StrEnum):
    ABOVE = "above"
    BELOW = "below"
    INCONCLUSIVE_CAPPED = "inconclusive_capped"


@dataclass(frozen=True)
class DecisionOutcome:
    """Verdict of ``decide_threshold`` together with the evidence behind it."""

    decision: Decision
    estimate: PsiEstimate
    level: float
    draws_used: int
    rounds: int
    guaranteed: bool

    @property
    def above(self) -> bool:
        """Whether the running mean reached the level (ties count as above)."""
        return self.estimate.mean >= self.level


def decide_threshold(
    sampler: BernoulliSampler,
    level: float,
    schedule: TestSchedule,
    interval_method: IntervalMethod = IntervalMethod.CLOPPER_PEARSON,
) -> DecisionOutcome:
    """Draw in growing batches until the level leaves the confidence interval.

    Round j tops the sample up to n_j draws and builds an interval at
    confidence 1 - d_j. When the level falls outside it, the verdict is
    guaranteed. When the hard cap is hit first, the verdict is the plain
    comparison of the running mean against the level and is not guaranteed.
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    successes, drawn = 0, 0
    for j, risk, size in schedule.rounds():
        target = size if schedule.hard_cap is None else min(size, schedule.hard_cap)
        if target > drawn:
            batch = np.asarray(sampler(drawn, target))
            successes += int(np.count_nonzero(batch))
            drawn = target
        interval = bernoulli_interval(interval_method, successes, drawn, risk)
        estimate = PsiEstimate(successes / drawn, drawn, successes, interval)
        if not interval.contains(level):
            decision = Decision.ABOVE if estimate.mean >= level else Decision.BELOW
            return DecisionOutcome(decision, estimate, level, drawn, j, guaranteed=True)
        if schedule.hard_cap is not None and drawn >= schedule.hard_cap:
            logger.debug(
                "Draw cap %d reached with mean %.4f against level %.4f",
                schedule.hard_cap,
                estimate.mean,
                level,
            )
            return DecisionOutcome(
                Decision.INCONCLUSIVE_CAPPED, estimate, level, drawn, j, guaranteed=False
            )
    raise AssertionError("unreachable")
