"""Risk parameters for probabilistic-regret-bound stopping."""

import math
from dataclasses import dataclass
from enum import StrEnum

from prb_bayesopt.config import (
    DEFAULT_DRAW_CAP,
    DEFAULT_INITIAL_DESIGN,
    SCHEDULE_ALPHA,
    SCHEDULE_BETA,
    SCHEDULE_N0,
)
from prb_bayesopt.models import IntervalMethod
from prb_bayesopt.regret import CandidateSource


class StepSchedule(StrEnum):
    CONSTANT = "constant"
    GEOMETRIC = "geometric"


@dataclass(frozen=True)
class PRBParams:
    """Regret bound epsilon, total risk delta, and how delta is spent over time.

    ``delta`` splits into ``delta_mod`` (the model is wrong) and ``delta_est``
    (the Monte Carlo test is wrong); by default evenly. The stopping level is
    1 - delta_mod.

    ``check_every`` thins the constant schedule only; the geometric schedule has
    its own checkpoints, so combining it with ``check_every > 1`` is rejected.
    """

    epsilon: float
    delta: float
    delta_mod: float | None = None
    delta_est: float | None = None
    step_schedule: StepSchedule = StepSchedule.CONSTANT
    budget: int | None = None
    initial_design: int = DEFAULT_INITIAL_DESIGN
    alpha: float = SCHEDULE_ALPHA
    beta: float = SCHEDULE_BETA
    n0: int = SCHEDULE_N0
    cap: int | None = DEFAULT_DRAW_CAP
    interval: IntervalMethod = IntervalMethod.CLOPPER_PEARSON
    candidates: CandidateSource = CandidateSource.IN_SAMPLE
    check_every: int = 1

    def __post_init__(self) -> None:
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.delta_mod is None:
            object.__setattr__(self, "delta_mod", self.delta / 2.0)
        if self.delta_est is None:
            object.__setattr__(self, "delta_est", self.delta - self.delta_mod)
        assert self.delta_mod is not None and self.delta_est is not None
        if self.delta_mod <= 0.0 or self.delta_est <= 0.0:
            raise ValueError("delta_mod and delta_est must be positive")
        if self.delta_mod + self.delta_est > self.delta * (1.0 + 1e-12):
            raise ValueError(
                f"delta_mod + delta_est = {self.delta_mod + self.delta_est} exceeds delta"
            )
        if self.step_schedule is StepSchedule.CONSTANT:
            if self.budget is None or self.budget <= self.initial_design:
                raise ValueError("the constant schedule needs a budget above the initial design")
        if self.check_every < 1:
            raise ValueError(f"check_every must be >= 1, got {self.check_every}")
        if self.step_schedule is StepSchedule.GEOMETRIC and self.check_every != 1:
            raise ValueError("check_every applies to the constant schedule only")

    @property
    def level(self) -> float:
        assert self.delta_mod is not None
        return 1.0 - self.delta_mod

    def checkpoints(self, horizon: int) -> list[int]:
        """Steps t <= horizon at which the rule is evaluated."""
        return [t for t in range(self.initial_design, horizon + 1) if self.delta_est_at(t)]

    def delta_est_at(self, t: int) -> float | None:
        """Estimation risk spent at step t, or None when t is not a checkpoint."""
        assert self.delta_est is not None
        if t < self.initial_design:
            return None
        if self.step_schedule is StepSchedule.CONSTANT:
            assert self.budget is not None
            # T - T0 checks at t = T0, ..., T - 1; the run ends at T regardless
            if t >= self.budget or (t - self.initial_design) % self.check_every:
                return None
            return self.delta_est / (self.budget - self.initial_design)
        if t not in self._geometric_steps(t):
            return None
        return t ** (-self.alpha) * (self.alpha - 1.0) / self.alpha * self.delta_est

    def _geometric_steps(self, horizon: int) -> set[int]:
        steps, i = set(), 1
        while True:
            step = math.ceil(self.initial_design * self.beta ** (i - 1) - 1e-9)
            if step > horizon:
                return steps
            steps.add(step)
            i += 1
