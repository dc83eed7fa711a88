"""Per-round risk and sample-size schedules for the adaptive threshold test."""

import math
from collections.abc import Iterator
from dataclasses import dataclass

from prb_bayesopt.config import DEFAULT_DRAW_CAP, SCHEDULE_ALPHA, SCHEDULE_BETA, SCHEDULE_N0


@dataclass(frozen=True)
class TestSchedule:
    """Round j uses risk d_j = j^-alpha (alpha - 1) / alpha * delta and n_j draws.

    n_j = ceil(beta^(j-1) N), bumped by one where rounding would repeat a size.
    Since sum_j j^-alpha <= alpha / (alpha - 1), the d_j sum to at most delta.
    """

    delta_est_step: float
    alpha: float = SCHEDULE_ALPHA
    beta: float = SCHEDULE_BETA
    n0: int = SCHEDULE_N0
    hard_cap: int | None = DEFAULT_DRAW_CAP

    __test__ = False

    def risk(self, j: int) -> float:
        return j ** (-self.alpha) * (self.alpha - 1.0) / self.alpha * self.delta_est_step

    def draws(self, j: int) -> int:
        size = self.n0
        for i in range(2, j + 1):
            size = max(size + 1, math.ceil(self.beta ** (i - 1) * self.n0 - 1e-9))
        return size

    def rounds(self) -> Iterator[tuple[int, float, int]]:
        """Yield (j, d_j, n_j) for j = 1, 2, ... without end."""
        j, size = 1, self.n0
        while True:
            yield j, self.risk(j), size
            j += 1
            size = max(size + 1, math.ceil(self.beta ** (j - 1) * self.n0 - 1e-9))


def make_schedule(
    delta_est_step: float,
    alpha: float = SCHEDULE_ALPHA,
    beta: float = SCHEDULE_BETA,
    n0: int = SCHEDULE_N0,
    cap: int | None = DEFAULT_DRAW_CAP,
) -> TestSchedule:
    if not 0.0 < delta_est_step < 1.0:
        raise ValueError(f"delta_est_step must lie in (0, 1), got {delta_est_step}")
    if not alpha > 1.0:
        raise ValueError(f"alpha must exceed 1, got {alpha}")
    if not beta > 1.0:
        raise ValueError(f"beta must exceed 1, got {beta}")
    if n0 < 1:
        raise ValueError(f"n0 must be >= 1, got {n0}")
    if cap is not None and cap < 1:
        raise ValueError(f"cap must be >= 1, got {cap}")
    return TestSchedule(delta_est_step, alpha, beta, n0, cap)
