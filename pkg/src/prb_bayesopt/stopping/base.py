"""Per-step view of a run and the verdict a stopping rule returns."""

from dataclasses import dataclass, field
from typing import Any, Protocol

import numpy as np

from prb_bayesopt.model.posterior import PosteriorGP
from prb_bayesopt.models import Dataset


class TrueObjective(Protocol):
    """What oracle rules need to know about the objective being optimized."""

    optimum: float

    def evaluate(self, xs: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True, eq=False)
class StepView:
    """Everything a rule may look at after t evaluations."""

    posterior: PosteriorGP
    t: int
    objective: TrueObjective | None = None
    acq_value: float | None = None

    def __post_init__(self) -> None:
        if self.posterior.t != self.t:
            raise ValueError(f"posterior holds {self.posterior.t} points but t = {self.t}")

    @property
    def data(self) -> Dataset:
        return self.posterior.data


@dataclass(frozen=True, eq=False)
class StopVerdict:
    stop: bool
    returned_point: np.ndarray | None = None
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.stop and self.returned_point is None:
            raise ValueError("a stopping verdict must carry the returned point")
