"""Step through recorded runs under a stopping rule."""

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np

from prb_bayesopt.config import (
    BASELINE_CUTOFF_EXPONENTS,
    DEFAULT_DELTA,
    DEFAULT_NUM_FEATURES,
    REGRET_LOG10_FLOOR,
)
from prb_bayesopt.errors import CorruptRecordError
from prb_bayesopt.harness.objectives import Objective
from prb_bayesopt.harness.records import RunRecord
from prb_bayesopt.harness.runner import ModelConfig, model_hyperparams
from prb_bayesopt.model.fitting import default_hyperparams
from prb_bayesopt.model.posterior import PosteriorGP
from prb_bayesopt.regret import incumbent
from prb_bayesopt.sample_opt import OptimizerConfig
from prb_bayesopt.seeding import Seed, child_seed
from prb_bayesopt.stopping.base import StepView, StopVerdict
from prb_bayesopt.stopping.baselines import (
    acq_rule,
    budget_rule,
    delta_cb_rule,
    delta_es_rule,
    oracle_rule,
)
from prb_bayesopt.stopping.params import PRBParams
from prb_bayesopt.stopping.prb import prb_rule

logger = logging.getLogger(__name__)


class RuleName(StrEnum):
    PRB = "prb"
    ORACLE = "oracle"
    BUDGET = "budget"
    ACQ = "acq"
    DELTA_CB = "delta_cb"
    DELTA_ES = "delta_es"


@dataclass(frozen=True)
class RuleSpec:
    """A stopping rule and its settings.

    ``cutoff`` defaults to epsilon / 2**k with k from BASELINE_CUTOFF_EXPONENTS.
    ``prb`` carries the PRB risk settings; its budget and initial design are
    taken from each record. With ``refit`` the model is refitted at every step
    instead of using the logged hyperparameters.
    """

    name: RuleName
    epsilon: float
    delta: float = DEFAULT_DELTA
    cutoff: float | None = None
    budget: int | None = None
    prb: PRBParams | None = None
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    num_features: int = DEFAULT_NUM_FEATURES
    refit: bool = False
    label: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "name", RuleName(self.name))
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.name is RuleName.BUDGET and self.budget is None:
            raise ValueError("the budget rule needs a budget")

    @property
    def display_name(self) -> str:
        return self.label or self.name.value

    @property
    def resolved_cutoff(self) -> float:
        if self.cutoff is not None:
            return self.cutoff
        exponent = BASELINE_CUTOFF_EXPONENTS[self.name.value]
        return self.epsilon / 2.0**exponent

    def prb_params(self, record: RunRecord) -> PRBParams:
        base = self.prb or PRBParams(
            epsilon=self.epsilon,
            delta=self.delta,
            budget=record.budget,
            initial_design=record.initial_design,
        )
        return dataclasses.replace(
            base, budget=record.budget, initial_design=record.initial_design
        )


@dataclass(frozen=True, eq=False)
class ReplayResult:
    """Where and how well a rule stopped on one run."""

    run_id: str
    rule: str
    objective: str
    dim: int
    noise: float
    seed: int
    epsilon: float
    stop_step: int
    terminated: bool
    returned_point: tuple[float, ...]
    regret: float
    success: bool
    verdict: StopVerdict | None = field(default=None, repr=False)

    @property
    def log10_regret(self) -> float:
        return log10_floored(self.regret)

    @property
    def log10_excess_regret(self) -> float | None:
        """log10(regret - epsilon) on failed runs, None on successful ones."""
        if self.success:
            return None
        return log10_floored(self.regret - self.epsilon)


def log10_floored(value: float) -> float:
    if value <= 0.0:
        return REGRET_LOG10_FLOOR
    return max(math.log10(value), REGRET_LOG10_FLOOR)


def _posterior_at(
    record: RunRecord, t: int, rule: RuleSpec, objective: Objective
) -> PosteriorGP:
    data = record.dataset(t)
    hyper = record.hyperparams_at(t)
    if rule.refit:
        model_cfg = ModelConfig.for_objective(objective)
        if model_cfg.fit:
            model_cfg = dataclasses.replace(model_cfg, link=record.link)
        hyper = model_hyperparams(data, t, record.seed, model_cfg)
    elif hyper is None:
        hyper = default_hyperparams(record.dim, data, record.link)
    return PosteriorGP.from_data(hyper, data)


def _apply(
    rule: RuleSpec,
    view: StepView,
    previous: StepView | None,
    prb: PRBParams | None,
    seed: Seed,
) -> StopVerdict:
    match rule.name:
        case RuleName.PRB:
            assert prb is not None
            return prb_rule(view, prb, rule.optimizer, seed, rule.num_features)
        case RuleName.ORACLE:
            return oracle_rule(view, rule.epsilon)
        case RuleName.BUDGET:
            assert rule.budget is not None
            return budget_rule(view, rule.budget)
        case RuleName.ACQ:
            if view.acq_value is None:
                return StopVerdict(stop=False, diagnostics={"acq_value": None})
            return acq_rule(view, rule.resolved_cutoff)
        case RuleName.DELTA_CB:
            return delta_cb_rule(view, rule.resolved_cutoff, rule.delta, rule.optimizer, seed)
        case RuleName.DELTA_ES:
            if previous is None:
                return StopVerdict(stop=False, diagnostics={"proxy": True, "change": None})
            return delta_es_rule(
                previous,
                view,
                rule.resolved_cutoff,
                rule.optimizer,
                seed,
                num_features=rule.num_features,
            )


def replay(
    record: RunRecord,
    rule: RuleSpec,
    objective: Objective,
    seed: int | None = None,
) -> ReplayResult:
    """Apply ``rule`` at each recorded step and report the first stop.

    The oracle rule is checked from t = 1; every other rule from the end of the
    initial design. A rule that never stops is reported at t = T with
    ``terminated`` False and the final incumbent as its answer.

    Raises:
        CorruptRecordError: If the record is flagged invalid or incomplete.
    """
    if not record.valid:
        raise CorruptRecordError(f"run {record.run_id} is invalid: {record.error}")
    if record.last_step != record.budget:
        raise CorruptRecordError(
            f"run {record.run_id} has {record.last_step} of {record.budget} steps"
        )
    if objective.dim != record.dim:
        raise ValueError(f"objective has dim {objective.dim}, record has {record.dim}")
    root = record.seed if seed is None else seed
    prb = rule.prb_params(record) if rule.name is RuleName.PRB else None
    first = 1 if rule.name is RuleName.ORACLE else record.initial_design

    previous: StepView | None = None
    view: StepView | None = None
    for t in range(first, record.budget + 1):
        if prb is not None and prb.delta_est_at(t) is None and t < record.budget:
            continue
        gp = _posterior_at(record, t, rule, objective)
        view = StepView(gp, t, objective, acq_value=record.step(t).acq_value)
        verdict = _apply(rule, view, previous, prb, child_seed(root, "replay", t))
        previous = view
        if verdict.stop:
            assert verdict.returned_point is not None
            logger.debug("%s: %s stopped at t=%d", record.run_id, rule.display_name, t)
            return _result(record, rule, objective, t, True, verdict.returned_point, verdict)

    assert view is not None
    final = incumbent(view.posterior)
    return _result(record, rule, objective, record.budget, False, final, None)


def _result(
    record: RunRecord,
    rule: RuleSpec,
    objective: Objective,
    t: int,
    terminated: bool,
    point: np.ndarray,
    verdict: StopVerdict | None,
) -> ReplayResult:
    regret = objective.regret(point)
    return ReplayResult(
        run_id=record.run_id,
        rule=rule.display_name,
        objective=record.objective,
        dim=record.dim,
        noise=record.noise_variance,
        seed=record.seed,
        epsilon=rule.epsilon,
        stop_step=t,
        terminated=terminated,
        returned_point=tuple(np.asarray(point, dtype=float).tolist()),
        regret=regret,
        success=regret <= rule.epsilon,
        verdict=verdict,
    )
