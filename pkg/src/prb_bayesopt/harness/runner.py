"""Seeded Bayesian optimization runs with the in-sample knowledge gradient."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from prb_bayesopt.acquisition import ISKGConfig, select_query
from prb_bayesopt.config import (
    DEFAULT_INITIAL_DESIGN,
    DEFAULT_MAP_RESTARTS,
    DEFAULT_NUM_FEATURES,
)
from prb_bayesopt.errors import IllConditionedError
from prb_bayesopt.harness.objectives import Objective
from prb_bayesopt.harness.records import RunRecord, StepEntry
from prb_bayesopt.model.fitting import fit_or_default
from prb_bayesopt.model.posterior import PosteriorGP
from prb_bayesopt.models import Dataset, GPHyperparams, Link
from prb_bayesopt.regret import incumbent
from prb_bayesopt.seeding import child_seed, make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelConfig:
    """MAP refitting at every step, or fixed hyperparameters when ``fit`` is False."""

    fit: bool = True
    hyperparams: GPHyperparams | None = None
    link: Link = Link.IDENTITY
    restarts: int = DEFAULT_MAP_RESTARTS

    def __post_init__(self) -> None:
        if not self.fit and self.hyperparams is None:
            raise ValueError("fixed-hyperparameter models need hyperparams")

    @classmethod
    def for_objective(cls, objective: Objective, fit: bool = False) -> "ModelConfig":
        """Known prior hyperparameters for GP draws unless ``fit``; MAP otherwise."""
        if objective.hyperparams is not None and not fit:
            return cls(fit=False, hyperparams=objective.hyperparams)
        return cls(fit=True)


def model_hyperparams(data: Dataset, t: int, seed: int, cfg: ModelConfig) -> GPHyperparams:
    """Hyperparameters for the model after t observations.

    Refitting with the same (seed, t) and data reproduces the same values.
    """
    if not cfg.fit:
        assert cfg.hyperparams is not None
        return cfg.hyperparams
    return fit_or_default(data, child_seed(seed, "fit", t), restarts=cfg.restarts, link=cfg.link)


def run_id_for(objective: Objective, seed: int) -> str:
    return f"{objective.name}_{objective.dim}d_noise{objective.noise_variance:g}_seed{seed}"


def run_bo(
    objective: Objective,
    budget: int,
    initial_design: int = DEFAULT_INITIAL_DESIGN,
    seed: int = 0,
    acq_cfg: ISKGConfig | None = None,
    model_cfg: ModelConfig | None = None,
    num_features: int = DEFAULT_NUM_FEATURES,
) -> RunRecord:
    """Run BO to the budget without stopping and record every step.

    Args:
        objective: Function to maximize on the unit cube.
        budget: Total number of evaluations T.
        initial_design: Number of uniform random queries T0 before the
            acquisition takes over.
        seed: Root seed; the same seed gives the same record.
        acq_cfg: Quadrature and search settings for the acquisition.
        model_cfg: How hyperparameters are chosen at each step.
        num_features: Feature count the objective was built with, kept in the
            record so replays can rebuild GP-draw objectives.

    Returns:
        The run record. A failed evaluation or an ill-conditioned model ends
        the run early with ``valid`` set to False.
    """
    if not budget > initial_design >= 1:
        raise ValueError(f"need budget > initial_design >= 1, got {budget} and {initial_design}")
    acq_cfg = acq_cfg or ISKGConfig()
    model_cfg = model_cfg or ModelConfig.for_objective(objective)
    record = RunRecord(
        run_id=run_id_for(objective, seed),
        seed=seed,
        objective=objective.name,
        dim=objective.dim,
        noise_variance=objective.noise_variance,
        budget=budget,
        initial_design=initial_design,
        link=model_cfg.link,
        num_features=num_features,
    )
    design = make_rng(seed, "design").uniform(size=(initial_design, objective.dim))
    noise_rng = make_rng(seed, "noise")
    data = Dataset.empty(objective.dim)
    next_query: np.ndarray | None = None

    for t in range(1, budget + 1):
        x = design[t - 1] if t <= initial_design else next_query
        assert x is not None
        try:
            y = objective.observe(x, noise_rng)
            if not math.isfinite(y):
                raise ValueError(f"non-finite observation {y}")
        except Exception as exc:
            return _invalidate(record, t, f"objective evaluation failed: {exc}")
        data = data.append(x, y)

        if t < initial_design:
            record.steps.append(StepEntry(t, tuple(x.tolist()), y))
            continue

        try:
            hyper = model_hyperparams(data, t, seed, model_cfg)
            gp = PosteriorGP.from_data(hyper, data)
            best = incumbent(gp)
            acq_value = None
            if t < budget:
                acq_seed = child_seed(seed, "acquisition", t)
                next_query, acq_value = select_query(gp, acq_cfg, acq_seed)
        except IllConditionedError as exc:
            record.steps.append(StepEntry(t, tuple(x.tolist()), y))
            return _invalidate(record, t, f"model failed: {exc}")

        record.steps.append(
            StepEntry(
                t,
                tuple(x.tolist()),
                y,
                hyperparams=hyper.to_dict(),
                incumbent=tuple(best.tolist()),
                acq_value=acq_value,
            )
        )
        logger.debug("%s t=%d y=%.6g acq=%s", record.run_id, t, y, acq_value)
    return record


def _invalidate(record: RunRecord, t: int, message: str) -> RunRecord:
    logger.warning("Run %s invalid at t=%d: %s", record.run_id, t, message)
    record.valid = False
    record.error = message
    return record
