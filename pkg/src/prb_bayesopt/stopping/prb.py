"""Probabilistic regret bound stopping rule."""

import logging

import numpy as np

from prb_bayesopt.config import DEFAULT_NUM_FEATURES
from prb_bayesopt.model.pathwise import build_feature_map
from prb_bayesopt.regret import candidate_set, indicator_sampler
from prb_bayesopt.sample_opt import OptimizerConfig
from prb_bayesopt.seeding import Seed, child_seed
from prb_bayesopt.seqtest.decision import decide_threshold
from prb_bayesopt.seqtest.schedule import make_schedule
from prb_bayesopt.stopping.base import StepView, StopVerdict
from prb_bayesopt.stopping.params import PRBParams

logger = logging.getLogger(__name__)


def prb_rule(
    view: StepView,
    params: PRBParams,
    cfg: OptimizerConfig,
    seed: Seed,
    num_features: int = DEFAULT_NUM_FEATURES,
) -> StopVerdict:
    """Stop once some candidate is epsilon-optimal with probability >= 1 - delta_mod.

    Each candidate gets its own adaptive test with risk delta_est^t / |C|. The
    returned point is the candidate with the highest estimate.
    """
    if view.t < 1:
        raise ValueError("prb_rule needs at least one observation")
    step_risk = params.delta_est_at(view.t)
    if step_risk is None:
        return StopVerdict(stop=False, diagnostics={"checked": False})

    gp = view.posterior
    assert params.delta_mod is not None
    candidates = candidate_set(
        gp,
        params.epsilon,
        params.delta_mod,
        cfg,
        child_seed(seed, "candidates"),
        mode=params.candidates,
        num_features=num_features,
    )
    fmap = build_feature_map(gp.kernel, num_features, child_seed(seed, "features"))
    schedule = make_schedule(
        step_risk / len(candidates), params.alpha, params.beta, params.n0, params.cap
    )

    outcomes = []
    for i, point in enumerate(candidates.points):
        sampler = indicator_sampler(
            gp, fmap, point, params.epsilon, cfg, child_seed(seed, "candidate", i)
        )
        outcomes.append(decide_threshold(sampler, params.level, schedule, params.interval))

    means = np.array([outcome.estimate.mean for outcome in outcomes])
    best = int(np.argmax(means))
    stop = bool(means[best] >= params.level)
    diagnostics = {
        "checked": True,
        "delta_est_step": step_risk,
        "num_candidates": len(candidates),
        "estimates": means.tolist(),
        "draws_used": [outcome.draws_used for outcome in outcomes],
        "guaranteed": outcomes[best].guaranteed,
        "decision": outcomes[best].decision.value,
    }
    if stop:
        logger.info(
            "PRB stop at t=%d: estimate %.4f >= %.4f (%d candidates)",
            view.t,
            means[best],
            params.level,
            len(candidates),
        )
    return StopVerdict(stop, candidates.points[best].copy(), diagnostics)
