"""Baseline stopping rules compared against probabilistic regret bounds."""

import math

import numpy as np

from prb_bayesopt.config import DEFAULT_DES_PATHS, DEFAULT_NUM_FEATURES
from prb_bayesopt.model.link import invert_link, invert_link_derivative
from prb_bayesopt.model.pathwise import build_feature_map, draw_path
from prb_bayesopt.model.posterior import PosteriorGP
from prb_bayesopt.regret import incumbent, path_field
from prb_bayesopt.sample_opt import OptimizerConfig, ScalarField, maximize
from prb_bayesopt.seeding import Seed, child_seed
from prb_bayesopt.stopping.base import StepView, StopVerdict

SD_FLOOR = 1e-12


def oracle_rule(view: StepView, epsilon: float) -> StopVerdict:
    """Stop once an evaluated point is truly within epsilon of the optimum."""
    if view.objective is None:
        raise ValueError("oracle_rule needs the true objective")
    values = np.asarray(view.objective.evaluate(view.data.points), dtype=float)
    best = int(np.argmax(values))
    regret = view.objective.optimum - float(values[best])
    return StopVerdict(
        stop=regret <= epsilon,
        returned_point=view.data.points[best].copy(),
        diagnostics={"best_regret": regret},
    )


def budget_rule(view: StepView, budget: int) -> StopVerdict:
    """Stop once ``budget`` evaluations have been made."""
    if view.t < 1:
        raise ValueError("budget_rule needs at least one observation")
    return StopVerdict(
        stop=view.t >= budget,
        returned_point=incumbent(view.posterior),
        diagnostics={"budget": budget},
    )


def acq_rule(view: StepView, cutoff: float) -> StopVerdict:
    """Stop when the acquisition value of the next query is at most ``cutoff``."""
    if view.acq_value is None:
        raise ValueError("acq_rule needs the acquisition value of the next query")
    return StopVerdict(
        stop=view.acq_value <= cutoff,
        returned_point=incumbent(view.posterior),
        diagnostics={"acq_value": view.acq_value, "cutoff": cutoff},
    )


def ucb_beta(dim: int, t: int, delta: float) -> float:
    """beta_t = (2/5) log(D t^2 pi^2 / (6 delta))."""
    return 0.4 * math.log(dim * t * t * math.pi**2 / (6.0 * delta))


def _bound_field(gp: PosteriorGP, scale: float) -> ScalarField:
    """mu + scale * sd, pulled back through the inverse link."""
    link = gp.hyperparams.link

    def values(xs: np.ndarray) -> np.ndarray:
        mean, var = gp.moments(xs)
        return invert_link(link, mean + scale * np.sqrt(var))

    def gradient(x: np.ndarray) -> np.ndarray:
        mean, var = gp.moments(np.reshape(x, (1, -1)))
        sd = max(math.sqrt(var[0]), SD_FLOOR)
        latent_grad = gp.mean_grad(x) + scale * gp.variance_grad(x) / (2.0 * sd)
        latent = mean[0] + scale * math.sqrt(var[0])
        return invert_link_derivative(link, latent) * latent_grad

    return ScalarField(values, gp.dim, gradient)


def delta_cb_rule(
    view: StepView, cutoff: float, delta: float, cfg: OptimizerConfig, seed: Seed
) -> StopVerdict:
    """Stop when max UCB over the cube minus max LCB over X_t is at most ``cutoff``."""
    if view.t < 1:
        raise ValueError("delta_cb_rule needs at least one observation")
    gp = view.posterior
    beta = ucb_beta(gp.dim, view.t, delta)
    root_beta = math.sqrt(max(beta, 0.0))
    upper = _bound_field(gp, root_beta)
    lower = _bound_field(gp, -root_beta)

    data_points = gp.data.points
    upper_at_data = upper.values(data_points)
    lower_at_data = lower.values(data_points)
    ucb_max = max(maximize(upper, cfg, seed).maximum, float(np.max(upper_at_data)))
    best = int(np.argmax(lower_at_data))
    gap = ucb_max - float(lower_at_data[best])
    return StopVerdict(
        stop=gap <= cutoff,
        returned_point=data_points[best].copy(),
        diagnostics={"gap": gap, "beta": beta, "cutoff": cutoff},
    )


def expected_supremum(
    gp: PosteriorGP,
    n_paths: int,
    cfg: OptimizerConfig,
    seed: Seed,
    num_features: int = DEFAULT_NUM_FEATURES,
) -> np.ndarray:
    """Suprema of ``n_paths`` pathwise draws; the same seed gives common random numbers."""
    fmap = build_feature_map(gp.kernel, num_features, child_seed(seed, "features"))
    suprema = np.empty(n_paths)
    for i in range(n_paths):
        sample = draw_path(gp, fmap, child_seed(seed, i, "path"))
        field_ = path_field(sample, gp.hyperparams.link)
        suprema[i] = maximize(field_, cfg, child_seed(seed, i, "search")).maximum
    return suprema


def delta_es_rule(
    view_prev: StepView,
    view_curr: StepView,
    cutoff: float,
    cfg: OptimizerConfig,
    seed: Seed,
    n_paths: int = DEFAULT_DES_PATHS,
    num_features: int = DEFAULT_NUM_FEATURES,
) -> StopVerdict:
    """Stop when the Monte Carlo change in the expected supremum is at most ``cutoff``.

    This is a pathwise proxy for a bound on |E f_t* - E f_{t-1}*|; both
    estimates share feature, weight, and search seeds.
    """
    prev = expected_supremum(view_prev.posterior, n_paths, cfg, seed, num_features)
    curr = expected_supremum(view_curr.posterior, n_paths, cfg, seed, num_features)
    change = abs(float(np.mean(curr)) - float(np.mean(prev)))
    spread = math.nan
    if n_paths > 1:
        spread = float(np.std(curr - prev, ddof=1)) / math.sqrt(n_paths)
    return StopVerdict(
        stop=change <= cutoff,
        returned_point=incumbent(view_curr.posterior),
        diagnostics={
            "proxy": True,
            "change": change,
            "std_error": spread,
            "degenerate_variance": n_paths == 1,
            "cutoff": cutoff,
        },
    )
