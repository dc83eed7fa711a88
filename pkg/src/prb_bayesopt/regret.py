"""Model-based regret: Monte Carlo estimates of P(f* - f(x) <= epsilon) and candidates."""

from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
from scipy.special import log_ndtr, ndtr

from prb_bayesopt.config import DEFAULT_DELTA, DEFAULT_NUM_FEATURES
from prb_bayesopt.errors import ConditionedVarianceError
from prb_bayesopt.model.link import invert_link, invert_link_derivative
from prb_bayesopt.model.pathwise import FeatureMap, PathwiseSample, build_feature_map, draw_path
from prb_bayesopt.model.posterior import PosteriorGP, is_degenerate
from prb_bayesopt.models import IntervalMethod, Link, PsiEstimate
from prb_bayesopt.sample_opt import OptimizerConfig, ScalarField, exceeds_gap, maximize
from prb_bayesopt.seqtest.decision import BernoulliSampler
from prb_bayesopt.seqtest.intervals import bernoulli_interval
from prb_bayesopt.seeding import Seed, child_seed

TRUNCATION_FLOOR = 1e-12
DEDUP_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class RegretDraw:
    """One Bernoulli draw of 1(r(x) <= epsilon) under a sampled path."""

    indicator: bool
    path_seed: np.random.SeedSequence = field(repr=False)
    evaluations: int = 0
    witness: np.ndarray | None = field(default=None, repr=False)


class CandidateSource(StrEnum):
    IN_SAMPLE = "in_sample_filter"
    SURROGATE = "surrogate_optimized"
    INCUMBENT_ONLY = "incumbent_only"


@dataclass(frozen=True, eq=False)
class CandidateSet:
    points: np.ndarray  # (k, dim), the incumbent first
    provenance: CandidateSource

    def __len__(self) -> int:
        return self.points.shape[0]


class IncumbentMode(StrEnum):
    EVALUATED_ONLY = "evaluated_only"
    WHOLE_SPACE = "whole_space"


@dataclass(frozen=True)
class PsiAlternatives:
    """Closed-form estimators that integrate f(x) out analytically given f*."""

    orange: float
    green: float
    red: float


def path_field(sample: PathwiseSample, link: Link = Link.IDENTITY) -> ScalarField:
    """The path pulled back through the inverse link, as an optimizable field."""
    if link is Link.IDENTITY:
        return ScalarField(sample, sample.posterior.dim, sample.gradient)

    def values(xs: np.ndarray) -> np.ndarray:
        return invert_link(link, sample(xs))

    def gradient(x: np.ndarray) -> np.ndarray:
        latent = sample(np.reshape(x, (1, -1)))[0]
        return invert_link_derivative(link, latent) * sample.gradient(x)

    return ScalarField(values, sample.posterior.dim, gradient)


def draw_regret_indicator(
    gp: PosteriorGP,
    fmap: FeatureMap,
    x: np.ndarray,
    epsilon: float,
    cfg: OptimizerConfig,
    seed: Seed,
) -> RegretDraw:
    """Draw one path and test whether some point beats x on it by more than epsilon."""
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    path_seed = child_seed(seed, "path")
    sample = draw_path(gp, fmap, path_seed)
    gap = exceeds_gap(
        path_field(sample, gp.hyperparams.link),
        np.asarray(x, dtype=float).reshape(-1),
        epsilon,
        cfg,
        child_seed(seed, "search"),
    )
    return RegretDraw(
        indicator=not gap.exceeded,
        path_seed=path_seed,
        evaluations=gap.evaluations,
        witness=gap.witness,
    )


def indicator_sampler(
    gp: PosteriorGP,
    fmap: FeatureMap,
    x: np.ndarray,
    epsilon: float,
    cfg: OptimizerConfig,
    root_seed: Seed,
) -> BernoulliSampler:
    """Bernoulli source whose i-th draw always uses child seed i of ``root_seed``."""

    def sample(start: int, stop: int) -> np.ndarray:
        draws = [
            draw_regret_indicator(gp, fmap, x, epsilon, cfg, child_seed(root_seed, i))
            for i in range(start, stop)
        ]
        return np.array([draw.indicator for draw in draws], dtype=bool)

    return sample


def estimate_psi(
    gp: PosteriorGP,
    fmap: FeatureMap,
    x: np.ndarray,
    epsilon: float,
    n: int,
    cfg: OptimizerConfig,
    root_seed: Seed,
    interval_method: IntervalMethod = IntervalMethod.CLOPPER_PEARSON,
    delta: float = DEFAULT_DELTA,
) -> PsiEstimate:
    """Average of ``n`` independent regret indicators with a confidence interval."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    draws = indicator_sampler(gp, fmap, x, epsilon, cfg, root_seed)(0, n)
    k = int(np.count_nonzero(draws))
    return PsiEstimate(k / n, n, k, bernoulli_interval(interval_method, k, n, delta))


def sample_maxima(
    gp: PosteriorGP, fmap: FeatureMap, n: int, cfg: OptimizerConfig, seed: Seed
) -> tuple[np.ndarray, np.ndarray]:
    """Jointly sampled latent suprema f* and maximizers x* of ``n`` paths."""
    f_star = np.empty(n)
    x_star = np.empty((n, gp.dim))
    for i in range(n):
        sample = draw_path(gp, fmap, child_seed(seed, i, "path"))
        result = maximize(path_field(sample), cfg, child_seed(seed, i, "search"))
        f_star[i], x_star[i] = result.maximum, result.argmax
    return f_star, x_star


def psi_profile(
    gp: PosteriorGP,
    fmap: FeatureMap,
    xs: np.ndarray,
    epsilon: float,
    n: int,
    cfg: OptimizerConfig,
    seed: Seed,
) -> np.ndarray:
    """Estimates at every point of ``xs`` from ``n`` paths shared across the points.

    Each path is maximized once; its supremum is raised to the largest value it
    takes on ``xs`` so that no point can beat it.
    """
    xs = np.atleast_2d(xs)
    link = gp.hyperparams.link
    hits = np.zeros(xs.shape[0])
    for i in range(n):
        sample = draw_path(gp, fmap, child_seed(seed, i, "path"))
        field_ = path_field(sample, link)
        result = maximize(field_, cfg, child_seed(seed, i, "search"))
        values = field_.values(xs)
        best = max(result.maximum, float(np.max(values)))
        hits += best - values <= epsilon
    return hits / n


def _truncated_mass(
    mean: np.ndarray, var: np.ndarray, f_star: np.ndarray, epsilon: float
) -> np.ndarray:
    """P(f* - epsilon <= f <= f*) / P(f <= f*) for f ~ N(mean, var), clamped to [0, 1]."""
    mean, var, f_star = np.broadcast_arrays(mean, var, f_star)
    out = np.where(mean >= f_star - epsilon, 1.0, 0.0)
    live = var > TRUNCATION_FLOOR
    if np.any(live):
        s = np.sqrt(var[live])
        a = (f_star[live] - mean[live]) / s
        b = a - epsilon / s
        upper = ndtr(a)
        floored = upper < TRUNCATION_FLOOR
        ratio = -np.expm1(log_ndtr(b) - log_ndtr(a))
        ratio = np.where(floored, (upper - ndtr(b)) / TRUNCATION_FLOOR, ratio)
        out[live] = ratio
    return np.clip(out, 0.0, 1.0)


def psi_orange(gp: PosteriorGP, x: np.ndarray, epsilon: float, f_star: np.ndarray) -> float:
    """E over f* of Phi((mu(x) - f* + epsilon) / sd(x))."""
    mean, var = gp.moments(np.reshape(x, (1, -1)))
    f_star = np.asarray(f_star, dtype=float)
    if is_degenerate(float(var[0])):
        return float(np.mean(mean[0] - f_star + epsilon >= 0.0))
    z = (mean[0] - f_star + epsilon) / np.sqrt(var[0])
    return float(np.clip(np.mean(ndtr(z)), 0.0, 1.0))


def conditioned_on_maximum(
    gp: PosteriorGP, xs: np.ndarray, f_star: np.ndarray, x_star: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Moments at ``xs`` after the rank-one update f(x*_j) = f*_j, shape (len(xs), n)."""
    xs, x_star = np.atleast_2d(xs), np.atleast_2d(x_star)
    mean, var = gp.moments(xs)
    star_mean, star_var = gp.moments(x_star)
    cross = gp.cross_cov(xs, x_star)
    usable = star_var > TRUNCATION_FLOOR
    gain = np.where(usable, cross / np.where(usable, star_var, 1.0), 0.0)
    cond_mean = mean[:, None] + gain * (np.asarray(f_star)[None, :] - star_mean[None, :])
    cond_var = np.maximum(var[:, None] - gain * cross, 0.0)
    return cond_mean, cond_var


def red_estimates(
    gp: PosteriorGP, xs: np.ndarray, epsilon: float, f_star: np.ndarray, x_star: np.ndarray
) -> np.ndarray:
    """Average truncated conditional estimate at each point of ``xs``."""
    cond_mean, cond_var = conditioned_on_maximum(gp, xs, f_star, x_star)
    return _truncated_mass(cond_mean, cond_var, np.asarray(f_star)[None, :], epsilon).mean(
        axis=1
    )


def psi_alternatives(
    gp: PosteriorGP, x: np.ndarray, epsilon: float, f_star: np.ndarray, x_star: np.ndarray
) -> PsiAlternatives:
    """Orange, green (truncated at f*), and red (also conditioned on f(x*) = f*).

    Raises:
        ConditionedVarianceError: If the posterior variance at x is zero.
    """
    x = np.reshape(x, (1, -1))
    f_star = np.asarray(f_star, dtype=float)
    mean, var = gp.moments(x)
    if is_degenerate(float(var[0])):
        raise ConditionedVarianceError("conditioned variance zero at the query point")
    green = _truncated_mass(mean[0], var[0], f_star, epsilon).mean()
    return PsiAlternatives(
        orange=psi_orange(gp, x, epsilon, f_star),
        green=float(green),
        red=float(red_estimates(gp, x, epsilon, f_star, x_star)[0]),
    )


def incumbent(
    gp: PosteriorGP,
    mode: IncumbentMode = IncumbentMode.EVALUATED_ONLY,
    cfg: OptimizerConfig | None = None,
    seed: Seed = 0,
) -> np.ndarray:
    """Maximizer of the posterior mean over X_t (lowest index on ties) or the cube."""
    if mode is IncumbentMode.EVALUATED_ONLY:
        if gp.t == 0:
            raise ValueError("evaluated_only incumbent needs at least one observation")
        return gp.data.points[int(np.argmax(gp.mean(gp.data.points)))].copy()
    field_ = ScalarField(gp.mean, gp.dim, gp.mean_grad)
    return maximize(field_, cfg or OptimizerConfig(), seed).argmax


def dedupe(points: np.ndarray, tol: float = DEDUP_TOLERANCE) -> np.ndarray:
    kept: list[np.ndarray] = []
    for point in np.atleast_2d(points):
        if all(np.max(np.abs(point - other)) > tol for other in kept):
            kept.append(point)
    return np.array(kept)


def pairwise_gap_probability(gp: PosteriorGP, s: np.ndarray, xs: np.ndarray, epsilon: float):
    """P(f(s) - f(x) <= epsilon) for each x in ``xs`` under the joint posterior."""
    xs = np.atleast_2d(xs)
    s = np.reshape(s, (1, -1))
    mean_s, var_s = gp.moments(s)
    mean_x, var_x = gp.moments(xs)
    cross = gp.cross_cov(xs, s)[:, 0]
    gap_mean = mean_s[0] - mean_x
    gap_var = np.maximum(var_s[0] + var_x - 2.0 * cross, 0.0)
    out = np.where(gap_mean <= epsilon, 1.0, 0.0)
    live = gap_var > TRUNCATION_FLOOR
    out[live] = ndtr((epsilon - gap_mean[live]) / np.sqrt(gap_var[live]))
    return out


def candidate_set(
    gp: PosteriorGP,
    epsilon: float,
    delta_mod: float,
    cfg: OptimizerConfig,
    seed: Seed,
    mode: CandidateSource = CandidateSource.IN_SAMPLE,
    num_pairs: int = 32,
    num_features: int = DEFAULT_NUM_FEATURES,
) -> CandidateSet:
    """Points worth testing, the incumbent first.

    The in-sample filter drops evaluated points whose chance of being within
    epsilon of the incumbent is already below 1 - delta_mod; no such point can
    pass the regret test. Under the logit link the filter is skipped and every
    evaluated point is kept.
    """
    if mode is CandidateSource.INCUMBENT_ONLY:
        return CandidateSet(incumbent(gp)[None, :], mode)

    if mode is CandidateSource.IN_SAMPLE:
        s = incumbent(gp)
        points = gp.data.points
        if gp.hyperparams.link is Link.IDENTITY:
            keep = pairwise_gap_probability(gp, s, points, epsilon) >= 1.0 - delta_mod
            points = points[keep]
        return CandidateSet(dedupe(np.vstack([s[None, :], points])), mode)

    fmap = build_feature_map(gp.kernel, num_features, child_seed(seed, "features"))
    f_star, x_star = sample_maxima(gp, fmap, num_pairs, cfg, child_seed(seed, "maxima"))
    surrogate = ScalarField(
        lambda xs: red_estimates(gp, xs, epsilon, f_star, x_star), gp.dim
    )
    top = maximize(surrogate, cfg, child_seed(seed, "surrogate")).argmax
    s = incumbent(gp) if gp.t else incumbent(gp, IncumbentMode.WHOLE_SPACE, cfg, seed)
    return CandidateSet(dedupe(np.vstack([s[None, :], top[None, :]])), mode)
