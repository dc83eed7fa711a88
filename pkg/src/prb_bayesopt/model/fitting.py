"""MAP hyperparameter fitting under broad hyperpriors."""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve
from scipy.optimize import minimize
from scipy.special import expit

from prb_bayesopt.config import DEFAULT_MAP_RESTARTS, DEGENERATE_VARIANCE, JITTER_START
from prb_bayesopt.errors import DegenerateDataError
from prb_bayesopt.model.kernel import kernel_hyper_grads
from prb_bayesopt.model.link import apply_link
from prb_bayesopt.models import Dataset, GPHyperparams, KernelSpec, Link
from prb_bayesopt.seeding import Seed, make_rng

logger = logging.getLogger(__name__)

LENGTHSCALE_PRIOR_MU = 0.5
LENGTHSCALE_PRIOR_SIGMA = 1.0

# Optimizer-side bounds on the unconstrained coordinates
_SIGMOID_LIMIT = 12.0
_LOG_LENGTHSCALE_LIMITS = (math.log(1e-3), math.log(1e3))
_FAILED = 1e25


@dataclass(frozen=True)
class HyperpriorSpec:
    """Uniform bounds on the mean and log scales, a normal prior on log lengthscales.

    The lengthscale prior is a density over log ell, not a log-normal density over
    ell: there is no -log ell Jacobian term, so its mode is at ell = exp(mu).
    """

    mean_bounds: tuple[float, float]
    log_variance_bounds: tuple[float, float]
    log_noise_bounds: tuple[float, float]
    lengthscale_mu: tuple[float, ...]
    lengthscale_sigma: float = LENGTHSCALE_PRIOR_SIGMA

    def __post_init__(self) -> None:
        for name in ("mean_bounds", "log_variance_bounds", "log_noise_bounds"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ValueError(f"{name} must be ordered, got ({lo}, {hi})")

    @property
    def dim(self) -> int:
        return len(self.lengthscale_mu)

    def lengthscale_log_prior(self, log_lengthscales: np.ndarray) -> float:
        """Normal log density of the log lengthscales, up to a constant."""
        centered = np.asarray(log_lengthscales) - np.asarray(self.lengthscale_mu)
        z = centered / self.lengthscale_sigma
        return -0.5 * float(z @ z)

    @classmethod
    def from_data(cls, data: Dataset, link: Link = Link.IDENTITY) -> "HyperpriorSpec":
        """Empirical hyperpriors from the observations seen so far.

        Raises:
            DegenerateDataError: If fewer than two observations are available or
                their empirical variance is numerically zero.
        """
        if data.size < 2:
            raise DegenerateDataError(f"need at least 2 observations, got {data.size}")
        y = np.asarray(apply_link(link, data.observations), dtype=float)
        nu = float(np.var(y))
        if not nu > DEGENERATE_VARIANCE:
            raise DegenerateDataError(f"degenerate data: observation variance {nu:.3g}")
        lo, hi = np.quantile(y, [0.05, 0.95])
        if not lo < hi:
            lo, hi = float(np.min(y)), float(np.max(y))
        log_nu = math.log(nu)
        return cls(
            mean_bounds=(float(lo), float(hi)),
            log_variance_bounds=(log_nu + math.log(0.1), log_nu + math.log(10.0)),
            log_noise_bounds=(log_nu + math.log(1e-9), log_nu + math.log(10.0)),
            lengthscale_mu=(LENGTHSCALE_PRIOR_MU,) * data.dim,
        )

    def decode(self, theta: np.ndarray, link: Link) -> GPHyperparams:
        """Map unconstrained coordinates to hyperparameters."""
        mean, log_var, log_noise = (
            _squash(theta[i], bounds)
            for i, bounds in enumerate(
                (self.mean_bounds, self.log_variance_bounds, self.log_noise_bounds)
            )
        )
        return GPHyperparams(
            mean_constant=float(mean),
            kernel=KernelSpec(math.exp(log_var), tuple(np.exp(theta[3:]).tolist())),
            noise_variance=math.exp(log_noise),
            link=link,
        )

    def encode(self, hyper: GPHyperparams) -> np.ndarray:
        values = (
            hyper.mean_constant,
            math.log(hyper.kernel.variance),
            math.log(max(hyper.noise_variance, 1e-300)),
        )
        bounds = (self.mean_bounds, self.log_variance_bounds, self.log_noise_bounds)
        head = [_unsquash(v, b) for v, b in zip(values, bounds, strict=True)]
        return np.concatenate([head, np.log(hyper.kernel.lengthscale_array)])

    def prior_center(self) -> np.ndarray:
        return np.concatenate([np.zeros(3), np.asarray(self.lengthscale_mu)])


def _squash(u: float, bounds: tuple[float, float]) -> float:
    lo, hi = bounds
    return lo + (hi - lo) * float(expit(u))


def _unsquash(value: float, bounds: tuple[float, float]) -> float:
    lo, hi = bounds
    p = np.clip((value - lo) / (hi - lo), 1e-6, 1.0 - 1e-6)
    return float(np.log(p / (1.0 - p)))


def _negative_log_posterior(
    theta: np.ndarray, points: np.ndarray, y: np.ndarray, prior: HyperpriorSpec
) -> tuple[float, np.ndarray]:
    """Negative (log marginal likelihood + log hyperprior) and its gradient."""
    n = y.shape[0]
    bounds = (prior.mean_bounds, prior.log_variance_bounds, prior.log_noise_bounds)
    squashed = expit(theta[:3])
    widths = np.array([hi - lo for lo, hi in bounds])
    mean, log_var, log_noise = (
        np.array([lo for lo, _ in bounds]) + widths * squashed
    ).tolist()
    log_ls = theta[3:]
    spec = KernelSpec(math.exp(log_var), tuple(np.exp(log_ls).tolist()))
    noise = math.exp(log_noise)

    K, dK_dls = kernel_hyper_grads(spec, points)
    gram = K + (noise + JITTER_START) * np.eye(n)
    try:
        chol = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError:
        return _FAILED, np.zeros_like(theta)
    resid = y - mean
    alpha = cho_solve((chol, True), resid)
    nll = 0.5 * resid @ alpha + np.sum(np.log(np.diag(chol))) + 0.5 * n * math.log(2 * math.pi)

    z = (log_ls - np.asarray(prior.lengthscale_mu)) / prior.lengthscale_sigma
    value = nll - prior.lengthscale_log_prior(log_ls)
    if not math.isfinite(value):
        return _FAILED, np.zeros_like(theta)

    # d nll / d param = -0.5 tr((alpha alpha^T - Lambda^-1) dK)
    inner = np.outer(alpha, alpha) - cho_solve((chol, True), np.eye(n))
    grad = np.empty_like(theta)
    d_mean = -float(np.sum(alpha))
    d_log_var = -0.5 * float(np.sum(inner * K))
    d_log_noise = -0.5 * noise * float(np.trace(inner))
    chain = widths * squashed * (1.0 - squashed)
    grad[:3] = chain * np.array([d_mean, d_log_var, d_log_noise])
    grad[3:] = -0.5 * np.einsum("ij,dij->d", inner, dK_dls)
    grad[3:] += z / prior.lengthscale_sigma
    return float(value), grad


def log_map_objective(hyper: GPHyperparams, data: Dataset, prior: HyperpriorSpec) -> float:
    """Log marginal likelihood plus log hyperprior density (up to a constant)."""
    y = np.asarray(apply_link(hyper, data.observations), dtype=float)
    value, _ = _negative_log_posterior(prior.encode(hyper), data.points, y, prior)
    return -value


def fit_map(
    data: Dataset,
    prior: HyperpriorSpec,
    seed: Seed,
    restarts: int = DEFAULT_MAP_RESTARTS,
    link: Link = Link.IDENTITY,
) -> GPHyperparams:
    """Maximize the log posterior over hyperparameters with multistart L-BFGS-B.

    Args:
        data: Observations in raw (pre-link) scale, at least two of them.
        prior: Hyperpriors, usually ``HyperpriorSpec.from_data(data, link)``.
        seed: Seed for the random restart locations.
        restarts: Number of starts; the first is always the prior center.
        link: Output link applied to the observations before fitting.

    Returns:
        The best hyperparameters found.

    Raises:
        DegenerateDataError: If no restart reaches a finite objective.
    """
    if data.size < 2:
        raise DegenerateDataError(f"need at least 2 observations, got {data.size}")
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    y = np.asarray(apply_link(link, data.observations), dtype=float)
    rng = make_rng(seed)
    n_params = 3 + prior.dim
    box = [(-_SIGMOID_LIMIT, _SIGMOID_LIMIT)] * 3 + [_LOG_LENGTHSCALE_LIMITS] * prior.dim

    starts = [prior.prior_center()]
    for _ in range(restarts - 1):
        start = np.empty(n_params)
        start[:3] = rng.normal(0.0, 1.5, size=3)
        start[3:] = rng.normal(prior.lengthscale_mu, prior.lengthscale_sigma)
        starts.append(np.clip(start, [b[0] for b in box], [b[1] for b in box]))

    best_theta, best_value = None, _FAILED
    for i, start in enumerate(starts):
        result = minimize(
            _negative_log_posterior,
            start,
            args=(data.points, y, prior),
            jac=True,
            method="L-BFGS-B",
            bounds=box,
        )
        if not np.isfinite(result.fun) or result.fun >= _FAILED:
            logger.debug("MAP restart %d failed: %s", i, result.message)
            continue
        if result.fun < best_value:
            best_theta, best_value = result.x, float(result.fun)

    if best_theta is None:
        raise DegenerateDataError("degenerate data: every MAP restart failed")
    return prior.decode(best_theta, link)


def default_hyperparams(
    dim: int, data: Dataset | None = None, link: Link = Link.IDENTITY
) -> GPHyperparams:
    """Prior medians, used before at least two distinct observations exist."""
    mean = 0.0
    if data is not None and data.size:
        mean = float(np.mean(apply_link(link, data.observations)))
    return GPHyperparams(
        mean_constant=mean,
        kernel=KernelSpec(1.0, (math.exp(LENGTHSCALE_PRIOR_MU),) * dim),
        noise_variance=1e-4,
        link=link,
    )


def fit_or_default(
    data: Dataset,
    seed: Seed,
    restarts: int = DEFAULT_MAP_RESTARTS,
    link: Link = Link.IDENTITY,
) -> GPHyperparams:
    """MAP fit when possible, prior medians otherwise."""
    try:
        prior = HyperpriorSpec.from_data(data, link)
        return fit_map(data, prior, seed, restarts=restarts, link=link)
    except DegenerateDataError as exc:
        logger.info("Falling back to default hyperparameters: %s", exc)
        return default_hyperparams(data.dim, data, link)
