"""Exact Gaussian-process posterior with a cached Cholesky factorization."""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from tenacity import (
    Retrying,
    before_sleep_log,
    retry_if_exception_type,
    stop_after_attempt,
)

from prb_bayesopt.config import DEGENERATE_VARIANCE, JITTER_MAX, JITTER_START
from prb_bayesopt.errors import IllConditionedError
from prb_bayesopt.model.kernel import kernel_diag, kernel_grad, kernel_matrix
from prb_bayesopt.model.link import apply_link
from prb_bayesopt.models import Dataset, GPHyperparams, KernelSpec

logger = logging.getLogger(__name__)

# 0, then 1e-10, 1e-9, ... up to 1e-6
JITTER_LADDER = (0.0, *np.geomspace(JITTER_START, JITTER_MAX, 5).tolist())


def cholesky_with_jitter(matrix: np.ndarray) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of ``matrix``, adding diagonal jitter on failure.

    Raises:
        IllConditionedError: If the largest jitter still leaves the matrix
            numerically indefinite.
    """
    if not np.all(np.isfinite(matrix)):
        raise IllConditionedError("kernel matrix has non-finite entries")
    eye = np.eye(matrix.shape[0])
    try:
        for attempt in Retrying(
            stop=stop_after_attempt(len(JITTER_LADDER)),
            retry=retry_if_exception_type(np.linalg.LinAlgError),
            before_sleep=before_sleep_log(logger, logging.DEBUG),
            reraise=True,
        ):
            with attempt:
                jitter = JITTER_LADDER[attempt.retry_state.attempt_number - 1]
                chol = np.linalg.cholesky(matrix + jitter * eye)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError(
            f"kernel matrix is not positive definite with jitter {JITTER_MAX:g}"
        ) from exc
    if jitter > 0.0:
        logger.debug("Cholesky needed jitter %.1e on a %d x %d matrix", jitter, *matrix.shape)
    return chol, jitter


@dataclass(frozen=True, eq=False)
class PosteriorGP:
    """GP conditioned on a dataset; latent-space targets are cached at construction."""

    hyperparams: GPHyperparams
    data: Dataset
    targets: np.ndarray = field(repr=False)
    chol_lambda: np.ndarray = field(repr=False)
    alpha: np.ndarray = field(repr=False)
    jitter: float = 0.0

    @classmethod
    def from_data(cls, hyperparams: GPHyperparams, data: Dataset) -> "PosteriorGP":
        if data.size and data.dim != hyperparams.dim:
            raise ValueError(
                f"data has dimension {data.dim} but the kernel has {hyperparams.dim}"
            )
        targets = np.asarray(apply_link(hyperparams, data.observations), dtype=float)
        if data.size == 0:
            empty = np.empty((0, 0))
            return cls(hyperparams, data, targets, empty, np.empty(0))
        gram = kernel_matrix(hyperparams.kernel, data.points, data.points)
        gram[np.diag_indices_from(gram)] += hyperparams.noise_variance
        chol, jitter = cholesky_with_jitter(gram)
        alpha = cho_solve((chol, True), targets - hyperparams.mean_constant)
        return cls(hyperparams, data, targets, chol, alpha, jitter)

    @classmethod
    def prior(cls, hyperparams: GPHyperparams) -> "PosteriorGP":
        return cls.from_data(hyperparams, Dataset.empty(hyperparams.dim))

    @property
    def kernel(self) -> KernelSpec:
        return self.hyperparams.kernel

    @property
    def t(self) -> int:
        return self.data.size

    @property
    def dim(self) -> int:
        return self.hyperparams.dim

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Lambda^-1 rhs."""
        return cho_solve((self.chol_lambda, True), rhs)

    def _whitened(self, xs: np.ndarray) -> np.ndarray:
        """L^-1 k(X_t, xs)."""
        cross = kernel_matrix(self.kernel, self.data.points, xs)
        return solve_triangular(self.chol_lambda, cross, lower=True)

    def mean(self, xs: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(xs)
        if self.t == 0:
            return np.full(xs.shape[0], self.hyperparams.mean_constant)
        cross = kernel_matrix(self.kernel, xs, self.data.points)
        return self.hyperparams.mean_constant + cross @ self.alpha

    def variance(self, xs: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(xs)
        prior = kernel_diag(self.kernel, xs)
        if self.t == 0:
            return prior
        v = self._whitened(xs)
        return np.clip(prior - np.sum(v * v, axis=0), 0.0, prior)

    def moments(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.mean(xs), self.variance(xs)

    def cross_cov(self, xs: np.ndarray, zs: np.ndarray) -> np.ndarray:
        """Posterior covariance k_t(xs, zs)."""
        xs, zs = np.atleast_2d(xs), np.atleast_2d(zs)
        prior = kernel_matrix(self.kernel, xs, zs)
        if self.t == 0:
            return prior
        return prior - self._whitened(xs).T @ self._whitened(zs)

    def mean_grad(self, x: np.ndarray) -> np.ndarray:
        if self.t == 0:
            return np.zeros(self.dim)
        return kernel_grad(self.kernel, x, self.data.points).T @ self.alpha

    def variance_grad(self, x: np.ndarray) -> np.ndarray:
        if self.t == 0:
            return np.zeros(self.dim)
        x = np.asarray(x, dtype=float).reshape(1, -1)
        weights = self.solve(kernel_matrix(self.kernel, self.data.points, x)[:, 0])
        return -2.0 * kernel_grad(self.kernel, x[0], self.data.points).T @ weights

    def condition_on(self, point: np.ndarray, observation: float) -> "PosteriorGP":
        """Posterior after one more raw observation, hyperparameters unchanged."""
        return PosteriorGP.from_data(self.hyperparams, self.data.append(point, observation))


def posterior_moments(gp: PosteriorGP, x: np.ndarray) -> tuple[float, float]:
    """Posterior mean and variance at a single point."""
    mean, var = gp.moments(np.reshape(x, (1, -1)))
    return float(mean[0]), float(var[0])


def posterior_cov(gp: PosteriorGP, xs: np.ndarray) -> np.ndarray:
    """Symmetric posterior covariance matrix k_t(xs, xs)."""
    xs = np.atleast_2d(xs)
    if xs.shape[0] == 0:
        raise ValueError("posterior_cov needs at least one point")
    cov = gp.cross_cov(xs, xs)
    cov = 0.5 * (cov + cov.T)
    diag = np.diag_indices_from(cov)
    cov[diag] = np.maximum(cov[diag], 0.0)
    return cov


def is_degenerate(variance: float) -> bool:
    return variance <= DEGENERATE_VARIANCE
