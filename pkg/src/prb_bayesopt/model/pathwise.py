"""Pathwise posterior samples: random Fourier features plus a Matheron update."""

import math
from dataclasses import dataclass, field

import numpy as np

from prb_bayesopt.config import DEFAULT_NUM_FEATURES
from prb_bayesopt.model.kernel import kernel_grad, kernel_matrix
from prb_bayesopt.model.posterior import PosteriorGP
from prb_bayesopt.models import KernelSpec
from prb_bayesopt.seeding import Seed, make_rng

MATERN52_DOF = 5


@dataclass(frozen=True, eq=False)
class FeatureMap:
    """phi(x) = scale * cos(Omega x + b), a finite approximation of the kernel."""

    kernel: KernelSpec
    frequencies: np.ndarray = field(repr=False)  # (m, dim)
    phases: np.ndarray = field(repr=False)  # (m,)
    scale: float

    @property
    def num_features(self) -> int:
        return self.phases.shape[0]

    def features(self, xs: np.ndarray) -> np.ndarray:
        """Feature matrix of shape (len(xs), m)."""
        xs = np.atleast_2d(xs)
        return self.scale * np.cos(xs @ self.frequencies.T + self.phases)

    def features_grad(self, x: np.ndarray) -> np.ndarray:
        """Jacobian d phi(x) / dx of shape (m, dim)."""
        x = np.asarray(x, dtype=float).reshape(-1)
        sines = np.sin(self.frequencies @ x + self.phases)
        return -self.scale * sines[:, None] * self.frequencies


def build_feature_map(
    spec: KernelSpec, m: int = DEFAULT_NUM_FEATURES, seed: Seed = 0
) -> FeatureMap:
    """Sample frequencies from the Matérn-5/2 spectral density.

    Each frequency is a scaled multivariate t draw: omega = g sqrt(5 / u) / l with
    g ~ N(0, I) and u ~ chi-squared with 5 degrees of freedom.
    """
    if m < 1:
        raise ValueError(f"number of features must be >= 1, got {m}")
    rng = make_rng(seed)
    g = rng.standard_normal((m, spec.dim))
    u = rng.chisquare(MATERN52_DOF, size=m)
    frequencies = g * np.sqrt(MATERN52_DOF / u)[:, None] / spec.lengthscale_array
    phases = rng.uniform(0.0, 2.0 * math.pi, size=m)
    return FeatureMap(
        kernel=spec,
        frequencies=frequencies,
        phases=phases,
        scale=math.sqrt(2.0 * spec.variance / m),
    )


@dataclass(frozen=True, eq=False)
class PathwiseSample:
    """One approximate posterior draw f(x) = c + phi(x)^T w + k(x, X_t) v."""

    feature_map: FeatureMap
    posterior: PosteriorGP
    weights: np.ndarray = field(repr=False)
    noise_draw: np.ndarray = field(repr=False)
    correction: np.ndarray = field(repr=False)

    def __call__(self, xs: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(xs)
        values = self.posterior.hyperparams.mean_constant + self.feature_map.features(xs) @ (
            self.weights
        )
        if self.posterior.t:
            kernel = self.posterior.kernel
            values = values + kernel_matrix(kernel, xs, self.posterior.data.points) @ (
                self.correction
            )
        return values

    def gradient(self, x: np.ndarray) -> np.ndarray:
        grad = self.feature_map.features_grad(x).T @ self.weights
        if self.posterior.t:
            kernel = self.posterior.kernel
            grad = grad + kernel_grad(kernel, x, self.posterior.data.points).T @ self.correction
        return grad


def draw_path(gp: PosteriorGP, fmap: FeatureMap, seed: Seed) -> PathwiseSample:
    """Draw weights and noise, then apply Matheron's rule to condition on the data."""
    if fmap.kernel != gp.kernel:
        raise ValueError("feature map and posterior must share the same kernel")
    rng = make_rng(seed)
    weights = rng.standard_normal(fmap.num_features)
    noise = math.sqrt(gp.hyperparams.noise_variance) * rng.standard_normal(gp.t)
    if gp.t:
        prior_at_data = fmap.features(gp.data.points) @ weights
        residual = gp.targets - gp.hyperparams.mean_constant - prior_at_data - noise
        correction = gp.solve(residual)
    else:
        correction = np.empty(0)
    return PathwiseSample(fmap, gp, weights, noise, correction)


def eval_path(sample: PathwiseSample, x: np.ndarray) -> float:
    return float(sample(np.reshape(x, (1, -1)))[0])


def eval_path_grad(sample: PathwiseSample, x: np.ndarray) -> np.ndarray:
    return sample.gradient(np.asarray(x, dtype=float).reshape(-1))
