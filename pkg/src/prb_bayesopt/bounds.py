"""Computable diagnostics for how likely and how large the simple regret can be.

These are the quantities behind the stopping guarantees: a Gaussian tail bound
on the supremum of a centered process, a chaining bound on its expectation, a
bound on posterior variance after covering the domain, and the geometry
(fill distance and canonical pseudo-metric) the bounds are stated in.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from prb_bayesopt.model.posterior import PosteriorGP, posterior_cov

MAX_GRID_DIM = 3


@dataclass(frozen=True)
class BoundInputs:
    """Inputs shared by the regret diagnostics; all nonnegative."""

    epsilon: float
    expected_sup: float
    sigma_max: float
    lipschitz_k: float = 0.0
    dim: int = 1
    edge: float = 1.0
    cover_radius: float = 0.0
    noise_variance: float = 0.0

    def __post_init__(self) -> None:
        for name in (
            "epsilon",
            "expected_sup",
            "sigma_max",
            "lipschitz_k",
            "edge",
            "cover_radius",
            "noise_variance",
        ):
            value = getattr(self, name)
            if not value >= 0.0:
                raise ValueError(f"{name} must be nonnegative, got {value}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")


def borell_tis_tail(inputs: BoundInputs) -> float:
    """Upper bound on P(sup g >= epsilon) for a centered process with sup sd sigma_max.

    exp(-1/2 ((epsilon - E[sup g]) / (2 sigma_max))^2).

    Raises:
        ValueError: If epsilon is below E[sup g] or sigma_max is not positive.
    """
    if inputs.sigma_max <= 0.0:
        raise ValueError("borell_tis_tail needs sigma_max > 0")
    gap = inputs.epsilon - inputs.expected_sup
    if gap < 0.0:
        raise ValueError(
            f"epsilon {inputs.epsilon} is below the expected supremum {inputs.expected_sup}"
        )
    return math.exp(-0.5 * (gap / (2.0 * inputs.sigma_max)) ** 2)


def expected_sup_bound(sigma: float, dim: int, lipschitz_k: float, edge: float) -> float:
    """Chaining bound 12 sigma sqrt(2D + D log(1 + 4 L_k r / sigma^2)) on E[sup g]."""
    if sigma <= 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return 12.0 * sigma * math.sqrt(
        2.0 * dim + dim * math.log1p(4.0 * lipschitz_k * edge / sigma**2)
    )


def variance_contraction_bound(
    x_variance: float, lipschitz_k: float, noise_variance: float, eps_cov: float, dim: int
) -> float:
    """Bound on k_t(x, x) once the data form an eps_cov-cover of the cube.

    With rho = eps^eps and eta = max(1, rho / (4 eps))^D the bound is
    ((4 L rho k - L^2 rho^2) eta + gamma^2 k) / ((k + 2 L rho) eta + gamma^2),
    clamped to [0, k]. eps_cov = 0 takes the eta -> infinity limit. The bound
    is loose for small eps_cov because rho tends to 1 there.

    Raises:
        ValueError: If L_k is not positive or eps_cov lies outside
            [0, min(1, k(x, x) / L_k)] (the cover radius is too large).
    """
    k = x_variance
    if lipschitz_k <= 0.0:
        raise ValueError(f"lipschitz_k must be positive, got {lipschitz_k}")
    if k < 0.0 or noise_variance < 0.0:
        raise ValueError("variances must be nonnegative")
    if not 0.0 <= eps_cov <= min(1.0, k / lipschitz_k):
        raise ValueError(
            f"cover radius too large: eps_cov={eps_cov} exceeds min(1, k/L_k)"
        )
    rho = eps_cov**eps_cov
    lead = 4.0 * lipschitz_k * rho * k - (lipschitz_k * rho) ** 2
    if eps_cov == 0.0:
        kappa = lead / (k + 2.0 * lipschitz_k * rho)
    else:
        eta = max(1.0, rho / (4.0 * eps_cov)) ** dim
        numerator = lead * eta + noise_variance * k
        denominator = (k + 2.0 * lipschitz_k * rho) * eta + noise_variance
        kappa = numerator / denominator
    return min(max(kappa, 0.0), k)


def unit_grid(dim: int, resolution: int) -> np.ndarray:
    """Regular grid of resolution**dim points covering [0, 1]^dim, corners included."""
    axis = np.linspace(0.0, 1.0, resolution)
    return np.array(list(itertools.product(axis, repeat=dim)))


def fill_distance(points: np.ndarray, resolution: int) -> float:
    """Grid approximation of max_x min_i ||x - x_i||_inf over the unit cube.

    Raises:
        ValueError: If ``points`` is empty, the grid is coarser than 2 per axis,
            or the dimension is above 3.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] == 0 or points.size == 0:
        raise ValueError("fill_distance needs at least one point")
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    dim = points.shape[1]
    if dim > MAX_GRID_DIM:
        raise ValueError(f"fill_distance is grid-approximated only for D <= {MAX_GRID_DIM}")
    distances = cdist(unit_grid(dim, resolution), points, metric="chebyshev")
    return float(np.max(np.min(distances, axis=1)))


def pseudo_metric(gp: PosteriorGP, x: np.ndarray, x_prime: np.ndarray) -> float:
    """Canonical pseudo-metric sqrt(k_t(x, x) - 2 k_t(x, x') + k_t(x', x')), clamped at 0."""
    cov = posterior_cov(gp, np.vstack([np.reshape(x, (1, -1)), np.reshape(x_prime, (1, -1))]))
    return math.sqrt(max(cov[0, 0] - 2.0 * cov[0, 1] + cov[1, 1], 0.0))


def sup_posterior_sd(gp: PosteriorGP, resolution: int) -> float:
    """sigma_t = max_x sqrt(k_t(x, x)) approximated on a grid (D <= 3)."""
    if gp.dim > MAX_GRID_DIM:
        raise ValueError(f"sup_posterior_sd is grid-approximated only for D <= {MAX_GRID_DIM}")
    return float(np.sqrt(np.max(gp.variance(unit_grid(gp.dim, resolution)))))
