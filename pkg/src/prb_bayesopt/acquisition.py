"""In-sample knowledge gradient acquisition."""

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss
from scipy.special import expit, ndtr

from prb_bayesopt.config import DEFAULT_QUADRATURE_NODES
from prb_bayesopt.errors import ConditionedVarianceError
from prb_bayesopt.model.posterior import PosteriorGP, is_degenerate
from prb_bayesopt.models import Link
from prb_bayesopt.sample_opt import OptimizerConfig, ScalarField, maximize
from prb_bayesopt.seeding import Seed

_NORMAL_PDF = 1.0 / math.sqrt(2.0 * math.pi)
# normal mass beyond |z| = 8 is below 1e-15
Z_RANGE = 8.0


@dataclass(frozen=True)
class ISKGConfig:
    """Quadrature order and the multistart budget for maximizing the acquisition.

    Under the identity link the expectation is closed form when ``exact_identity``
    is set and a kink-split Gauss-Legendre rule of ``quadrature_nodes`` otherwise.
    """

    quadrature_nodes: int = DEFAULT_QUADRATURE_NODES
    optimizer: OptimizerConfig = field(
        default_factory=lambda: OptimizerConfig(random_search_points=512, num_starts=4)
    )
    exact_identity: bool = True

    def __post_init__(self) -> None:
        if self.quadrature_nodes < 2:
            raise ValueError(f"quadrature_nodes must be >= 2, got {self.quadrature_nodes}")


@dataclass(frozen=True, eq=False)
class FantasyMoments:
    support_means: np.ndarray  # means at X_t and x after the fantasy
    query_mean: float
    query_variance: float


def standard_normal_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Hermite nodes and weights for E[h(Z)], Z ~ N(0, 1)."""
    nodes, weights = hermgauss(order)
    return math.sqrt(2.0) * nodes, weights / math.sqrt(math.pi)


def fantasy_moments(
    gp: PosteriorGP, x: np.ndarray, z: float, query: np.ndarray
) -> FantasyMoments:
    """Moments after observing y(x) = mu(x) + sqrt(k(x, x) + noise) z.

    mu_{t+1}(.) = mu_t(.) + k_t(., x) z / sqrt(k_t(x, x) + noise) and
    k_{t+1}(q, q) = k_t(q, q) - k_t(q, x)^2 / (k_t(x, x) + noise).

    Raises:
        ConditionedVarianceError: If k_t(x, x) + noise is zero.
    """
    x = np.reshape(x, (1, -1))
    query = np.reshape(query, (1, -1))
    total = float(gp.variance(x)[0]) + gp.hyperparams.noise_variance
    if is_degenerate(total):
        raise ConditionedVarianceError("zero predictive variance at the fantasy point")
    scale = math.sqrt(total)
    support = np.vstack([gp.data.points, x])
    support_means = gp.mean(support) + gp.cross_cov(support, x)[:, 0] * z / scale
    cross_q = float(gp.cross_cov(query, x)[0, 0])
    return FantasyMoments(
        support_means=support_means,
        query_mean=float(gp.mean(query)[0]) + cross_q * z / scale,
        query_variance=max(float(gp.variance(query)[0]) - cross_q**2 / total, 0.0),
    )


def upper_envelope(
    intercepts: np.ndarray, slopes: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Lines a_i + b_i z on the upper envelope, left to right.

    Returns their intercepts, slopes, and the breakpoints between them, with
    -inf and inf at the ends (one more breakpoint than lines).
    """
    order = np.lexsort((intercepts, slopes))
    a, b = intercepts[order], slopes[order]
    # equal slopes: only the largest intercept can be on the envelope
    keep = np.append(b[1:] != b[:-1], True)
    a, b = a[keep], b[keep]

    lines, breaks = [0], [-math.inf]
    for i in range(1, a.shape[0]):
        while True:
            j = lines[-1]
            cross = (a[j] - a[i]) / (b[i] - b[j])
            if len(lines) > 1 and cross <= breaks[-1]:
                lines.pop()
                breaks.pop()
                continue
            break
        lines.append(i)
        breaks.append(cross)
    breaks.append(math.inf)
    idx = np.array(lines)
    return a[idx], b[idx], np.array(breaks)


def expected_max_of_lines(intercepts: np.ndarray, slopes: np.ndarray) -> float:
    """E[max_i (a_i + b_i Z)] for Z ~ N(0, 1), integrated over the upper envelope."""
    a, b, c = upper_envelope(intercepts, slopes)
    cdf = ndtr(c)
    pdf = _NORMAL_PDF * np.exp(-0.5 * c * c)
    return float(np.sum(a * np.diff(cdf) - b * np.diff(pdf)))


def expected_max_of_lines_quadrature(
    intercepts: np.ndarray, slopes: np.ndarray, order: int
) -> float:
    """E[max_i (a_i + b_i Z)] with an ``order``-node Gauss-Legendre rule per envelope piece.

    Each piece is linear times the normal density, so splitting at the kinks
    keeps the rule accurate; pieces are truncated to |z| <= Z_RANGE.
    """
    a, b, c = upper_envelope(intercepts, slopes)
    lo = np.clip(c[:-1], -Z_RANGE, Z_RANGE)
    hi = np.clip(c[1:], -Z_RANGE, Z_RANGE)
    nodes, weights = leggauss(order)
    half, mid = 0.5 * (hi - lo), 0.5 * (hi + lo)
    z = mid[:, None] + half[:, None] * nodes  # (pieces, order)
    integrand = (a[:, None] + b[:, None] * z) * _NORMAL_PDF * np.exp(-0.5 * z * z)
    return float(np.sum(half * (integrand @ weights)))


def _logit_means(means: np.ndarray, variances: np.ndarray, nodes, weights) -> np.ndarray:
    """E[sigmoid(f)] for f ~ N(mean, var), elementwise."""
    latent = means[..., None] + np.sqrt(np.maximum(variances, 0.0))[..., None] * nodes
    return expit(latent) @ weights


def iskg_values(gp: PosteriorGP, xs: np.ndarray, cfg: ISKGConfig) -> np.ndarray:
    """In-sample knowledge gradient at each row of ``xs``.

    E_z[max over X_t and x of nu_{t+1}] - max over X_t of nu_t, where nu is the
    posterior mean under the identity link and E[g^-1(f)] under the logit link.
    """
    if gp.t < 1:
        raise ValueError("the in-sample knowledge gradient needs at least one observation")
    xs = np.atleast_2d(xs)
    noise = gp.hyperparams.noise_variance
    data = gp.data.points
    data_mean, data_var = gp.moments(data)
    cand_mean, cand_var = gp.moments(xs)
    cross = gp.cross_cov(data, xs)  # (t, n)
    nodes, weights = standard_normal_rule(cfg.quadrature_nodes)
    logit = gp.hyperparams.link is Link.LOGIT
    current_nu = _logit_means(data_mean, data_var, nodes, weights) if logit else data_mean
    current = float(np.max(current_nu))

    out = np.zeros(xs.shape[0])
    for j in range(xs.shape[0]):
        total = cand_var[j] + noise
        if is_degenerate(total):
            continue
        intercepts = np.append(data_mean, cand_mean[j])
        slopes = np.append(cross[:, j], cand_var[j]) / math.sqrt(total)
        if logit:
            variances = np.maximum(np.append(data_var, cand_var[j]) - slopes**2, 0.0)
            shifted = intercepts[:, None] + slopes[:, None] * nodes  # (t + 1, Q)
            fantasy_var = np.broadcast_to(variances, shifted.T.shape)
            nu = _logit_means(shifted.T, fantasy_var, nodes, weights)
            expected = float(np.max(nu, axis=1) @ weights)
        elif cfg.exact_identity:
            expected = expected_max_of_lines(intercepts, slopes)
        else:
            expected = expected_max_of_lines_quadrature(
                intercepts, slopes, cfg.quadrature_nodes
            )
        out[j] = max(expected - current, 0.0)
    return out


def iskg_value(gp: PosteriorGP, x: np.ndarray, cfg: ISKGConfig | None = None) -> float:
    return float(iskg_values(gp, np.reshape(x, (1, -1)), cfg or ISKGConfig())[0])


def select_query(gp: PosteriorGP, cfg: ISKGConfig, seed: Seed) -> tuple[np.ndarray, float]:
    """Maximize the acquisition over the cube; returns the point and its value."""
    acquisition = ScalarField(lambda xs: iskg_values(gp, xs, cfg), gp.dim)
    result = maximize(acquisition, cfg.optimizer, seed)
    return result.argmax, result.maximum
