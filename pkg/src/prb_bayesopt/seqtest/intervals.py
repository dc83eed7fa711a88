"""Confidence intervals for Bernoulli and bounded means."""

import math

import numpy as np
from scipy.special import betainc, betaincinv, betaln

from prb_bayesopt.models import ConfidenceInterval, IntervalMethod

QUANTILE_TOLERANCE = 1e-10


def beta_quantile(q: float, a: float, b: float) -> float:
    """Inverse regularized incomplete beta, polished with Newton steps."""
    if q <= 0.0:
        return 0.0
    if q >= 1.0:
        return 1.0
    x = float(betaincinv(a, b, q))
    log_norm = betaln(a, b)
    for _ in range(20):
        if not 0.0 < x < 1.0:
            break
        density = math.exp((a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - log_norm)
        if not density > 0.0 or not math.isfinite(density):
            break
        step = (float(betainc(a, b, x)) - q) / density
        candidate = min(max(x - step, 0.5 * x), x + 0.5 * (1.0 - x))
        if abs(candidate - x) < QUANTILE_TOLERANCE * 1e-2:
            x = candidate
            break
        x = candidate
    return x


def _validate(k: int, n: int, delta: float) -> None:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in [0, n={n}], got {k}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")


def clopper_pearson(k: int, n: int, delta: float) -> ConfidenceInterval:
    """Exact binomial interval [B(delta/2; k, n-k+1), B(1-delta/2; k+1, n-k)]."""
    _validate(k, n, delta)
    lo = 0.0 if k == 0 else beta_quantile(delta / 2.0, k, n - k + 1)
    hi = 1.0 if k == n else beta_quantile(1.0 - delta / 2.0, k + 1, n - k)
    return ConfidenceInterval(lo, hi, IntervalMethod.CLOPPER_PEARSON, delta)


def jeffreys_interval(k: int, n: int, delta: float) -> ConfidenceInterval:
    """Equal-tailed quantiles of the Beta(k + 1/2, n - k + 1/2) posterior."""
    _validate(k, n, delta)
    a, b = k + 0.5, n - k + 0.5
    lo = beta_quantile(delta / 2.0, a, b)
    hi = beta_quantile(1.0 - delta / 2.0, a, b)
    return ConfidenceInterval(lo, hi, IntervalMethod.JEFFREYS, delta)


def bernstein_half_width(std: float, n: int, delta: float, span: float = 1.0) -> float:
    log_term = math.log(3.0 / delta)
    return std * math.sqrt(2.0 * log_term / n) + 3.0 * span * log_term / n


def empirical_bernstein(
    values, delta: float, lower: float = 0.0, upper: float = 1.0
) -> ConfidenceInterval:
    """Mean +/- S sqrt(2 log(3/delta) / n) + 3 (b - a) log(3/delta) / n, clipped to [a, b]."""
    values = np.asarray(values, dtype=float).reshape(-1)
    n = values.shape[0]
    if n < 1:
        raise ValueError("empirical_bernstein needs at least one value")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if np.any(values < lower) or np.any(values > upper):
        raise ValueError(f"values must lie in [{lower}, {upper}]")
    mean = float(np.mean(values))
    half = bernstein_half_width(float(np.std(values)), n, delta, upper - lower)
    return ConfidenceInterval(
        max(lower, mean - half),
        min(upper, mean + half),
        IntervalMethod.EMPIRICAL_BERNSTEIN,
        delta,
    )


def bernoulli_interval(
    method: IntervalMethod, k: int, n: int, delta: float
) -> ConfidenceInterval:
    """Interval for a Bernoulli mean from its success count."""
    match IntervalMethod(method):
        case IntervalMethod.CLOPPER_PEARSON:
            return clopper_pearson(k, n, delta)
        case IntervalMethod.JEFFREYS:
            return jeffreys_interval(k, n, delta)
        case IntervalMethod.EMPIRICAL_BERNSTEIN:
            _validate(k, n, delta)
            p = k / n
            half = bernstein_half_width(math.sqrt(p * (1.0 - p)), n, delta)
            return ConfidenceInterval(
                max(0.0, p - half), min(1.0, p + half), IntervalMethod.EMPIRICAL_BERNSTEIN, delta
            )
