"""Multistart maximization of deterministic scalar fields on the unit hypercube."""

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from prb_bayesopt.config import (
    DEFAULT_GRADIENT_TOLERANCE,
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_NUM_STARTS,
    DEFAULT_RANDOM_SEARCH_POINTS,
)
from prb_bayesopt.errors import NonFiniteValueError
from prb_bayesopt.seeding import Seed, make_rng


@dataclass(frozen=True)
class OptimizerConfig:
    """Random search budget and quasi-Newton settings."""

    random_search_points: int = DEFAULT_RANDOM_SEARCH_POINTS
    num_starts: int = DEFAULT_NUM_STARTS
    gradient_tolerance: float = DEFAULT_GRADIENT_TOLERANCE
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    chunk_size: int = 256

    def __post_init__(self) -> None:
        for name in (
            "random_search_points",
            "num_starts",
            "gradient_tolerance",
            "max_iterations",
            "chunk_size",
        ):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class ScalarField:
    """A function on [0, 1]^dim evaluated in batches, with an optional gradient.

    ``values`` maps an (n, dim) array to n values; ``gradient`` maps one point
    to its dim-vector gradient. Without a gradient the refinement stage falls
    back to finite differences.
    """

    values: Callable[[np.ndarray], np.ndarray]
    dim: int
    gradient: Callable[[np.ndarray], np.ndarray] | None = None

    def value(self, x: np.ndarray) -> float:
        return float(self.values(np.reshape(x, (1, -1)))[0])


@dataclass(frozen=True, eq=False)
class SearchResult:
    argmax: np.ndarray
    maximum: float
    evaluations: int


@dataclass(frozen=True, eq=False)
class GapSearch:
    """Outcome of a search for a point beating ``baseline`` by more than epsilon."""

    exceeded: bool
    baseline: float
    evaluations: int
    witness: np.ndarray | None = field(default=None, repr=False)
    witness_value: float | None = None

    def __bool__(self) -> bool:
        return self.exceeded


class _GapFound(Exception):
    def __init__(self, point: np.ndarray, value: float) -> None:
        super().__init__(value)
        self.point = point
        self.value = value


class _Tracker:
    """Counts evaluations, keeps the best point, and fires the early exit."""

    def __init__(self, threshold: float | None) -> None:
        self.threshold = threshold
        self.evaluations = 0
        self.best_x: np.ndarray | None = None
        self.best_value = -math.inf

    def observe(self, xs: np.ndarray, values: np.ndarray) -> None:
        self.evaluations += len(values)
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise NonFiniteValueError(f"non-finite value {values[bad]} at {xs[bad].tolist()}")
        if self.threshold is not None:
            hits = np.flatnonzero(values > self.threshold)
            if hits.size:
                i = int(hits[0])
                raise _GapFound(xs[i].copy(), float(values[i]))
        i = int(np.argmax(values))
        if values[i] > self.best_value:
            self.best_x, self.best_value = xs[i].copy(), float(values[i])


def sobol_points(n: int, dim: int, seed: Seed) -> np.ndarray:
    """First ``n`` points of a scrambled Sobol sequence on [0, 1]^dim."""
    sampler = qmc.Sobol(d=dim, scramble=True, rng=make_rng(seed))
    return sampler.random_base2(max(0, math.ceil(math.log2(n))))[:n]


def _refine(fn: ScalarField, x0: np.ndarray, cfg: OptimizerConfig, tracker: _Tracker) -> None:
    def objective(x: np.ndarray):
        x = np.clip(x, 0.0, 1.0)
        value = fn.values(x[None, :])
        tracker.observe(x[None, :], value)
        if fn.gradient is None:
            return -float(value[0])
        return -float(value[0]), -np.asarray(fn.gradient(x), dtype=float)

    minimize(
        objective,
        x0,
        jac=fn.gradient is not None,
        method="L-BFGS-B",
        bounds=[(0.0, 1.0)] * fn.dim,
        options={"maxiter": cfg.max_iterations, "gtol": cfg.gradient_tolerance},
    )


def _search(fn: ScalarField, cfg: OptimizerConfig, seed: Seed, tracker: _Tracker) -> None:
    candidates = sobol_points(cfg.random_search_points, fn.dim, seed)
    values = np.empty(candidates.shape[0])
    for start in range(0, candidates.shape[0], cfg.chunk_size):
        chunk = candidates[start : start + cfg.chunk_size]
        chunk_values = np.asarray(fn.values(chunk), dtype=float)
        tracker.observe(chunk, chunk_values)
        values[start : start + chunk.shape[0]] = chunk_values

    for index in np.argsort(-values, kind="stable")[: cfg.num_starts]:
        _refine(fn, candidates[index], cfg, tracker)


def maximize(fn: ScalarField, cfg: OptimizerConfig, seed: Seed) -> SearchResult:
    """Random search on a Sobol sequence, then L-BFGS-B from the best candidates.

    The result is the best point evaluated anywhere, so it never falls below
    the best random-search point.

    Raises:
        NonFiniteValueError: If ``fn`` returns a non-finite value.
    """
    tracker = _Tracker(threshold=None)
    _search(fn, cfg, seed, tracker)
    assert tracker.best_x is not None
    return SearchResult(tracker.best_x, tracker.best_value, tracker.evaluations)


def exceeds_gap(
    fn: ScalarField, x0: np.ndarray, epsilon: float, cfg: OptimizerConfig, seed: Seed
) -> GapSearch:
    """Search for x with fn(x) - fn(x0) > epsilon, stopping at the first one found.

    A positive answer carries the witness point; a negative answer is only as
    good as ``maximize`` with the same seed, whose trajectory it follows.
    """
    baseline = fn.value(x0)
    if not math.isfinite(baseline):
        raise NonFiniteValueError(f"non-finite value {baseline} at {np.ravel(x0).tolist()}")
    threshold = baseline + epsilon
    if not math.isfinite(threshold):
        return GapSearch(exceeded=False, baseline=baseline, evaluations=1)
    tracker = _Tracker(threshold=threshold)
    try:
        _search(fn, cfg, seed, tracker)
    except _GapFound as hit:
        return GapSearch(
            exceeded=True,
            baseline=baseline,
            evaluations=tracker.evaluations + 1,
            witness=hit.point,
            witness_value=hit.value,
        )
    return GapSearch(exceeded=False, baseline=baseline, evaluations=tracker.evaluations + 1)
