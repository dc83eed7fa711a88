"""Shared test fixtures."""

import duckdb
import numpy as np
import pytest

from prb_bayesopt.acquisition import ISKGConfig
from prb_bayesopt.harness.objectives import Objective
from prb_bayesopt.harness.records import RunRecord, StepEntry
from prb_bayesopt.harness.replay import ReplayResult
from prb_bayesopt.harness.schema import ensure_schema
from prb_bayesopt.model.posterior import PosteriorGP
from prb_bayesopt.models import Dataset, GPHyperparams, KernelSpec, Link
from prb_bayesopt.sample_opt import OptimizerConfig

FAST_OPTIMIZER = OptimizerConfig(random_search_points=256, num_starts=2, max_iterations=50)
FAST_ISKG = ISKGConfig(
    optimizer=OptimizerConfig(random_search_points=128, num_starts=2, max_iterations=30)
)
FAST_FEATURES = 256


@pytest.fixture
def db_conn():
    """In-memory DuckDB connection with schema initialized."""
    conn = duckdb.connect(":memory:")
    ensure_schema(conn)
    yield conn
    conn.close()


@pytest.fixture
def posterior() -> PosteriorGP:
    """1D posterior after 8 evenly spread observations of sin(6x)."""
    return make_posterior()


def make_hyperparams(
    dim: int = 1,
    lengthscale: float = 0.2,
    variance: float = 1.0,
    noise: float = 1e-4,
    mean: float = 0.0,
    link: Link = Link.IDENTITY,
) -> GPHyperparams:
    """Helper to create hyperparameters with equal lengthscales."""
    return GPHyperparams(mean, KernelSpec(variance, (lengthscale,) * dim), noise, link)


def sine_values(points: np.ndarray) -> np.ndarray:
    return np.sum(np.sin(6.0 * np.atleast_2d(points)), axis=1)


def make_dataset(n: int = 8, dim: int = 1, seed: int = 0) -> Dataset:
    """Evenly spread points in 1D, uniform random ones otherwise; y = sum sin(6 x)."""
    if dim == 1:
        points = np.linspace(0.05, 0.95, n).reshape(-1, 1)
    else:
        points = np.random.default_rng(seed).uniform(size=(n, dim))
    return Dataset(points, sine_values(points))


def make_posterior(
    n: int = 8,
    dim: int = 1,
    noise: float = 1e-4,
    lengthscale: float = 0.2,
    link: Link = Link.IDENTITY,
) -> PosteriorGP:
    hyper = make_hyperparams(dim, lengthscale, noise=noise, link=link)
    return PosteriorGP.from_data(hyper, make_dataset(n, dim))


def make_quadratic_objective(dim: int = 1, center: float = 0.3) -> Objective:
    """f(x) = -||x - center||^2, maximized at center with optimum 0."""
    maximizer = np.full(dim, center)

    def evaluate(xs: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(xs)
        return -np.sum((xs - maximizer) ** 2, axis=1)

    return Objective("quadratic", dim, evaluate, 0.0, maximizer=maximizer)


def make_record(
    objective: Objective | None = None,
    budget: int = 8,
    initial_design: int = 3,
    seed: int = 0,
    points: np.ndarray | None = None,
    acq_values: list[float | None] | None = None,
) -> RunRecord:
    """A complete run record without running BO: given or random queries, logged model."""
    objective = objective or make_quadratic_objective()
    if points is None:
        points = np.random.default_rng(seed).uniform(size=(budget, objective.dim))
    hyper = make_hyperparams(objective.dim, lengthscale=0.3).to_dict()
    record = RunRecord(
        run_id=f"{objective.name}_{objective.dim}d_seed{seed}",
        seed=seed,
        objective=objective.name,
        dim=objective.dim,
        noise_variance=objective.noise_variance,
        budget=budget,
        initial_design=initial_design,
    )
    values = objective.evaluate(points)
    for t in range(1, budget + 1):
        x = tuple(points[t - 1].tolist())
        if t < initial_design:
            record.steps.append(StepEntry(t, x, float(values[t - 1])))
            continue
        best = points[int(np.argmax(values[:t]))]
        acq = acq_values[t - 1] if acq_values is not None else (None if t == budget else 1.0)
        record.steps.append(
            StepEntry(
                t,
                x,
                float(values[t - 1]),
                hyperparams=dict(hyper),
                incumbent=tuple(best.tolist()),
                acq_value=acq,
            )
        )
    return record


def make_replay_result(
    run_id: str = "gp_2d_noise1e-06_seed0",
    rule: str = "prb",
    objective: str = "gp",
    dim: int = 2,
    noise: float = 1e-6,
    stop_step: int = 12,
    regret: float = 0.01,
    epsilon: float = 0.1,
    terminated: bool = True,
) -> ReplayResult:
    """Helper to create a ReplayResult with unique fields."""
    return ReplayResult(
        run_id=run_id,
        rule=rule,
        objective=objective,
        dim=dim,
        noise=noise,
        seed=0,
        epsilon=epsilon,
        stop_step=stop_step,
        terminated=terminated,
        returned_point=(0.25,) * dim,
        regret=regret,
        success=regret <= epsilon,
    )
