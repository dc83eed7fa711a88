"""Benchmark objectives on the unit cube, in the maximization convention."""

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from prb_bayesopt.config import DEFAULT_NUM_FEATURES, OBJECTIVE_DEFAULTS
from prb_bayesopt.model.pathwise import build_feature_map, draw_path
from prb_bayesopt.model.posterior import PosteriorGP
from prb_bayesopt.models import GPHyperparams, KernelSpec
from prb_bayesopt.sample_opt import OptimizerConfig, ScalarField, maximize
from prb_bayesopt.seeding import Seed, child_seed

BRANIN_MINIMUM = 0.397887357729739
HARTMANN3_MINIMUM = -3.86278214782076
HARTMANN6_MINIMUM = -3.32236801141551

# Rosenbrock-4 on [-5, 10]^4, shifted and scaled to unit order
ROSENBROCK_SHIFT = 3.827e5
ROSENBROCK_SCALE = 3.755e5

_HARTMANN_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
_HARTMANN3_A = np.array(
    [[3.0, 10.0, 30.0], [0.1, 10.0, 35.0], [3.0, 10.0, 30.0], [0.1, 10.0, 35.0]]
)
_HARTMANN3_P = np.array(
    [
        [0.3689, 0.1170, 0.2673],
        [0.4699, 0.4387, 0.7470],
        [0.1091, 0.8732, 0.5547],
        [0.0381, 0.5743, 0.8828],
    ]
)
_HARTMANN6_A = np.array(
    [
        [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
        [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
        [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
        [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
    ]
)
_HARTMANN6_P = 1e-4 * np.array(
    [
        [1312.0, 1696.0, 5569.0, 124.0, 8283.0, 5886.0],
        [2329.0, 4135.0, 8307.0, 3736.0, 1004.0, 9991.0],
        [2348.0, 1451.0, 3522.0, 2883.0, 3047.0, 6650.0],
        [4047.0, 8828.0, 8732.0, 5743.0, 1091.0, 381.0],
    ]
)


@dataclass(frozen=True, eq=False)
class Objective:
    """A true function on [0, 1]^dim to be maximized, with its optimum value.

    ``evaluate`` maps an (n, dim) batch to n noiseless values. Minimization
    benchmarks are negated. ``hyperparams`` is set for draws from a known GP
    prior and names the prior they came from.
    """

    name: str
    dim: int
    evaluate: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    optimum: float
    noise_variance: float = 0.0
    maximizer: np.ndarray | None = field(default=None, repr=False)
    hyperparams: GPHyperparams | None = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.optimum):
            raise ValueError(f"optimum of {self.name} must be finite, got {self.optimum}")
        if self.noise_variance < 0.0:
            raise ValueError(f"noise variance must be nonnegative, got {self.noise_variance}")

    def value(self, x: np.ndarray) -> float:
        return float(self.evaluate(np.reshape(x, (1, self.dim)))[0])

    def observe(self, x: np.ndarray, rng: np.random.Generator) -> float:
        """A noisy evaluation y = f(x) + N(0, noise_variance)."""
        noise = math.sqrt(self.noise_variance) * rng.standard_normal()
        return self.value(x) + noise

    def regret(self, x: np.ndarray) -> float:
        return max(self.optimum - self.value(x), 0.0)

    def is_epsilon_optimal(self, x: np.ndarray, epsilon: float) -> bool:
        return self.regret(x) <= epsilon


def _to_box(xs: np.ndarray, lower, upper) -> np.ndarray:
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    lower, upper = np.asarray(lower, dtype=float), np.asarray(upper, dtype=float)
    return lower + xs * (upper - lower)


def branin(xs: np.ndarray) -> np.ndarray:
    """Negated Branin on [-5, 10] x [0, 15]."""
    z = _to_box(xs, [-5.0, 0.0], [10.0, 15.0])
    x1, x2 = z[:, 0], z[:, 1]
    b = 5.1 / (4.0 * math.pi**2)
    c = 5.0 / math.pi
    t = 1.0 / (8.0 * math.pi)
    value = (x2 - b * x1**2 + c * x1 - 6.0) ** 2 + 10.0 * (1.0 - t) * np.cos(x1) + 10.0
    return -value


def _hartmann(xs: np.ndarray, a: np.ndarray, p: np.ndarray) -> np.ndarray:
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    inner = np.sum(a[None, :, :] * (xs[:, None, :] - p[None, :, :]) ** 2, axis=2)
    return np.exp(-inner) @ _HARTMANN_ALPHA


def hartmann3(xs: np.ndarray) -> np.ndarray:
    """Negated Hartmann-3 on the unit cube."""
    return _hartmann(xs, _HARTMANN3_A, _HARTMANN3_P)


def hartmann6(xs: np.ndarray) -> np.ndarray:
    """Negated Hartmann-6 on the unit cube."""
    return _hartmann(xs, _HARTMANN6_A, _HARTMANN6_P)


def rosenbrock(xs: np.ndarray) -> np.ndarray:
    """Negated, rescaled Rosenbrock on [-5, 10]^D."""
    z = _to_box(xs, -5.0, 10.0)
    raw = np.sum(100.0 * (z[:, 1:] - z[:, :-1] ** 2) ** 2 + (1.0 - z[:, :-1]) ** 2, axis=1)
    return -(raw - ROSENBROCK_SHIFT) / ROSENBROCK_SCALE


def branin_objective(noise_variance: float = 0.0) -> Objective:
    maximizer = (np.array([-math.pi, 12.275]) - np.array([-5.0, 0.0])) / 15.0
    return Objective("branin", 2, branin, -BRANIN_MINIMUM, noise_variance, maximizer)


def hartmann3_objective(noise_variance: float = 0.0) -> Objective:
    maximizer = np.array([0.114614, 0.555649, 0.852547])
    return Objective("hartmann3", 3, hartmann3, -HARTMANN3_MINIMUM, noise_variance, maximizer)


def hartmann6_objective(noise_variance: float = 0.0) -> Objective:
    maximizer = np.array([0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573])
    return Objective("hartmann6", 6, hartmann6, -HARTMANN6_MINIMUM, noise_variance, maximizer)


def rosenbrock_objective(dim: int = 4, noise_variance: float = 0.0) -> Objective:
    if dim < 2:
        raise ValueError(f"rosenbrock needs dim >= 2, got {dim}")
    maximizer = np.full(dim, 0.4)
    optimum = float(rosenbrock(maximizer)[0])
    return Objective("rosenbrock", dim, rosenbrock, optimum, noise_variance, maximizer)


def gp_prior_hyperparams(dim: int, noise_variance: float) -> GPHyperparams:
    """Unit variance, lengthscales sqrt(D) / 4, zero mean."""
    lengthscale = math.sqrt(dim) / 4.0
    return GPHyperparams(0.0, KernelSpec(1.0, (lengthscale,) * dim), noise_variance)


def gp_draw_objective(
    dim: int,
    noise_variance: float,
    seed: Seed,
    num_features: int = DEFAULT_NUM_FEATURES,
    cfg: OptimizerConfig | None = None,
) -> Objective:
    """A fixed random-feature draw from a known GP prior; its optimum is searched for.

    The same (dim, noise_variance, seed) always gives the same function.
    """
    hyper = gp_prior_hyperparams(dim, noise_variance)
    fmap = build_feature_map(hyper.kernel, num_features, child_seed(seed, "objective", "features"))
    sample = draw_path(PosteriorGP.prior(hyper), fmap, child_seed(seed, "objective", "weights"))
    search = cfg or OptimizerConfig(random_search_points=8192, num_starts=16)
    best = maximize(
        ScalarField(sample, dim, sample.gradient), search, child_seed(seed, "objective", "optimum")
    )
    return Objective(
        "gp",
        dim,
        sample,
        best.maximum,
        noise_variance,
        maximizer=best.argmax,
        hyperparams=hyper,
    )


OBJECTIVE_NAMES = ("gp", "branin", "hartmann3", "hartmann6", "rosenbrock")


def make_objective(
    name: str,
    dim: int | None = None,
    noise_variance: float | None = None,
    seed: Seed = 0,
    num_features: int = DEFAULT_NUM_FEATURES,
) -> Objective:
    """Build a named objective; missing dim and noise come from OBJECTIVE_DEFAULTS.

    Only the ``gp`` objective depends on ``seed``.
    """
    if name not in OBJECTIVE_DEFAULTS:
        raise ValueError(f"unknown objective {name!r}; choose from {', '.join(OBJECTIVE_NAMES)}")
    defaults = OBJECTIVE_DEFAULTS[name]
    dim = defaults["dim"] if dim is None else dim
    noise = defaults["noise"] if noise_variance is None else noise_variance
    fixed_dims = {"branin": 2, "hartmann3": 3, "hartmann6": 6}
    if name in fixed_dims and dim != fixed_dims[name]:
        raise ValueError(f"{name} is defined for dim={fixed_dims[name]} only, got {dim}")

    match name:
        case "gp":
            return gp_draw_objective(dim, noise, seed, num_features)
        case "branin":
            return branin_objective(noise)
        case "hartmann3":
            return hartmann3_objective(noise)
        case "hartmann6":
            return hartmann6_objective(noise)
        case _:
            return rosenbrock_objective(dim, noise)


def builtin_objectives(seed: Seed = 0) -> list[Objective]:
    """Every benchmark at its default dimension and noise."""
    return [make_objective(name, seed=seed) for name in OBJECTIVE_NAMES]
