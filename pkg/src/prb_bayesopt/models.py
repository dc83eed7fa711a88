"""Data models shared across the optimization engine."""

import math
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np


@dataclass(frozen=True)
class SearchSpace:
    """The unit hypercube [0, 1]^dim."""

    dim: int

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")

    def contains(self, points: np.ndarray, tol: float = 0.0) -> bool:
        points = np.atleast_2d(points)
        return (
            points.shape[-1] == self.dim
            and bool(np.all(points >= -tol))
            and bool(np.all(points <= 1.0 + tol))
        )

    def center(self) -> np.ndarray:
        return np.full(self.dim, 0.5)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Evaluated points X_t with their observations y(X_t)."""

    points: np.ndarray  # shape (t, dim)
    observations: np.ndarray  # shape (t,)

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=float)
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        observations = np.asarray(self.observations, dtype=float).reshape(-1)
        if points.shape[0] != observations.shape[0]:
            raise ValueError(
                f"{points.shape[0]} points but {observations.shape[0]} observations"
            )
        if points.size and (np.any(points < 0.0) or np.any(points > 1.0)):
            raise ValueError("dataset points must lie in the unit hypercube")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "observations", observations)

    @classmethod
    def empty(cls, dim: int) -> "Dataset":
        return cls(np.empty((0, dim)), np.empty(0))

    @property
    def size(self) -> int:
        return self.observations.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def append(self, point: np.ndarray, observation: float) -> "Dataset":
        point = np.asarray(point, dtype=float).reshape(1, -1)
        return Dataset(
            np.vstack([self.points, point]),
            np.append(self.observations, float(observation)),
        )

    def prefix(self, t: int) -> "Dataset":
        """The first ``t`` observations."""
        return Dataset(self.points[:t], self.observations[:t])


class KernelFamily(StrEnum):
    MATERN52 = "matern52"


@dataclass(frozen=True)
class KernelSpec:
    """Matérn-5/2 ARD kernel parameters."""

    variance: float
    lengthscales: tuple[float, ...]
    family: KernelFamily = KernelFamily.MATERN52

    def __post_init__(self) -> None:
        object.__setattr__(self, "lengthscales", tuple(float(v) for v in self.lengthscales))
        if self.variance < 0.0:
            raise ValueError(f"kernel variance must be nonnegative, got {self.variance}")
        if not self.lengthscales or min(self.lengthscales) <= 0.0:
            raise ValueError(f"lengthscales must be positive, got {self.lengthscales}")

    @property
    def dim(self) -> int:
        return len(self.lengthscales)

    @property
    def lengthscale_array(self) -> np.ndarray:
        return np.asarray(self.lengthscales)


class Link(StrEnum):
    IDENTITY = "identity"
    LOGIT = "logit"


@dataclass(frozen=True)
class GPHyperparams:
    """Constant mean, kernel, observation noise, and output link."""

    mean_constant: float
    kernel: KernelSpec
    noise_variance: float
    link: Link = Link.IDENTITY

    def __post_init__(self) -> None:
        if self.noise_variance < 0.0:
            raise ValueError(f"noise variance must be nonnegative, got {self.noise_variance}")

    @property
    def dim(self) -> int:
        return self.kernel.dim

    def to_dict(self) -> dict:
        """Record form: ``{mean, log_variance, log_noise, lengthscales}``."""
        return {
            "mean": self.mean_constant,
            "log_variance": _safe_log(self.kernel.variance),
            "log_noise": _safe_log(self.noise_variance),
            "lengthscales": list(self.kernel.lengthscales),
        }

    @classmethod
    def from_dict(cls, data: dict, link: Link = Link.IDENTITY) -> "GPHyperparams":
        return cls(
            mean_constant=float(data["mean"]),
            kernel=KernelSpec(
                variance=math.exp(data["log_variance"]),
                lengthscales=tuple(data["lengthscales"]),
            ),
            noise_variance=math.exp(data["log_noise"]),
            link=link,
        )


def _safe_log(value: float) -> float:
    return math.log(value) if value > 0.0 else -math.inf


class IntervalMethod(StrEnum):
    CLOPPER_PEARSON = "cp"
    JEFFREYS = "jeffreys"
    EMPIRICAL_BERNSTEIN = "bernstein"


@dataclass(frozen=True)
class ConfidenceInterval:
    """Two-sided interval for a bounded mean."""

    lo: float
    hi: float
    method: IntervalMethod
    nominal_delta: float

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"interval lower end {self.lo} exceeds upper end {self.hi}")

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class PsiEstimate:
    """Monte Carlo estimate of the probability that a point is epsilon-optimal."""

    mean: float
    num_draws: int
    successes: int
    interval: ConfidenceInterval = field(repr=False)
