"""Simulation sweeps for interval coverage and the adaptive threshold test."""

import csv
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from prb_bayesopt.models import IntervalMethod
from prb_bayesopt.seeding import Seed, child_seed, make_rng
from prb_bayesopt.seqtest.decision import Decision, decide_threshold
from prb_bayesopt.seqtest.intervals import bernoulli_interval
from prb_bayesopt.seqtest.schedule import make_schedule


@dataclass(frozen=True)
class CoverageRow:
    method: str
    p: float
    n: int
    delta: float
    sims: int
    coverage: float


@dataclass(frozen=True)
class DecisionRow:
    """Draws and error rates of the threshold test at one true mean."""

    method: str
    p: float
    level: float
    delta_est: float
    reps: int
    median_draws: float
    wrong_rate: float
    guaranteed_rate: float


def empirical_coverage(
    method: IntervalMethod, p: float, n: int, delta: float, sims: int, seed: Seed
) -> float:
    """Fraction of simulated Binomial(n, p) counts whose interval contains p.

    The interval depends on the count only, so it is built once per count.
    """
    contains = np.array(
        [bernoulli_interval(method, k, n, delta).contains(p) for k in range(n + 1)]
    )
    counts = make_rng(seed).binomial(n, p, size=sims)
    return float(np.mean(contains[counts]))


def coverage_sweep(
    ps: Iterable[float],
    ns: Iterable[int],
    delta: float,
    sims: int,
    seed: Seed,
    methods: Sequence[IntervalMethod] = tuple(IntervalMethod),
) -> list[CoverageRow]:
    ps, ns = list(ps), list(ns)
    rows = []
    for method in methods:
        for i, p in enumerate(ps):
            for j, n in enumerate(ns):
                coverage = empirical_coverage(method, p, n, delta, sims, child_seed(seed, i, j))
                rows.append(CoverageRow(IntervalMethod(method).value, p, n, delta, sims, coverage))
    return rows


def simulate_decisions(
    p: float,
    level: float,
    delta_est: float,
    reps: int,
    seed: Seed,
    method: IntervalMethod = IntervalMethod.CLOPPER_PEARSON,
    cap: int | None = None,
) -> DecisionRow:
    """Run the threshold test ``reps`` times on Bernoulli(p) draws.

    A wrong decision is a guaranteed one on the wrong side of the level.
    """
    schedule = make_schedule(delta_est, cap=cap)
    truly_above = p >= level
    draws = np.empty(reps)
    wrong = guaranteed = 0
    for r in range(reps):
        rng = make_rng(seed, r)

        def sampler(start: int, stop: int, rng=rng) -> np.ndarray:
            return rng.random(stop - start) < p

        outcome = decide_threshold(sampler, level, schedule, method)
        draws[r] = outcome.draws_used
        if outcome.guaranteed:
            guaranteed += 1
            if (outcome.decision is Decision.ABOVE) != truly_above:
                wrong += 1
    return DecisionRow(
        method=IntervalMethod(method).value,
        p=p,
        level=level,
        delta_est=delta_est,
        reps=reps,
        median_draws=float(np.median(draws)),
        wrong_rate=wrong / reps,
        guaranteed_rate=guaranteed / reps,
    )


def draws_sweep(
    ps: Iterable[float],
    level: float,
    deltas: Iterable[float],
    reps: int,
    seed: Seed,
    method: IntervalMethod = IntervalMethod.CLOPPER_PEARSON,
    cap: int | None = None,
) -> list[DecisionRow]:
    """Median draws used by the threshold test over a grid of true means and risks."""
    ps = list(ps)
    rows = []
    for i, delta_est in enumerate(deltas):
        for j, p in enumerate(ps):
            cell_seed = child_seed(seed, i, j)
            rows.append(simulate_decisions(p, level, delta_est, reps, cell_seed, method, cap))
    return rows


def write_rows_csv(rows: Sequence, path: str | Path) -> Path:
    """Write dataclass rows with their field names as the header."""
    if not rows:
        raise ValueError("no rows to write")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=[field.name for field in fields(rows[0])])
        writer.writeheader()
        for row in rows:
            writer.writerow(asdict(row))
    return path
