"""Aggregate replay results into per-rule summary rows and CSV tables."""

import csv
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import duckdb

from prb_bayesopt.config import ORACLE_BUDGET_LEVEL
from prb_bayesopt.harness.objectives import Objective
from prb_bayesopt.harness.records import RunRecord

SUMMARY_HEADER = (
    "rule",
    "objective",
    "dim",
    "noise",
    "n_runs",
    "success_rate",
    "term_rate",
    "stop_q25",
    "stop_q50",
    "stop_q75",
    "regret_q25",
    "regret_q50",
    "regret_q75",
)
EXTENDED_HEADER = (
    *SUMMARY_HEADER,
    "stop_mean",
    "excess_q25",
    "excess_q50",
    "excess_q75",
)

_SUMMARY_SQL = """
    SELECT
        rule,
        objective,
        dim,
        noise,
        COUNT(*) AS n_runs,
        AVG(CAST(success AS DOUBLE)) AS success_rate,
        AVG(CAST(terminated AS DOUBLE)) AS term_rate,
        quantile_cont(stop_step, 0.25) AS stop_q25,
        quantile_cont(stop_step, 0.5) AS stop_q50,
        quantile_cont(stop_step, 0.75) AS stop_q75,
        quantile_cont(log10_regret, 0.25) AS regret_q25,
        quantile_cont(log10_regret, 0.5) AS regret_q50,
        quantile_cont(log10_regret, 0.75) AS regret_q75,
        AVG(stop_step) AS stop_mean,
        quantile_cont(log10_excess, 0.25) AS excess_q25,
        quantile_cont(log10_excess, 0.5) AS excess_q50,
        quantile_cont(log10_excess, 0.75) AS excess_q75
    FROM replays
    WHERE 1=1
"""


@dataclass(frozen=True)
class SummaryRow:
    """One table row: how a rule did across the runs of one problem.

    Regrets are log10 with a floor of -9. Excess regret, log10(regret - epsilon),
    is taken over failed runs only and is None when every run succeeded.
    """

    rule: str
    objective: str
    dim: int
    noise: float
    n_runs: int
    success_rate: float
    term_rate: float
    stop_q25: float
    stop_q50: float
    stop_q75: float
    regret_q25: float
    regret_q50: float
    regret_q75: float
    stop_mean: float
    excess_q25: float | None = None
    excess_q50: float | None = None
    excess_q75: float | None = None


def summarize(
    conn: duckdb.DuckDBPyConnection,
    rule: str | None = None,
    objective: str | None = None,
    run_ids: Sequence[str] | None = None,
) -> list[SummaryRow]:
    """Summary rows grouped by rule and problem, from the ``replays`` table.

    ``run_ids`` restricts the summary to those runs, e.g. the ones just replayed.

    Raises:
        ValueError: If no replay matches the filters.
    """
    query = _SUMMARY_SQL
    params: list = []
    if rule is not None:
        query += " AND rule = ?"
        params.append(rule)
    if objective is not None:
        query += " AND objective = ?"
        params.append(objective)
    if run_ids is not None:
        if not run_ids:
            raise ValueError("no replay results to summarize")
        query += f" AND run_id IN ({', '.join('?' * len(run_ids))})"
        params.extend(run_ids)
    query += " GROUP BY rule, objective, dim, noise ORDER BY objective, dim, noise, rule"
    rows = conn.execute(query, params).fetchall()
    if not rows:
        raise ValueError("no replay results to summarize")
    return [SummaryRow(*row) for row in rows]


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _write(rows: Sequence[SummaryRow], path: str | Path, header: tuple[str, ...]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format(getattr(row, name)) for name in header])
    return path


def write_summary_csv(rows: Sequence[SummaryRow], path: str | Path) -> Path:
    """CSV with the fixed summary header."""
    return _write(rows, path, SUMMARY_HEADER)


def write_extended_csv(rows: Sequence[SummaryRow], path: str | Path) -> Path:
    """Summary CSV plus mean stopping time and excess-regret quartiles."""
    return _write(rows, path, EXTENDED_HEADER)


def oracle_budget(
    runs: Sequence[tuple[RunRecord, Objective]],
    epsilon: float,
    level: float = ORACLE_BUDGET_LEVEL,
) -> int | None:
    """Smallest t at which at least ``level`` of the runs hold an epsilon-optimal incumbent.

    Only steps where every run logged an incumbent are considered. Returns None
    when no such step reaches the level.
    """
    if not runs:
        raise ValueError("oracle_budget needs at least one run")
    start = max(record.initial_design for record, _ in runs)
    stop = min(record.last_step for record, _ in runs)
    for t in range(start, stop + 1):
        hits = 0
        for record, objective in runs:
            incumbent = record.step(t).incumbent
            if incumbent is not None and objective.is_epsilon_optimal(incumbent, epsilon):
                hits += 1
        if hits >= level * len(runs):
            return t
    return None
