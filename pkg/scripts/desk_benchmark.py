"""Desk-scale stopping-rule comparison on draws from a known 2D GP prior.

1. Low noise (1e-6), T=64: every rule on 20 seeds; PRB should succeed on at
   least 90% of runs and stop at a median between 10 and 30 steps.
2. High noise (1e-2), T=128: the confidence-bound gap rule with cutoff epsilon
   should terminate less often than PRB.

Results go to results/desk_benchmark/ as run records, a DuckDB file, and CSVs.
"""

import sys

from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn

from prb_bayesopt.config import DEFAULT_REPLICATIONS, RESULTS_DIR
from prb_bayesopt.db import get_connection
from prb_bayesopt.harness.objectives import make_objective
from prb_bayesopt.harness.records import record_path, write_record
from prb_bayesopt.harness.replay import RuleName, RuleSpec, replay
from prb_bayesopt.harness.repository import insert_replay
from prb_bayesopt.harness.runner import run_bo
from prb_bayesopt.harness.summary import summarize, write_extended_csv, write_summary_csv

OUT_DIR = RESULTS_DIR / "desk_benchmark"
EPSILON = 0.1
DIM = 2
SETTINGS = (
    # (noise, budget, rules, cutoff override for the gap rule)
    (1e-6, 64, tuple(RuleName), None),
    (1e-2, 128, (RuleName.PRB, RuleName.DELTA_CB), EPSILON),
)


def run_setting(noise: float, budget: int, rules, cb_cutoff: float | None, seeds) -> None:
    conn = get_connection(str(OUT_DIR / "replays.duckdb"))
    with Progress(
        SpinnerColumn(),
        TextColumn("[bold blue]{task.description}"),
        BarColumn(),
        TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
        TextColumn("{task.completed}/{task.total}"),
    ) as progress:
        task = progress.add_task(f"GP {DIM}D noise={noise:g}", total=len(seeds))
        for seed in seeds:
            objective = make_objective("gp", DIM, noise, seed)
            record = run_bo(objective, budget, seed=seed)
            write_record(record, record_path(OUT_DIR / "runs", record.run_id))
            if not record.valid:
                print(f"Seed {seed}: invalid run ({record.error})")
                progress.advance(task)
                continue
            for name in rules:
                cutoff = cb_cutoff if name is RuleName.DELTA_CB else None
                spec = RuleSpec(name, EPSILON, cutoff=cutoff, budget=budget)
                insert_replay(conn, replay(record, spec, objective))
            progress.advance(task)
    conn.close()


def main() -> None:
    replications = int(sys.argv[1]) if len(sys.argv) > 1 else DEFAULT_REPLICATIONS
    seeds = list(range(replications))
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for noise, budget, rules, cb_cutoff in SETTINGS:
        run_setting(noise, budget, rules, cb_cutoff, seeds)

    conn = get_connection(str(OUT_DIR / "replays.duckdb"))
    rows = summarize(conn)
    conn.close()
    write_summary_csv(rows, OUT_DIR / "summary.csv")
    write_extended_csv(rows, OUT_DIR / "summary_extended.csv")

    print("\nrule        noise   success  terminated  median stop")
    for row in rows:
        print(
            f"{row.rule:<10} {row.noise:>7g}  {row.success_rate:>7.0%}  {row.term_rate:>10.0%}"
            f"  {row.stop_q50:>11g}"
        )

    low = {row.rule: row for row in rows if row.noise == 1e-6}
    high = {row.rule: row for row in rows if row.noise == 1e-2}
    prb = low["prb"]
    print(f"\nPRB success >= 0.9: {prb.success_rate >= 0.9}")
    print(f"PRB median stop in [10, 30]: {10 <= prb.stop_q50 <= 30}")
    print(f"Oracle median stop in [6, 16]: {6 <= low['oracle'].stop_q50 <= 16}")
    gap_rule_stalls = high["delta_cb"].term_rate < high["prb"].term_rate
    print(f"Gap rule terminates less than PRB at noise 1e-2: {gap_rule_stalls}")


if __name__ == "__main__":
    main()
