"""Experiment CLI: record BO runs, replay them under stopping rules, run sweeps."""

import argparse
import logging
from pathlib import Path

from prb_bayesopt.config import (
    DEFAULT_DELTA,
    DEFAULT_INITIAL_DESIGN,
    DEFAULT_NUM_FEATURES,
    DEFAULT_ROOT_SEED,
    OBJECTIVE_DEFAULTS,
    RESULTS_DIR,
    load_config_file,
)

RULE_CHOICES = ("prb", "oracle", "budget", "acq", "delta_cb", "delta_es", "all")


def parse_seeds(text: str) -> list[int]:
    """``a..b`` (both ends included), a comma list, or a single seed."""
    if ".." in text:
        start, stop = text.split("..", 1)
        first, last = int(start), int(stop)
        if last < first:
            raise argparse.ArgumentTypeError(f"empty seed range {text!r}")
        return list(range(first, last + 1))
    return [int(part) for part in text.split(",") if part]


def _floats(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part]


def _ints(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part]


def _add_problem_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--objective", default="gp", help="gp, branin, hartmann3, ...")
    parser.add_argument("--dim", type=int, help="Input dimension (default per objective)")
    parser.add_argument("--noise", type=float, help="Observation noise variance")


def _add_rule_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--epsilon", type=float, help="Regret bound (default per objective)")
    parser.add_argument("--delta", type=float, default=DEFAULT_DELTA, help="Total risk")
    parser.add_argument(
        "--delta-split",
        type=float,
        default=0.5,
        help="Share of delta given to model error; the rest goes to estimation",
    )
    parser.add_argument(
        "--interval", choices=["cp", "jeffreys", "bernstein"], default="cp", help="Interval"
    )
    parser.add_argument("--cap", type=int, default=1000, help="Draw cap (0 disables it)")
    parser.add_argument("--features", type=int, default=DEFAULT_NUM_FEATURES)


def build_parser(defaults: dict | None = None) -> argparse.ArgumentParser:
    """The CLI parser; ``defaults`` (from a config file) seed every subcommand."""
    parser = argparse.ArgumentParser(description="Bayesian optimization stopping-rule bench")
    parser.add_argument("--config", help="TOML file of flag defaults")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    subparsers = parser.add_subparsers(dest="command")

    # run
    run_parser = subparsers.add_parser("run", help="Run BO to the budget and record each step")
    _add_problem_args(run_parser)
    run_parser.add_argument("--budget", type=int, help="Evaluations per run")
    run_parser.add_argument("--initial-design", type=int, default=DEFAULT_INITIAL_DESIGN)
    run_parser.add_argument("--seeds", type=parse_seeds, default=[DEFAULT_ROOT_SEED])
    run_parser.add_argument("--features", type=int, default=DEFAULT_NUM_FEATURES)
    run_parser.add_argument(
        "--fit", action="store_true", help="MAP-fit hyperparameters even for GP draws"
    )
    run_parser.add_argument("--out", default=str(RESULTS_DIR / "runs"), help="Record directory")

    # replay
    replay_parser = subparsers.add_parser("replay", help="Apply stopping rules to records")
    replay_parser.add_argument("--records", default=str(RESULTS_DIR / "runs"))
    replay_parser.add_argument("--rule", choices=RULE_CHOICES, nargs="+", default=["all"])
    _add_rule_args(replay_parser)
    replay_parser.add_argument("--cutoff", type=float, help="Baseline cutoff (default eps/2^k)")
    replay_parser.add_argument(
        "--schedule", choices=["constant", "geometric"], default="constant"
    )
    replay_parser.add_argument(
        "--check-every", type=int, default=1, help="PRB check stride (constant schedule only)"
    )
    replay_parser.add_argument("--budget", type=int, help="Budget for the budget rule")
    replay_parser.add_argument("--refit", action="store_true", help="Refit instead of logged")
    replay_parser.add_argument("--db", help="DuckDB file (default results DB)")
    replay_parser.add_argument("--out", default=str(RESULTS_DIR), help="Summary CSV directory")

    # decide
    decide_parser = subparsers.add_parser("decide", help="One threshold test on a stored model")
    decide_parser.add_argument("--record", required=True, help="Run record file")
    decide_parser.add_argument("--step", type=int, help="Step t (default: last)")
    decide_parser.add_argument("--point", type=_floats, help="x as a comma list (incumbent)")
    decide_parser.add_argument("--seed", type=int, default=DEFAULT_ROOT_SEED)
    _add_rule_args(decide_parser)

    # coverage
    cov_parser = subparsers.add_parser("coverage", help="Interval coverage simulation")
    cov_parser.add_argument("--ps", type=_floats, default=[0.05, 0.5, 0.95])
    cov_parser.add_argument("--ns", type=_ints, default=[10, 100])
    cov_parser.add_argument("--delta", type=float, default=0.1)
    cov_parser.add_argument("--sims", type=int, default=10_000)
    cov_parser.add_argument("--level", type=float, default=0.95)
    cov_parser.add_argument("--reps", type=int, default=200)
    cov_parser.add_argument("--seed", type=int, default=DEFAULT_ROOT_SEED)
    cov_parser.add_argument("--out", default=str(RESULTS_DIR), help="CSV directory")

    # bench
    bench_parser = subparsers.add_parser("bench", help="Objective sanity checks and optima")
    _add_problem_args(bench_parser)
    bench_parser.add_argument("--all", action="store_true", help="Every builtin objective")
    bench_parser.add_argument("--seed", type=int, default=DEFAULT_ROOT_SEED)

    # sweep-fig3
    sweep_parser = subparsers.add_parser(
        "sweep-fig3", aliases=["sweep-draws"], help="Draws used by the threshold test"
    )
    sweep_parser.add_argument("--ps", type=_floats, default=[0.955, 0.97, 0.99, 0.999])
    sweep_parser.add_argument("--level", type=float, default=0.95)
    sweep_parser.add_argument("--deltas", type=_floats, default=[0.05])
    sweep_parser.add_argument("--reps", type=int, default=200)
    sweep_parser.add_argument(
        "--interval", choices=["cp", "jeffreys", "bernstein"], default="cp"
    )
    sweep_parser.add_argument("--cap", type=int, default=0, help="Draw cap (0 disables it)")
    sweep_parser.add_argument("--seed", type=int, default=DEFAULT_ROOT_SEED)
    sweep_parser.add_argument("--out", default=str(RESULTS_DIR), help="CSV directory")

    if defaults:
        for sub in (
            run_parser,
            replay_parser,
            decide_parser,
            cov_parser,
            bench_parser,
            sweep_parser,
        ):
            sub.set_defaults(**defaults)
    return parser


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    """Parse flags; values from ``--config`` become defaults that flags override."""
    args = build_parser().parse_args(argv)
    if args.config:
        args = build_parser(load_config_file(args.config)).parse_args(argv)
    return args


def _setup_logging(verbose: bool) -> None:
    from rich.logging import RichHandler

    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(rich_tracebacks=True)],
    )


def main(argv: list[str] | None = None) -> None:
    """CLI entry point for the stopping-rule bench."""
    parser = build_parser()
    args = parse_args(argv)

    if args.command is None:
        parser.print_help()
        return

    _setup_logging(args.verbose)

    if args.command == "run":
        _cmd_run(args)

    elif args.command == "replay":
        _cmd_replay(args)

    elif args.command == "decide":
        _cmd_decide(args)

    elif args.command == "coverage":
        _cmd_coverage(args)

    elif args.command == "bench":
        _cmd_bench(args)

    elif args.command in ("sweep-fig3", "sweep-draws"):
        _cmd_sweep_draws(args)


def _progress():
    from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn

    return Progress(
        SpinnerColumn(),
        TextColumn("[bold blue]{task.description}"),
        BarColumn(),
        TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
        TextColumn("{task.completed}/{task.total}"),
    )


def _epsilon(args: argparse.Namespace, objective: str) -> float:
    if args.epsilon is not None:
        return args.epsilon
    return OBJECTIVE_DEFAULTS[objective]["epsilon"]


def _cap(args: argparse.Namespace) -> int | None:
    return args.cap if args.cap and args.cap > 0 else None


def _cmd_run(args: argparse.Namespace) -> None:
    """Record one BO run per seed."""
    from prb_bayesopt.harness.objectives import make_objective
    from prb_bayesopt.harness.records import record_path, write_record
    from prb_bayesopt.harness.runner import ModelConfig, run_bo

    budget = args.budget or OBJECTIVE_DEFAULTS[args.objective]["budget"]
    invalid = 0
    with _progress() as progress:
        task = progress.add_task(f"Running {args.objective}", total=len(args.seeds))
        for seed in args.seeds:
            objective = make_objective(args.objective, args.dim, args.noise, seed, args.features)
            record = run_bo(
                objective,
                budget,
                args.initial_design,
                seed,
                model_cfg=ModelConfig.for_objective(objective, fit=args.fit),
                num_features=args.features,
            )
            write_record(record, record_path(args.out, record.run_id))
            invalid += not record.valid
            progress.advance(task)
    print(f"Recorded {len(args.seeds)} runs to {args.out} ({invalid} invalid).")


def _rule_specs(args: argparse.Namespace, record) -> list:
    from prb_bayesopt.harness.replay import RuleName, RuleSpec
    from prb_bayesopt.models import IntervalMethod
    from prb_bayesopt.stopping.params import PRBParams, StepSchedule

    epsilon = _epsilon(args, record.objective)
    names = list(RuleName) if "all" in args.rule else [RuleName(name) for name in args.rule]
    prb = PRBParams(
        epsilon=epsilon,
        delta=args.delta,
        delta_mod=args.delta * args.delta_split,
        delta_est=args.delta * (1.0 - args.delta_split),
        step_schedule=StepSchedule(args.schedule),
        budget=record.budget,
        initial_design=record.initial_design,
        cap=_cap(args),
        interval=IntervalMethod(args.interval),
        check_every=args.check_every,
    )
    return [
        RuleSpec(
            name=name,
            epsilon=epsilon,
            delta=args.delta,
            cutoff=args.cutoff,
            budget=args.budget or record.budget,
            prb=prb,
            num_features=args.features,
            refit=args.refit,
        )
        for name in names
    ]


def _cmd_replay(args: argparse.Namespace) -> None:
    """Replay every record under the chosen rules, store the results, and summarize."""
    from prb_bayesopt.db import get_connection
    from prb_bayesopt.errors import CorruptRecordError
    from prb_bayesopt.harness.objectives import make_objective
    from prb_bayesopt.harness.records import read_record
    from prb_bayesopt.harness.replay import replay
    from prb_bayesopt.harness.repository import insert_replay
    from prb_bayesopt.harness.summary import summarize, write_extended_csv, write_summary_csv

    paths = sorted(Path(args.records).glob("*.jsonl"))
    if not paths:
        print(f"No run records found in {args.records}")
        return

    conn = get_connection(args.db)
    skipped = 0
    replayed: list[str] = []
    with _progress() as progress:
        task = progress.add_task("Replaying", total=len(paths))
        for path in paths:
            try:
                record = read_record(path)
                objective = make_objective(
                    record.objective,
                    record.dim,
                    record.noise_variance,
                    record.seed,
                    record.num_features,
                )
                for rule in _rule_specs(args, record):
                    insert_replay(conn, replay(record, rule, objective))
                replayed.append(record.run_id)
            except CorruptRecordError as exc:
                logging.getLogger(__name__).warning("Skipping %s: %s", path.name, exc)
                skipped += 1
            progress.advance(task)

    if not replayed:
        conn.close()
        print(f"No valid run records in {args.records} ({skipped} skipped)")
        return
    rows = summarize(conn, run_ids=replayed)
    conn.close()
    out = Path(args.out)
    write_summary_csv(rows, out / "summary.csv")
    write_extended_csv(rows, out / "summary_extended.csv")
    _print_summary(rows)
    print(f"Replayed {len(paths) - skipped} records ({skipped} skipped); CSV in {out}.")


def _print_summary(rows) -> None:
    from rich.console import Console
    from rich.table import Table

    table = Table(title="Median stopping times and success rates")
    columns = ("rule", "problem", "n", "success", "terminated", "stop q25/q50/q75", "regret")
    for column in columns:
        table.add_column(column)
    for row in rows:
        table.add_row(
            row.rule,
            f"{row.objective} {row.dim}D noise={row.noise:g}",
            str(row.n_runs),
            f"{row.success_rate:.0%}",
            f"{row.term_rate:.0%}",
            f"{row.stop_q25:g}/{row.stop_q50:g}/{row.stop_q75:g}",
            f"{row.regret_q50:.2f}",
        )
    Console().print(table)


def _cmd_decide(args: argparse.Namespace) -> None:
    """Run one adaptive threshold test for a point under a recorded model."""
    import numpy as np

    from prb_bayesopt.harness.records import read_record
    from prb_bayesopt.model.fitting import default_hyperparams
    from prb_bayesopt.model.pathwise import build_feature_map
    from prb_bayesopt.model.posterior import PosteriorGP
    from prb_bayesopt.models import IntervalMethod
    from prb_bayesopt.regret import incumbent, indicator_sampler
    from prb_bayesopt.sample_opt import OptimizerConfig
    from prb_bayesopt.seeding import child_seed
    from prb_bayesopt.seqtest.decision import decide_threshold
    from prb_bayesopt.seqtest.schedule import make_schedule

    record = read_record(args.record)
    t = args.step or record.last_step
    data = record.dataset(t)
    hyper = record.hyperparams_at(t) or default_hyperparams(record.dim, data, record.link)
    gp = PosteriorGP.from_data(hyper, data)
    point = np.asarray(args.point) if args.point else incumbent(gp)
    if point.shape != (record.dim,):
        print(f"Error: --point needs {record.dim} coordinates")
        return

    epsilon = _epsilon(args, record.objective)
    delta_mod = args.delta * args.delta_split
    delta_est = args.delta * (1.0 - args.delta_split)
    fmap = build_feature_map(gp.kernel, args.features, child_seed(args.seed, "features"))
    sampler = indicator_sampler(
        gp, fmap, point, epsilon, OptimizerConfig(), child_seed(args.seed, "draws")
    )
    outcome = decide_threshold(
        sampler,
        1.0 - delta_mod,
        make_schedule(delta_est, cap=_cap(args)),
        IntervalMethod(args.interval),
    )
    interval = outcome.estimate.interval
    print(f"x = {np.round(point, 6).tolist()} at t = {t}")
    print(
        f"{outcome.decision.value}: estimate {outcome.estimate.mean:.4f} "
        f"[{interval.lo:.4f}, {interval.hi:.4f}] vs level {outcome.level:.4f}"
    )
    print(
        f"draws used {outcome.draws_used} in {outcome.rounds} rounds "
        f"(guaranteed: {outcome.guaranteed})"
    )


def _cmd_coverage(args: argparse.Namespace) -> None:
    """Empirical coverage and threshold-test draws for every interval method."""
    from prb_bayesopt.harness.sweeps import coverage_sweep, draws_sweep, write_rows_csv
    from prb_bayesopt.models import IntervalMethod

    coverage = coverage_sweep(args.ps, args.ns, args.delta, args.sims, args.seed)
    draws = []
    for method in IntervalMethod:
        draws += draws_sweep(args.ps, args.level, [args.delta], args.reps, args.seed, method)
    out = Path(args.out)
    write_rows_csv(coverage, out / "coverage.csv")
    write_rows_csv(draws, out / "interval_draws.csv")
    for row in coverage:
        flag = "" if row.coverage >= 1.0 - row.delta else "  (below nominal)"
        print(f"{row.method:>9}  p={row.p:<6g} n={row.n:<5d} coverage={row.coverage:.4f}{flag}")
    for row in draws:
        print(f"{row.method:>9}  p={row.p:<6g} median draws={row.median_draws:g}")


def _cmd_bench(args: argparse.Namespace) -> None:
    """Print each objective's optimum and the best value a random search finds."""
    import numpy as np

    from prb_bayesopt.harness.objectives import builtin_objectives, make_objective

    if args.all:
        objectives = builtin_objectives(args.seed)
    else:
        objectives = [make_objective(args.objective, args.dim, args.noise, args.seed)]
    rng = np.random.default_rng(args.seed)
    for objective in objectives:
        samples = rng.uniform(size=(4096, objective.dim))
        best_sampled = float(np.max(objective.evaluate(samples)))
        at_maximizer = (
            objective.value(objective.maximizer) if objective.maximizer is not None else np.nan
        )
        print(
            f"{objective.name:>10} D={objective.dim}  optimum={objective.optimum:.6f}  "
            f"f(maximizer)={at_maximizer:.6f}  best of 4096 samples={best_sampled:.6f}"
        )


def _cmd_sweep_draws(args: argparse.Namespace) -> None:
    """Median draws used by the threshold test across true means and risks."""
    from prb_bayesopt.harness.sweeps import draws_sweep, write_rows_csv
    from prb_bayesopt.models import IntervalMethod

    rows = draws_sweep(
        args.ps,
        args.level,
        args.deltas,
        args.reps,
        args.seed,
        IntervalMethod(args.interval),
        _cap(args),
    )
    path = write_rows_csv(rows, Path(args.out) / "threshold_draws.csv")
    for row in rows:
        print(
            f"delta={row.delta_est:g} p={row.p:<6g} median draws={row.median_draws:g} "
            f"wrong={row.wrong_rate:.3f}"
        )
    print(f"Wrote {path}")
