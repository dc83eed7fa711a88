"""CRUD operations for replay results in DuckDB."""

import duckdb

from prb_bayesopt.harness.replay import ReplayResult

_COLUMNS = (
    "run_id, rule, objective, dim, noise, seed, epsilon, stop_step, terminated, success, "
    "regret, log10_regret, log10_excess, returned_point"
)


def insert_replay(conn: duckdb.DuckDBPyConnection, result: ReplayResult) -> None:
    """Insert one replay result, replacing an earlier one for the same run and rule."""
    conn.execute(
        f"""
        INSERT OR REPLACE INTO replays ({_COLUMNS})
        VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
        """,
        [
            result.run_id,
            result.rule,
            result.objective,
            result.dim,
            result.noise,
            result.seed,
            result.epsilon,
            result.stop_step,
            result.terminated,
            result.success,
            result.regret,
            result.log10_regret,
            result.log10_excess_regret,
            list(result.returned_point),
        ],
    )


def insert_replays(conn: duckdb.DuckDBPyConnection, results: list[ReplayResult]) -> None:
    """Bulk insert replay results."""
    for result in results:
        insert_replay(conn, result)


def list_replays(
    conn: duckdb.DuckDBPyConnection,
    rule: str | None = None,
    objective: str | None = None,
) -> list[ReplayResult]:
    """List replay results with optional filters, ordered by run and rule."""
    query = f"SELECT {_COLUMNS} FROM replays WHERE 1=1"
    params: list = []
    if rule is not None:
        query += " AND rule = ?"
        params.append(rule)
    if objective is not None:
        query += " AND objective = ?"
        params.append(objective)
    query += " ORDER BY run_id, rule"
    rows = conn.execute(query, params).fetchall()
    return [_row_to_result(row) for row in rows]


def count_replays(conn: duckdb.DuckDBPyConnection) -> int:
    result = conn.execute("SELECT COUNT(*) FROM replays").fetchone()
    return result[0] if result else 0


def _row_to_result(row: tuple) -> ReplayResult:
    return ReplayResult(
        run_id=row[0],
        rule=row[1],
        objective=row[2],
        dim=row[3],
        noise=row[4],
        seed=row[5],
        epsilon=row[6],
        stop_step=row[7],
        terminated=row[8],
        success=row[9],
        regret=row[10],
        returned_point=tuple(row[13] or ()),
    )
