"""Shared DuckDB connection factory."""

import duckdb

from prb_bayesopt.config import DB_PATH


def get_connection(db_path: str | None = None) -> duckdb.DuckDBPyConnection:
    """Open a DuckDB connection with the replay schema. Defaults to the results DB file."""
    if db_path is None:
        DB_PATH.parent.mkdir(parents=True, exist_ok=True)
    path = db_path or str(DB_PATH)
    conn = duckdb.connect(path)

    from prb_bayesopt.harness.schema import ensure_schema

    ensure_schema(conn)
    return conn
