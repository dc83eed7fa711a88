"""Tests for DuckDB schema creation."""

import duckdb
import pytest

from prb_bayesopt.harness.schema import ensure_schema


def test_ensure_schema_creates_replays_table(db_conn):
    tables = db_conn.execute(
        "SELECT table_name FROM information_schema.tables WHERE table_name = 'replays'"
    ).fetchall()
    assert len(tables) == 1


def test_ensure_schema_idempotent():
    conn = duckdb.connect(":memory:")
    ensure_schema(conn)
    ensure_schema(conn)  # Should not raise
    tables = conn.execute(
        "SELECT table_name FROM information_schema.tables WHERE table_schema = 'main'"
    ).fetchall()
    assert {row[0] for row in tables} == {"replays"}
    conn.close()


def test_replays_primary_key_is_run_and_rule(db_conn):
    insert = (
        "INSERT INTO replays (run_id, rule, objective, dim, noise, seed, epsilon, stop_step,"
        " terminated, success, regret, log10_regret) VALUES"
        " ('r', 'prb', 'gp', 2, 1e-6, 0, 0.1, 5, true, true, 0.01, -2.0)"
    )
    db_conn.execute(insert)
    with pytest.raises(duckdb.ConstraintException):
        db_conn.execute(insert)
