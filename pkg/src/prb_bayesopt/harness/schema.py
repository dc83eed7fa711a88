"""DuckDB schema for replay results."""

import duckdb


def ensure_schema(conn: duckdb.DuckDBPyConnection) -> None:
    """Create tables and indexes if they do not exist."""
    # replays table (one row per run and stopping rule)
    conn.execute("""
        CREATE TABLE IF NOT EXISTS replays (
            run_id             VARCHAR NOT NULL,
            rule               VARCHAR NOT NULL,
            objective          VARCHAR NOT NULL,
            dim                INTEGER NOT NULL,
            noise              DOUBLE NOT NULL,
            seed               BIGINT NOT NULL,
            epsilon            DOUBLE NOT NULL,
            stop_step          INTEGER NOT NULL,
            terminated         BOOLEAN NOT NULL,
            success            BOOLEAN NOT NULL,
            regret             DOUBLE NOT NULL,
            log10_regret       DOUBLE NOT NULL,
            log10_excess       DOUBLE,
            returned_point     DOUBLE[],
            created_at         TIMESTAMP DEFAULT current_timestamp,
            PRIMARY KEY (run_id, rule)
        )
    """)
    conn.execute(
        "CREATE INDEX IF NOT EXISTS idx_replays_group ON replays(objective, dim, noise, rule)"
    )
