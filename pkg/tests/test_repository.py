"""Tests for replays table CRUD operations."""

import pytest
from conftest import make_replay_result

from prb_bayesopt.harness.repository import (
    count_replays,
    insert_replay,
    insert_replays,
    list_replays,
)


def test_insert_and_list(db_conn):
    insert_replay(db_conn, make_replay_result())
    results = list_replays(db_conn)
    assert len(results) == 1
    result = results[0]
    assert result.run_id == "gp_2d_noise1e-06_seed0"
    assert result.stop_step == 12
    assert result.terminated
    assert result.success
    assert result.returned_point == (0.25, 0.25)
    assert result.regret == pytest.approx(0.01)


def test_insert_same_run_and_rule_replaces(db_conn):
    insert_replay(db_conn, make_replay_result(stop_step=12))
    insert_replay(db_conn, make_replay_result(stop_step=20))
    assert count_replays(db_conn) == 1
    assert list_replays(db_conn)[0].stop_step == 20


def test_list_replays_filters(db_conn):
    insert_replays(
        db_conn,
        [
            make_replay_result(run_id="a", rule="prb"),
            make_replay_result(run_id="a", rule="oracle"),
            make_replay_result(run_id="b", rule="prb", objective="branin"),
        ],
    )
    assert count_replays(db_conn) == 3
    assert len(list_replays(db_conn, rule="prb")) == 2
    assert len(list_replays(db_conn, objective="gp")) == 2
    assert len(list_replays(db_conn, rule="prb", objective="branin")) == 1
    assert [(r.run_id, r.rule) for r in list_replays(db_conn)] == [
        ("a", "oracle"),
        ("a", "prb"),
        ("b", "prb"),
    ]


def test_count_replays_empty(db_conn):
    assert count_replays(db_conn) == 0
