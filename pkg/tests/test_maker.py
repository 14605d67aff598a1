from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from qgame import analysis
from qgame.breakers import make_breaker
from qgame.dense_orders import ClassId
from qgame.engine import Edge, GameState, Player, parse_trace, run_game
from qgame.maker import FLAG_BLOCKED, OPENING, MakerConfig, QStrategy, maker_move
from qgame.rationals import enum_q

CONFIG = MakerConfig()


def _run(breaker, turns, seed=0, config=CONFIG, on_move=None):
    return run_game(QStrategy(config), make_breaker(breaker, config), turns, seed, on_move=on_move)


def test_opening_is_zero_one_in_ascending_order():
    maker = QStrategy(CONFIG)
    assert maker.move(GameState()) == Edge(*OPENING)
    assert maker.declared_order == (F(0), F(1))
    state = _run("random:1", 1).state
    assert state.vertices == [0, 1]


def test_second_maker_move_takes_a_fresh_vertex_in_the_stream_class():
    state = _run("random:1", 3).state
    v3 = state.vertex(3)
    assert state.moves[2] == (Player.MAKER, Edge.of(0, v3))
    # stream_at(3) = 2 names the class with label enum_q(2) = 1
    assert CONFIG.partition.class_of(v3) == ClassId(F(1))


def _brute_plan(state, config):
    """L, target and F recomputed by scanning every vertex."""
    v = state.active_vertex
    record = state.record_indices(v)
    cls = {u: config.partition.class_of(u) if 0 < u < 1 else None for u in state.vertices}

    def starts(u):
        return state.record_indices(u)[:len(record)] == record

    L = [state.index[u] for u in state.vertices if cls[u] == cls[v] and starts(u)]
    target = config.class_enum(config.stream.occurrence_next(record, len(L) + 1))
    ell = len(record)
    F_ = [state.index[u] for u in state.vertices if cls[u] == target and starts(u)]
    return L, target, F_[: ell * (ell + 1) + 1]


def test_plans_match_brute_force_recomputation():
    maker = QStrategy(CONFIG)
    checked = 0

    def check(state):
        nonlocal checked
        if state.to_move is Player.MAKER and len(state.vertices) >= 3:
            plan = maker.plan(state)
            if plan.record:
                L, target, F_ = _brute_plan(state, CONFIG)
                assert (plan.L, plan.target, plan.F) == (L, target, F_)
                checked += 1

    run_game(maker, make_breaker("random:4", CONFIG), 1500, 4, on_move=check)
    assert checked > 400


@pytest.mark.parametrize("breaker", ["random:11", "pairing", "blocking"])
def test_laws_hold_against_each_breaker(breaker):
    trace = _run(breaker, 3000, seed=11)
    report = analysis.verify_maker_strategy(trace, MakerConfig())
    assert report.ok, report.text()
    assert f"fallback {FLAG_BLOCKED}: 0 tagged" in report.text()


@settings(max_examples=6, deadline=None)
@given(st.integers(min_value=0, max_value=10**9), st.integers(min_value=2, max_value=600))
def test_every_vertex_first_joins_v1(seed, turns):
    state = _run(f"random:{seed}", turns, seed).state
    assert all(state.records[v].sequence[:1] == (F(0),) for v in state.vertices[1:])
    assert all(u < 1 and u >= 0 for u in state.vertices if u != 1)


def test_replaced_move_is_reported_as_divergence():
    text = _run("random:2", 200, seed=2).to_text()
    lines = text.splitlines()
    lines[9] = "9 M 100/1 101/1"  # a legal but foreign Maker edge at turn 9
    report = analysis.verify_maker_strategy(parse_trace("\n".join(lines) + "\n"))
    assert not report.ok
    assert report.violations[0].startswith("turn 9: Maker played 100/1 101/1")


def test_verifier_refuses_other_makers():
    trace = _run("random:2", 4)
    trace.maker = "someone-else"
    with pytest.raises(ValueError):
        analysis.verify_maker_strategy(trace)


def test_one_shot_move_matches_cached_strategy():
    state = _run("random:5", 300, seed=5).state  # Breaker just moved
    assert maker_move(state, CONFIG) == QStrategy(CONFIG).move(state)


def test_plan_refuses_the_wrong_turn_unless_peeking():
    state = _run("random:5", 3).state
    maker = QStrategy(CONFIG)
    with pytest.raises(ValueError):
        maker.plan(state)
    assert maker.plan(state, check_turn=False).edge is not None


def test_fresh_member_skips_used_rationals():
    state = _run("random:6", 400, seed=6).state
    maker = QStrategy(CONFIG)
    c = CONFIG.class_enum(1)
    w = maker.fresh_member(state, c)
    assert state.is_fresh(w) and CONFIG.partition.class_of(w) == c


def test_config_description_names_the_domain_order():
    assert "hyperbolic" in CONFIG.describe()
    assert CONFIG.class_enum(3).label == enum_q(3)
