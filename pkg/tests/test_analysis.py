import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

import oracles
from qgame import analysis
from qgame.breakers import make_breaker
from qgame.dense_orders import ClassId, Partition
from qgame.engine import Edge, GameState, Player, apply_move, run_game
from qgame.maker import MakerConfig, QStrategy

CONFIG = MakerConfig()


# -- trace verification ------------------------------------------------------

def _text(turns=20, seed=1):
    return run_game(QStrategy(), make_breaker(f"random:{seed}"), turns, seed).to_text()


def test_clean_trace_verifies():
    report = analysis.verify_trace(_text())
    assert report.ok and report.text().startswith("OK\n")


def test_swapped_player_tags_are_pinned_to_their_turn():
    lines = _text().splitlines()
    lines[4] = lines[4].replace(" B ", " M ", 1)
    report = analysis.verify_trace("\n".join(lines) + "\n")
    assert report.verdict() == "FAIL 1 violations"
    assert report.violations[0].startswith("turn 4:")


def test_duplicate_edge_names_both_turns():
    lines = _text().splitlines()
    _, _, a, b = lines[1].split()[:4]
    lines[4] = f"4 B {a} {b}"
    report = analysis.verify_trace("\n".join(lines) + "\n")
    assert any("turn 4" in v and "turn 1" in v for v in report.violations)


def test_malformed_and_truncated_traces_fail():
    lines = _text().splitlines()
    lines[3] = "3 M nonsense"
    report = analysis.verify_trace("\n".join(lines[:-2]) + "\n")
    assert len(report.violations) == 2  # malformed line, missing moves
    assert not analysis.verify_trace("garbage\n").ok


# -- clique extraction -------------------------------------------------------

class _Script:
    """A Maker that plays a fixed list of edges."""

    identifier = "q-strategy"

    def __init__(self, edges):
        self.edges = iter(edges)

    def move(self, state):
        return next(self.edges)


class _FarBreaker:
    identifier = "far"

    def __init__(self):
        self.k = 1000

    def move(self, state):
        self.k += 2
        return Edge.of(self.k, self.k + 1)


def _triangle_state():
    """Three vertices of class 1 joined to 0, then seven of class 0 joined to 0 and a_1."""
    part = CONFIG.partition
    a = [part.class_member(ClassId(F(1)), k) for k in (1, 2, 3)]
    b = [part.class_member(ClassId(F(0)), k) for k in range(1, 8)]
    edges = [Edge.of(0, 1)] + [Edge.of(0, x) for x in a]
    for x in b:
        edges += [Edge.of(0, x), Edge.of(a[0], x)]
    trace = run_game(_Script(edges), _FarBreaker(), 2 * len(edges), 0)
    return trace.state, a, b


def test_opening_only_gives_the_trivial_clique():
    state = GameState()
    apply_move(state, Player.MAKER, Edge.of(0, 1))
    cert = analysis.extract_clique(state, config=CONFIG)
    assert cert.m == 1 and cert.vertices == [0]
    assert analysis.check_certificate(cert, state, CONFIG).ok


def test_scripted_triangle_is_found_and_is_maximal():
    state, a, b = _triangle_state()
    cert = analysis.extract_clique(state, m_max=6, threshold=1, config=CONFIG)
    records = {v: state.records[v].sequence for v in state.vertices}
    best = oracles.max_ordered_clique(state.maker_adj, records, F(0))
    assert cert.m == best == 3
    assert cert.vertices == [0, a[0], b[0]]
    for u in cert.vertices:
        for w in cert.vertices:
            if u != w:
                assert w in state.maker_adj[u]
    assert analysis.check_certificate(cert, state, CONFIG).ok


def test_threshold_above_the_evidence_stops_early():
    state, _, _ = _triangle_state()
    assert analysis.extract_clique(state, threshold=8, config=CONFIG).m == 1


def test_deleted_edge_breaks_condition_a():
    state, a, b = _triangle_state()
    cert = analysis.extract_clique(state, threshold=1, config=CONFIG)
    state.maker_adj[F(0)].discard(a[0])
    state.maker_adj[a[0]].discard(F(0))
    report = analysis.check_certificate(cert, state, CONFIG)
    assert any(v.startswith("(a)") for v in report.violations)


def test_third_vertex_outside_its_gap_breaks_condition_d():
    state, _, _ = _triangle_state()
    cert = analysis.extract_clique(state, threshold=1, config=CONFIG)
    cert.steps[1].label = F(2)  # above R_2 = 1, not in the gap below it
    cert.labels[2] = F(2)
    report = analysis.check_certificate(cert, state, CONFIG)
    assert any(v.startswith("(d)") for v in report.violations)


def test_certificate_text_round_trip_and_trace_section():
    state, _, _ = _triangle_state()
    cert = analysis.extract_clique(state, threshold=1, config=CONFIG)
    assert analysis.CliqueCertificate.from_text(cert.to_text()) == cert
    text = analysis.append_certificate("header\n1 M 0/1 1/1\n", cert)
    assert analysis.read_certificate(text) == cert
    assert analysis.read_certificate(analysis.append_certificate(text, cert)) == cert
    assert analysis.read_certificate("header\n") is None


def test_every_single_field_mutation_is_rejected():
    state, _, _ = _triangle_state()
    cert = analysis.extract_clique(state, threshold=1, config=CONFIG)
    rng = random.Random(7)
    kinds = set()
    for _ in range(200):
        kind, bad = analysis.mutate_certificate(cert, rng, state)
        kinds.add(kind)
        assert bad != cert, kind
        assert not analysis.check_certificate(bad, state, CONFIG).ok, kind
    assert len(kinds) >= 12


def test_longer_runs_never_lose_clique_size():
    config = MakerConfig()
    snaps = {}

    def grab(state):
        if len(state.moves) == 10_000:
            snaps[10_000] = state.copy()

    trace = run_game(QStrategy(config), make_breaker("random:5", config), 20_000, 5, on_move=grab)
    short = analysis.extract_clique(snaps[10_000], threshold=3, config=config)
    long = analysis.extract_clique(trace.state, threshold=3, config=config)
    assert short.m <= long.m
    assert analysis.check_certificate(long, trace.state, config).ok


# -- Ramsey tools ------------------------------------------------------------

def test_index_colouring_examples():
    assert analysis.index_colouring(1, 2) is analysis.Colour.BLUE
    assert analysis.index_colouring(1, 3) is analysis.Colour.RED
    with pytest.raises(ValueError):
        analysis.index_colouring(4, 4)


@given(st.integers(min_value=1, max_value=10**6), st.integers(min_value=1, max_value=10**6))
def test_index_colouring_is_symmetric(i, j):
    if i != j:
        assert analysis.index_colouring(i, j) == analysis.index_colouring(j, i)
        assert analysis.index_colouring(i, j).value == oracles.colour(i, j)


def test_small_prefix_maxima():
    assert analysis.max_mono_clique_prefix(3, "blue") == 2
    assert analysis.max_mono_clique_prefix(3, "red") == 2
    assert analysis.max_mono_clique_prefix(1, "blue") == analysis.max_mono_clique_prefix(1, "red") == 1
    with pytest.raises(ValueError):
        analysis.max_mono_clique_prefix(0, "red")


@pytest.mark.parametrize("n", range(1, 16))
def test_prefix_maxima_are_monotone_subsequences(n):
    values = [oracles.enum_q(i) for i in range(1, n + 1)]
    assert analysis.max_mono_clique_prefix(n, "blue") == oracles.longest_increasing(values)
    assert analysis.max_mono_clique_prefix(n, "red") == oracles.longest_decreasing(values)


def test_dense_labels_refine_level_by_level():
    assert analysis.dense_labels(7) == [0, F(-1, 2), F(1, 2), F(-3, 4), F(-1, 4), F(1, 4), F(3, 4)]


def test_all_blue_gives_case_one():
    result = analysis.mono_dense_subset(analysis.builtin_oracle("all-blue"), 5, 20)
    assert result.case == 1 and len(result.elements) == 5
    assert len({Partition().class_of(r) for r in result.elements}) == 1


def test_all_red_gives_case_two_across_classes():
    result = analysis.mono_dense_subset(analysis.builtin_oracle("all-red"), 5, 20)
    assert result.case == 2 and len(result.elements) == 5
    assert len({Partition().class_of(r) for r in result.elements}) == 5


def test_denominator_parity_gives_red_members_of_distinct_classes():
    result = analysis.mono_dense_subset(analysis.builtin_oracle("denominator-parity"), 4, 64)
    assert result.case == 2
    assert all(r.denominator % 2 == 1 for r in result.elements)
    assert len({Partition().class_of(r) for r in result.elements}) == 4


def test_small_budget_is_inconclusive():
    result = analysis.mono_dense_subset(analysis.builtin_oracle("all-blue"), 5, 3)
    assert result.inconclusive and result.case is None


def test_oracle_budget_is_enforced():
    oracle = analysis.builtin_oracle("all-red", budget=2)
    oracle(F(1, 2))
    oracle(F(1, 3))
    with pytest.raises(RuntimeError):
        oracle(F(1, 4))
    with pytest.raises(ValueError):
        analysis.builtin_oracle("purple")
