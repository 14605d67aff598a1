"""Shared fixtures: long games are played once per session and reused.

A run of T turns is a prefix of any longer run with the same strategies
and seed, so the states after 10^3 and 10^4 turns are captured while the
10^5-turn game is played instead of replaying three separate games.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import pytest
from hypothesis import settings

from qgame.breakers import make_breaker
from qgame.engine import GameState, Trace, run_game
from qgame.maker import MakerConfig, QStrategy

# Timing is asserted explicitly where the criteria ask for it; hypothesis'
# per-example deadline would only add flakiness on a loaded machine.
settings.register_profile("repo", deadline=None)
settings.load_profile("repo")

LONG = 100_000
CHECKPOINTS = (1_000, 10_000)
SEEDS = (1, 2, 3)

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@dataclass
class LongRun:
    seed: int
    breaker: str
    config: MakerConfig
    trace: Trace
    seconds: float
    snapshots: dict[int, GameState] = field(default_factory=dict)

    @property
    def state(self) -> GameState:
        return self.trace.state


def play_long(breaker_spec: str, seed: int, turns: int = LONG) -> LongRun:
    config = MakerConfig()
    snapshots: dict[int, GameState] = {}

    def grab(state: GameState) -> None:
        if len(state.moves) in CHECKPOINTS:
            snapshots[len(state.moves)] = state.copy()

    start = time.perf_counter()
    trace = run_game(QStrategy(config), make_breaker(breaker_spec, config), turns, seed, on_move=grab)
    return LongRun(seed, breaker_spec, config, trace, time.perf_counter() - start, snapshots)


_cache: dict[tuple[str, int], LongRun] = {}


def long_run(breaker_spec: str, seed: int) -> LongRun:
    key = (breaker_spec, seed)
    if key not in _cache:
        _cache[key] = play_long(breaker_spec, seed)
    return _cache[key]


@pytest.fixture(scope="session")
def random_runs() -> list[LongRun]:
    return [long_run(f"random:{s}", s) for s in SEEDS]


@pytest.fixture(scope="session")
def pairing_run() -> LongRun:
    return long_run("pairing", 1)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
