"""Maker-Breaker games on the complete graph with rational vertices."""

from .rationals import enum_q, enum_index_of, enum_unit_interval, format_rational, parse_rational
from .dense_orders import BackAndForth, ClassId, Partition
from .universal import UniversalStream, gap_at, occurrence_next, stream_at
from .engine import Edge, GameState, Player, Trace, apply_move, replay, run_game

__all__ = [
    "BackAndForth", "ClassId", "Edge", "GameState", "Partition", "Player", "Trace",
    "UniversalStream", "apply_move", "enum_index_of", "enum_q", "enum_unit_interval",
    "format_rational", "gap_at", "occurrence_next", "parse_rational", "replay",
    "run_game", "stream_at",
]
__version__ = "0.1.0"
