"""Breaker opponents.

``pairing`` is the dense-game strategy.  Take the intervals
``I_j = (j, j+1)`` and the 2-subsets ``{p_j, q_j}`` of the enumeration of Q
listed by larger index, then smaller index.  Every ``s`` in ``I_j``
that comes later in the enumeration than both ``p_j`` and ``q_j`` pairs
the edge ``p_j s`` with ``q_j s``.  Whenever Maker takes one edge of a
pair, Breaker answers with the other.

``random:<seed>`` picks uniformly among the unclaimed edges spanned by
the vertices in play plus the next three fresh rationals of the
enumeration.  ``blocking`` peeks at Maker's plan and takes the edge she
is about to claim.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Iterator, Optional

from .engine import Edge, GameState, Player
from .maker import MakerConfig, QStrategy
from .rationals import enum_index_of, enum_q

FLAG_CANONICAL = "canonical-fallback"


def two_subset(j: int) -> tuple[int, int]:
    """Index pair (a, b), a < b, of the j-th 2-subset (ordered by b, then a)."""
    if j < 1:
        raise ValueError("2-subsets are numbered from 1")
    # pairs with larger index below b number (b-1)(b-2)/2
    b = (1 + math.isqrt(8 * (j - 1) + 1)) // 2 + 1
    while (b - 1) * (b - 2) // 2 >= j:
        b -= 1
    while b * (b - 1) // 2 < j:
        b += 1
    return j - (b - 1) * (b - 2) // 2, b


def two_subset_position(a: int, b: int) -> int:
    if not 1 <= a < b:
        raise ValueError("need 1 <= a < b")
    return (b - 1) * (b - 2) // 2 + a


def canonical_edges() -> Iterator[Edge]:
    """All edges of K^Q as pairs of enum_q values, by larger then smaller index."""
    b = 2
    while True:
        for a in range(1, b):
            yield Edge.of(enum_q(a), enum_q(b))
        b += 1


class PairTable:
    """The pairing ``p_j s <-> q_j s``; everything is computed, nothing stored."""

    @staticmethod
    def base_pair(j: int) -> tuple[Fraction, Fraction]:
        a, b = two_subset(j)
        return enum_q(a), enum_q(b)

    @staticmethod
    def interval_of(s: Fraction) -> Optional[int]:
        """j with s in (j, j+1), if any."""
        if s.denominator == 1 or s < 1:
            return None
        return s.numerator // s.denominator

    def _pair_at(self, x: Fraction, s: Fraction) -> Optional[Edge]:
        j = self.interval_of(s)
        if j is None:
            return None
        p, q = self.base_pair(j)
        if x != p and x != q:
            return None
        if s == p or s == q:
            return None
        if enum_index_of(s) <= max(enum_index_of(p), enum_index_of(q)):
            return None
        return Edge.of(q if x == p else p, s)

    def pair_of(self, edge: Edge) -> Optional[Edge]:
        """The partner of ``edge`` in the pairing, or None when it is unpaired."""
        return self._pair_at(edge.u, edge.v) or self._pair_at(edge.v, edge.u)

    def pairs(self, count: int) -> Iterator[tuple[int, Fraction, Edge, Edge]]:
        """The first ``count`` pairs as (j, s, p_j s, q_j s), by enum index of ``s``.

        Each ``s`` lies in at most one interval, so it owns at most one pair.
        """
        emitted = 0
        t = 1
        while emitted < count:
            t += 1
            s = enum_q(t)
            j = self.interval_of(s)
            if j is None:
                continue
            p, q = self.base_pair(j)
            if s in (p, q) or t <= max(enum_index_of(p), enum_index_of(q)):
                continue
            yield j, s, Edge.of(p, s), Edge.of(q, s)
            emitted += 1


class PairingBreaker:
    identifier = "pairing"

    def __init__(self) -> None:
        self.table = PairTable()
        self.last_flag: Optional[str] = None
        self._canon = canonical_edges()
        self._canon_next: Optional[Edge] = None

    def move(self, state: GameState) -> Edge:
        self.last_flag = None
        last_player, last_edge = state.moves[-1]
        if last_player is Player.MAKER:
            partner = self.table.pair_of(last_edge)
            if partner is not None and partner not in state.owner:
                return partner
        self.last_flag = FLAG_CANONICAL
        return self._first_unclaimed(state)

    def _first_unclaimed(self, state: GameState) -> Edge:
        # claimed edges stay claimed, so the cursor never needs to move back
        while self._canon_next is None or self._canon_next in state.owner:
            self._canon_next = next(self._canon)
        return self._canon_next


def breaker_pairing_move(state: GameState) -> Edge:
    return PairingBreaker().move(state)


class RandomBreaker:
    """Uniform choice over a finite pool, driven only by the seed."""

    def __init__(self, seed: int) -> None:
        self.seed = seed
        self.identifier = f"random:{seed}"
        self.rng = random.Random(seed)
        self.last_flag: Optional[str] = None
        self._cursor = 1  # enum index below which no rational is fresh
        self._pool: list[Fraction] = []
        self._pool_set: set[Fraction] = set()
        self._seen = (0, 0)

    def _sync_pool(self, state: GameState) -> None:
        # vertices in play: new Maker vertices, then new Breaker vertices, per call
        nm, nb = self._seen
        if nm > len(state.vertices) or nb > len(state.breaker_vertices):
            raise ValueError("a RandomBreaker follows one game only")
        for v in state.vertices[nm:] + state.breaker_vertices[nb:]:
            if v not in self._pool_set:
                self._pool_set.add(v)
                self._pool.append(v)
        self._seen = (len(state.vertices), len(state.breaker_vertices))

    def _fresh(self, state: GameState, count: int) -> list[Fraction]:
        while not state.is_fresh(enum_q(self._cursor)):
            self._cursor += 1
        out = []
        i = self._cursor
        while len(out) < count:
            r = enum_q(i)
            if state.is_fresh(r):
                out.append(r)
            i += 1
        return out

    def move(self, state: GameState) -> Edge:
        self._sync_pool(state)
        universe = self._pool + self._fresh(state, 3)
        n = len(universe)
        total = n * (n - 1) // 2
        while True:
            k = self.rng.randrange(total)
            # unrank k into a pair a < b of universe positions
            b = (1 + math.isqrt(8 * k + 1)) // 2
            a = k - b * (b - 1) // 2
            edge = Edge.of(universe[a], universe[b])
            if edge not in state.owner:
                return edge


def breaker_random_move(state: GameState, rng: random.Random) -> Edge:
    breaker = RandomBreaker(0)
    breaker.rng = rng
    return breaker.move(state)


class BlockingBreaker:
    """Claims the edge Maker's plan is about to take; canonical edge otherwise."""

    identifier = "blocking"

    def __init__(self, config: Optional[MakerConfig] = None) -> None:
        self.spy = QStrategy(config)
        self.last_flag: Optional[str] = None
        self._canon = canonical_edges()
        self._canon_next: Optional[Edge] = None

    def move(self, state: GameState) -> Edge:
        plan = self.spy.plan(state, check_turn=False)
        self.last_flag = None
        if plan.branch == "connect" and plan.edge not in state.owner:
            return plan.edge
        self.last_flag = FLAG_CANONICAL
        while self._canon_next is None or self._canon_next in state.owner:
            self._canon_next = next(self._canon)
        return self._canon_next


def make_breaker(spec: str, config: Optional[MakerConfig] = None):
    """Build a Breaker from its trace identifier."""
    if spec == "pairing":
        return PairingBreaker()
    if spec == "blocking":
        return BlockingBreaker(config)
    if spec.startswith("random:"):
        try:
            seed = int(spec[len("random:"):])
        except ValueError:
            raise ValueError(f"bad random seed in {spec!r}") from None
        return RandomBreaker(seed)
    raise ValueError(f"unknown breaker {spec!r}")
