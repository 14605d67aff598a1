"""Maker's Q-game strategy.

Maker opens with the edge {0, 1}.  From then on the newest vertex ``v_k``
is *active*.  With ``S = S_{v_k}`` written as vertex indices
``(i_1, ..., i_l)``:

* ``L`` holds the Maker vertices in the class of ``v_k`` whose record starts
  with ``S``;
* the stream value after the ``(|L|+1)``-th occurrence of ``S`` picks the
  target class ``P_n``;
* ``F`` holds the first ``l(l+1)+1`` Maker vertices of ``P_n`` whose record
  starts with ``S``.

If ``F`` is full, Maker joins ``v_k`` to the member of ``F`` with the fewest
Maker-neighbours in ``L`` (ties to the older vertex) whose edge is still
free.  Otherwise she takes the first fresh member of class
``P_{n_{k+1}}`` as ``v_{k+1}`` and claims its edge to ``v_1``.

Only the newest vertex ever gains record entries, so the strategy keeps an
index ``(class, record prefix) -> vertices`` that grows in vertex order and
answers ``L`` and ``F`` by lookup.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .dense_orders import ClassId, Partition
from .engine import Edge, GameState, Player
from .universal import UniversalStream, default_stream

OPENING = (Fraction(0), Fraction(1))

# fallback tags written into traces
FLAG_BLOCKED = "blocked-F"


@dataclass
class MakerConfig:
    """The three ingredients Maker fixes before play."""

    partition: Partition = field(default_factory=lambda: Partition(order="hyperbolic"))
    stream: UniversalStream = field(default_factory=default_stream)

    def class_enum(self, i: int) -> ClassId:
        return self.partition.class_enum(i)

    def describe(self) -> str:
        return (f"partition=back-and-forth/{self.partition.order};"
                "class-enum=calkin-wilf;"
                "stream=triangular-blocks/weight-lex-words")


@dataclass
class TargetPlan:
    """Maker's reasoning for one move."""

    active: Optional[Fraction]
    ell: int
    record: tuple[int, ...]
    L: list[int]
    target: Optional[ClassId]
    F: list[int]
    edge: Edge
    branch: str  # "opening", "connect" or "fresh"
    flag: Optional[str] = None
    new_class: Optional[ClassId] = None


class _Index:
    """Incremental view of a game state that the strategy reads from."""

    def __init__(self) -> None:
        self.seen = 0  # moves processed
        self.cls: dict[Fraction, Optional[ClassId]] = {}
        self.by_prefix: dict[tuple, list[int]] = {}
        self.by_prefix_sets: dict[tuple, set[int]] = {}
        self.adj: dict[int, set[int]] = {}  # Maker adjacency by vertex index
        self.member_cursor: dict[ClassId, int] = {}


class QStrategy:
    """Maker's Q-game strategy as a pure function of the state plus a private cache."""

    identifier = "q-strategy"

    def __init__(self, config: Optional[MakerConfig] = None) -> None:
        self.config = config if config is not None else MakerConfig()
        self._ix = _Index()
        self.declared_order: Optional[tuple[Fraction, Fraction]] = None
        self.last_flag: Optional[str] = None
        self.last_plan: Optional[TargetPlan] = None
        self.fallbacks: dict[str, int] = {FLAG_BLOCKED: 0}
        self.max_F = 0

    @property
    def config_text(self) -> str:
        return self.config.describe()

    # -- bookkeeping --------------------------------------------------------
    def _class_of(self, v: Fraction) -> Optional[ClassId]:
        ix = self._ix
        if v not in ix.cls:
            ix.cls[v] = self.config.partition.class_of(v) if 0 < v < 1 else None
        return ix.cls[v]

    def _sync(self, state: GameState) -> None:
        ix = self._ix
        if ix.seen > len(state.moves):
            self._ix = ix = _Index()  # a different, shorter game: start over
        for player, edge in state.moves[ix.seen:]:
            ix.seen += 1
            if player is not Player.MAKER:
                continue
            a, b = edge.u, edge.v
            ia, ib = state.index[a], state.index[b]
            ix.adj.setdefault(ia, set()).add(ib)
            ix.adj.setdefault(ib, set()).add(ia)
            younger = a if ia > ib else b
            rec = state.records[younger]
            length = len(rec.neighbours)
            if rec.frozen_len is not None and length > rec.frozen_len:
                continue
            c = self._class_of(younger)
            if c is None:
                continue
            prefix = tuple(state.index[x] for x in rec.neighbours)
            key = (c, prefix)
            ix.by_prefix.setdefault(key, []).append(state.index[younger])
            ix.by_prefix_sets.setdefault(key, set()).add(state.index[younger])

    # -- the strategy's named steps -----------------------------------------
    def compute_L(self, state: GameState, v: Fraction) -> list[int]:
        """Indices of Maker vertices in v's class whose record starts with S_v."""
        self._sync(state)
        c = self._class_of(v)
        if c is None:
            return []
        return list(self._ix.by_prefix.get((c, state.record_indices(v)), ()))

    def target_class(self, state: GameState, v: Fraction) -> ClassId:
        record = state.record_indices(v)
        if not record:
            raise ValueError("target_class needs a nonempty record")
        n = self.config.stream.occurrence_next(record, len(self.compute_L(state, v)) + 1)
        return self.config.class_enum(n)

    def compute_F(self, state: GameState, v: Fraction, target: ClassId) -> list[int]:
        self._sync(state)
        record = state.record_indices(v)
        ell = len(record)
        return list(self._ix.by_prefix.get((target, record), ())[: ell * (ell + 1) + 1])

    def balanced_min(self, state: GameState, F: list[int], L: list[int], v: Fraction) -> Optional[Edge]:
        """Edge to the F-member least by (Maker-neighbours in L, index) with a free edge."""
        self._sync(state)
        return self._balanced(state, F, set(L), v)

    def _balanced(self, state: GameState, F: list[int], lset: set[int], v: Fraction) -> Optional[Edge]:
        k = state.index[v]
        ranked = []
        for i in F:
            if i == k:
                continue  # v_k itself may qualify for F; a loop is no edge
            ranked.append((len(self._ix.adj.get(i, set()) & lset), i))
        ranked.sort()
        for _, i in ranked:
            edge = Edge.of(state.vertex(i), v)
            if edge not in state.owner:
                return edge
        return None

    def opening_move(self, state: GameState) -> Edge:
        if state.moves:
            raise ValueError("the opening move needs an empty board")
        return Edge(*OPENING)

    def fresh_member(self, state: GameState, c: ClassId) -> Fraction:
        """First member of ``c`` (in class_member order) that is still fresh."""
        cursor = self._ix.member_cursor.get(c, 1)
        while True:
            w = self.config.partition.class_member(c, cursor)
            if state.is_fresh(w):
                self._ix.member_cursor[c] = cursor
                return w
            cursor += 1

    # -- decision ------------------------------------------------------------
    def plan(self, state: GameState, check_turn: bool = True) -> TargetPlan:
        """What Maker would play now.  ``check_turn=False`` lets an opponent peek."""
        if not state.moves:
            return TargetPlan(None, 0, (), [], None, [], self.opening_move(state), "opening")
        if check_turn and state.to_move is not Player.MAKER:
            raise ValueError("it is not Maker's turn")
        self._sync(state)
        v = state.active_vertex
        record = state.record_indices(v)
        ell = len(record)
        c = self._class_of(v)
        if c is None or not record:
            # v_2 = 1 lies in no class, so it never drives L and F
            return self._fresh(state, v, ell, record, [], None, [], None)
        key = (c, record)
        L = self._ix.by_prefix.get(key, [])
        n = self.config.stream.occurrence_next(record, len(L) + 1)
        target = self.config.class_enum(n)
        cap = ell * (ell + 1) + 1
        F = self._ix.by_prefix.get((target, record), [])[:cap]
        self.max_F = max(self.max_F, len(F))
        if len(F) < cap:
            return self._fresh(state, v, ell, record, list(L), target, list(F), None)
        edge = self._balanced(state, F, self._ix.by_prefix_sets.get(key, set()), v)
        if edge is None:
            return self._fresh(state, v, ell, record, list(L), target, list(F), FLAG_BLOCKED)
        return TargetPlan(v, ell, record, list(L), target, list(F), edge, "connect")

    def _fresh(self, state, v, ell, record, L, target, F, flag) -> TargetPlan:
        k = len(state.vertices)
        c = self.config.class_enum(self.config.stream.stream_at(k + 1))
        w = self.fresh_member(state, c)
        edge = Edge.of(state.vertex(1), w)
        return TargetPlan(v, ell, record, L, target, F, edge, "fresh", flag, c)

    def move(self, state: GameState) -> Edge:
        plan = self.plan(state)
        self.last_plan = plan
        self.last_flag = plan.flag
        if plan.flag in self.fallbacks:
            self.fallbacks[plan.flag] += 1
        self.declared_order = OPENING if plan.branch == "opening" else None
        if plan.branch == "fresh":
            # remember the class we picked so the index needs no inverse lookup
            w = plan.edge.other(state.vertex(1))
            self._ix.cls[w] = plan.new_class
        return plan.edge


def maker_move(state: GameState, config: Optional[MakerConfig] = None) -> Edge:
    """One-shot form of :meth:`QStrategy.move` (rebuilds the cache each call)."""
    return QStrategy(config).move(state)
