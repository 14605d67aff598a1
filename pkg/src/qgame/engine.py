"""Board state, referee, connection records and traces for the game on K^Q.

The engine owns every mutation.  Strategies see the state read-only and
answer with an :class:`Edge`; :func:`run_game` checks it, applies it and
logs it.  Traces are plain text, one header line then one line per move::

    qgame-trace v1 maker=q-strategy breaker=random:7 turns=10 seed=7 digest=3f1c...
    1 M 0/1 1/1
    2 B -1/1 2/1
    ...

A move line may carry a fifth token naming a strategy fallback (for
instance ``blocked-F``); readers treat it as a comment on the move.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Protocol

from .rationals import format_rational, parse_rational

TRACE_MAGIC = "qgame-trace"
TRACE_VERSION = "v1"


class Player(str, enum.Enum):
    MAKER = "M"
    BREAKER = "B"


@dataclass(frozen=True, order=True)
class Edge:
    """An unordered pair of distinct rationals, stored smaller endpoint first."""

    u: Fraction
    v: Fraction

    def __post_init__(self) -> None:
        if not self.u < self.v:
            raise ValueError(f"edge endpoints must be distinct and ascending: {self.u}, {self.v}")

    @classmethod
    def of(cls, a, b) -> "Edge":
        a, b = Fraction(a), Fraction(b)
        if a == b:
            raise ValueError(f"loop at {format_rational(a)} is not an edge")
        return cls(a, b) if a < b else cls(b, a)

    def other(self, x: Fraction) -> Fraction:
        if x == self.u:
            return self.v
        if x == self.v:
            return self.u
        raise ValueError(f"{x} is not an endpoint of {self}")

    def __contains__(self, x) -> bool:
        return x == self.u or x == self.v

    def __str__(self) -> str:
        return f"{format_rational(self.u)} {format_rational(self.v)}"


class IllegalMove(Exception):
    """A move the referee refuses; ``turn`` is the 1-based turn it was tried at."""

    def __init__(self, turn: int, message: str) -> None:
        super().__init__(f"turn {turn}: {message}")
        self.turn = turn
        self.message = message


@dataclass
class ConnectionRecord:
    """Maker-neighbours of ``owner`` that joined G_M before it, in claim order.

    ``frozen_len`` is set once, when the next vertex enters G_M; the
    record proper (the paper's ``S_v``) is the list cut at that length.
    """

    owner: Fraction
    neighbours: list[Fraction] = field(default_factory=list)
    frozen_len: Optional[int] = None

    @property
    def sequence(self) -> tuple[Fraction, ...]:
        if self.frozen_len is None:
            return tuple(self.neighbours)
        return tuple(self.neighbours[: self.frozen_len])

    def freeze(self) -> None:
        if self.frozen_len is None:
            self.frozen_len = len(self.neighbours)


class GameState:
    """Everything the referee knows after some number of turns."""

    def __init__(self) -> None:
        self.owner: dict[Edge, Player] = {}
        self.maker_adj: dict[Fraction, set[Fraction]] = {}
        self.breaker_adj: dict[Fraction, set[Fraction]] = {}
        self.vertices: list[Fraction] = []  # v_1, v_2, ... in Maker-addition order
        self.index: dict[Fraction, int] = {}  # v -> k with v = v_k
        self.records: dict[Fraction, ConnectionRecord] = {}
        self.moves: list[tuple[Player, Edge]] = []
        self.breaker_vertices: list[Fraction] = []  # first-incidence order
        self._unfrozen: list[Fraction] = []

    @property
    def turn(self) -> int:
        """Number of edges claimed so far."""
        return len(self.moves)

    @property
    def to_move(self) -> Player:
        return Player.MAKER if self.turn % 2 == 0 else Player.BREAKER

    @property
    def active_vertex(self) -> Optional[Fraction]:
        """The newest Maker vertex v_k, or None before the first move."""
        return self.vertices[-1] if self.vertices else None

    def vertex(self, k: int) -> Fraction:
        """v_k, 1-based."""
        return self.vertices[k - 1]

    def is_claimed(self, edge: Edge) -> bool:
        return edge in self.owner

    def maker_edges(self) -> list[Edge]:
        return [e for p, e in self.moves if p is Player.MAKER]

    def maker_degree(self, v: Fraction) -> int:
        return len(self.maker_adj.get(v, ()))

    def record_indices(self, v: Fraction) -> tuple[int, ...]:
        """S_v written with vertex indices (i_1, ..., i_l)."""
        return tuple(self.index[x] for x in self.records[v].sequence)

    def is_fresh(self, r) -> bool:
        r = Fraction(r)
        return r not in self.maker_adj and r not in self.breaker_adj

    def copy(self) -> "GameState":
        return replay_moves(self.moves)


def fresh_vertex_check(state: GameState, r) -> bool:
    """True iff ``r`` touches no claimed edge of either player."""
    return state.is_fresh(r)


def apply_move(state: GameState, player: Player, edge: Edge,
               new_vertex_order: Optional[tuple[Fraction, Fraction]] = None) -> GameState:
    """Claim ``edge`` for ``player``, updating ``state`` in place (it is also returned).

    When a Maker edge brings in two new vertices, they join G_M in the
    order ``new_vertex_order`` (default: ascending).
    """
    turn = state.turn + 1
    if player is not state.to_move:
        raise IllegalMove(turn, f"out of turn: {player.value} moved but {state.to_move.value} was due")
    if edge in state.owner:
        raise IllegalMove(turn, f"edge {edge} already claimed")
    state.owner[edge] = player
    state.moves.append((player, edge))
    if player is Player.BREAKER:
        for x, y in ((edge.u, edge.v), (edge.v, edge.u)):
            if x not in state.breaker_adj:
                state.breaker_adj[x] = set()
                state.breaker_vertices.append(x)
            state.breaker_adj[x].add(y)
        return state

    new = [x for x in (edge.u, edge.v) if x not in state.maker_adj]
    if len(new) == 2 and new_vertex_order is not None:
        if set(new_vertex_order) != set(new):
            raise IllegalMove(turn, "declared vertex order does not match the edge")
        new = list(new_vertex_order)
    if new:
        # the first fresh vertex after v freezes S_v
        for v in state._unfrozen:
            state.records[v].freeze()
        state._unfrozen.clear()
    for pos, x in enumerate(new):
        state.index[x] = len(state.vertices) + 1
        state.vertices.append(x)
        state.maker_adj[x] = set()
        state.records[x] = ConnectionRecord(x)
        if pos + 1 < len(new):
            # both endpoints new: the later one freezes the earlier one at once
            state.records[x].freeze()
        else:
            state._unfrozen.append(x)
    state.maker_adj[edge.u].add(edge.v)
    state.maker_adj[edge.v].add(edge.u)
    older, younger = sorted((edge.u, edge.v), key=state.index.__getitem__)
    state.records[younger].neighbours.append(older)
    return state


def replay_moves(moves: Iterable[tuple[Player, Edge]]) -> GameState:
    state = GameState()
    for player, edge in moves:
        apply_move(state, player, edge)
    return state


# ---------------------------------------------------------------------------
# strategies and the game loop


class Strategy(Protocol):
    """What :func:`run_game` needs from a player.

    After each ``move`` call the engine also reads two optional attributes:
    ``declared_order`` (the join order when a Maker edge adds two new
    vertices) and ``last_flag`` (a fallback tag copied into the trace).
    """

    identifier: str

    def move(self, state: GameState) -> Edge:
        ...


@dataclass
class Trace:
    maker: str
    breaker: str
    turns: int
    seed: int
    digest: str
    moves: list[tuple[int, Player, Edge, Optional[str]]] = field(default_factory=list)
    aborted: Optional[str] = None
    state: Optional[GameState] = field(default=None, repr=False, compare=False)

    def header(self) -> str:
        return (f"{TRACE_MAGIC} {TRACE_VERSION} maker={self.maker} breaker={self.breaker} "
                f"turns={self.turns} seed={self.seed} digest={self.digest}")

    def to_text(self) -> str:
        lines = [self.header()]
        for turn, player, edge, flag in self.moves:
            line = f"{turn} {player.value} {edge}"
            if flag:
                line += f" {flag}"
            lines.append(line)
        if self.aborted:
            lines.append(f"# aborted: {self.aborted}")
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(self.to_text())

    def move_pairs(self) -> list[tuple[Player, Edge]]:
        return [(p, e) for _, p, e, _ in self.moves]


class TraceFormatError(ValueError):
    def __init__(self, line_no: int, message: str) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


SECTION_PREFIX = "## "


def split_sections(text: str) -> tuple[str, dict[str, str]]:
    """Separate the move list from appended ``## <name>`` sections."""
    head, sections, name = [], {}, None
    for line in text.split("\n"):
        if line.startswith(SECTION_PREFIX):
            name = line[len(SECTION_PREFIX):].strip()
            sections[name] = ""
        elif name is None:
            head.append(line)
        elif line:
            sections[name] += line + "\n"
    return "\n".join(head), sections


def parse_header(line: str) -> dict[str, str]:
    parts = line.split()
    if len(parts) < 2 or parts[0] != TRACE_MAGIC or parts[1] != TRACE_VERSION:
        raise TraceFormatError(1, f"not a {TRACE_MAGIC} {TRACE_VERSION} header")
    fields = {}
    for item in parts[2:]:
        key, sep, value = item.partition("=")
        if not sep:
            raise TraceFormatError(1, f"header field {item!r} lacks '='")
        fields[key] = value
    for key in ("maker", "breaker", "turns", "seed", "digest"):
        if key not in fields:
            raise TraceFormatError(1, f"header misses {key}=")
    return fields


def parse_move_line(line: str, line_no: int) -> tuple[int, Player, Edge, Optional[str]]:
    parts = line.split(" ")
    if len(parts) not in (4, 5):
        raise TraceFormatError(line_no, f"expected 'turn player a b [flag]', got {line!r}")
    try:
        turn = int(parts[0])
        player = Player(parts[1])
        a, b = parse_rational(parts[2]), parse_rational(parts[3])
    except ValueError as exc:
        raise TraceFormatError(line_no, str(exc)) from None
    if not a < b:
        raise TraceFormatError(line_no, "edge endpoints must be distinct and ascending")
    return turn, player, Edge(a, b), parts[4] if len(parts) == 5 else None


def parse_trace(text: str) -> Trace:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise TraceFormatError(1, "empty trace")
    head = parse_header(lines[0])
    try:
        trace = Trace(head["maker"], head["breaker"], int(head["turns"]), int(head["seed"]), head["digest"])
    except ValueError:
        raise TraceFormatError(1, "turns and seed must be integers") from None
    for no, line in enumerate(lines[1:], start=2):
        if line.startswith(SECTION_PREFIX):
            break  # appended sections (certificates) are not moves
        if line.startswith("# aborted: "):
            trace.aborted = line[len("# aborted: "):]
            continue
        trace.moves.append(parse_move_line(line, no))
    return trace


def read_trace(path) -> Trace:
    with open(path, encoding="ascii") as fh:
        return parse_trace(fh.read())


def replay(trace: Trace) -> GameState:
    """Rebuild the final state; raises :class:`IllegalMove` or :class:`TraceFormatError`."""
    state = GameState()
    for pos, (turn, player, edge, _) in enumerate(trace.moves, start=1):
        if turn != pos:
            raise TraceFormatError(pos + 1, f"turn number {turn} where {pos} was expected")
        apply_move(state, player, edge)
    return state


def config_digest(*parts: str) -> str:
    return hashlib.sha256("\x1f".join(parts).encode()).hexdigest()[:16]


def run_game(maker: Strategy, breaker: Strategy, turns: int, seed: int,
             digest: Optional[str] = None,
             on_move: Optional[Callable[[GameState], None]] = None) -> Trace:
    """Alternate Maker and Breaker for ``turns`` edges, Maker first.

    An illegal answer ends the game; the returned trace then holds the
    moves so far and ``aborted`` names the offender.
    """
    if turns < 1:
        raise ValueError("turns must be >= 1")
    if digest is None:
        digest = config_digest(maker.identifier, getattr(maker, "config_text", ""),
                               breaker.identifier, str(seed))
    trace = Trace(maker.identifier, breaker.identifier, turns, seed, digest)
    state = GameState()
    for turn in range(1, turns + 1):
        strategy = maker if turn % 2 == 1 else breaker
        player = Player.MAKER if turn % 2 == 1 else Player.BREAKER
        try:
            edge = strategy.move(state)
            order = getattr(strategy, "declared_order", None)
            apply_move(state, player, edge, order)
        except IllegalMove as exc:
            trace.aborted = f"{strategy.identifier} ({player.value}) {exc}"
            trace.state = state
            return trace
        flag = getattr(strategy, "last_flag", None)
        trace.moves.append((turn, player, edge, flag))
        if on_move is not None:
            on_move(state)
    trace.state = state
    return trace
