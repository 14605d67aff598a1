"""Verifiers, the clique extractor, and the Ramsey tools.

Reports are line oriented.  The first line is the verdict, ``OK`` or
``FAIL <n> violations``, followed by one line per violation and then any
informational lines prefixed with ``#``.

The extractor is a finite stand-in for the recursive construction of an
ordered clique ``u_1, u_2, ...`` in Maker's graph.  "Infinitely many" becomes
"at least ``threshold``".  Each step looks at the classes in the gap named by
the gap sequence, takes the first ``k(k+1)+1`` record-compatible vertices of
a chosen class as ``F``, and picks ``u_{k+1}`` from ``F``.  Every condition
it tests only gets easier as a run gets longer, and a shorter run of the
same game is a prefix of a longer one.  So the search is exhaustive:
it returns the longest chain that exists, and the achieved ``m`` can only
grow with the run length.  Ties go to the earliest choice.
"""

from __future__ import annotations

import copy
import enum
import random
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Optional, Sequence

from .breakers import PairTable
from .dense_orders import ClassId, Partition
from .engine import (Edge, GameState, IllegalMove, Player, Trace, TraceFormatError,
                     apply_move, parse_move_line, parse_trace, split_sections)
from .maker import MakerConfig, QStrategy
from .rationals import enum_index_of, enum_q, format_rational, parse_rational
from .universal import gap_at


# ---------------------------------------------------------------------------
# reports


@dataclass
class Report:
    violations: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def fail(self, message: str) -> None:
        self.violations.append(message)

    def note(self, message: str) -> None:
        self.notes.append(message)

    def verdict(self) -> str:
        return "OK" if self.ok else f"FAIL {len(self.violations)} violations"

    def text(self) -> str:
        lines = [self.verdict(), *self.violations, *(f"# {n}" for n in self.notes)]
        return "\n".join(lines) + "\n"

    def extend(self, other: "Report", prefix: str = "") -> None:
        self.violations.extend(prefix + v for v in other.violations)
        self.notes.extend(prefix + n for n in other.notes)


def _as_trace(trace) -> Trace:
    return trace if isinstance(trace, Trace) else parse_trace(trace)


# ---------------------------------------------------------------------------
# trace checks


def verify_trace(trace) -> Report:
    """Well-formedness, Maker-first alternation and legality, move by move.

    Accepts a :class:`Trace` or the raw trace text.  Unlike :func:`replay`
    this keeps going after a problem so that every violation is listed.
    """
    report = Report()
    if isinstance(trace, str):
        lines = split_sections(trace)[0].split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        try:
            parsed = parse_trace(lines[0] + "\n") if lines else None
        except TraceFormatError as exc:
            report.fail(f"header: {exc}")
            return report
        if parsed is None:
            report.fail("empty trace")
            return report
        moves = []
        for no, line in enumerate(lines[1:], start=2):
            if line.startswith("# aborted: "):
                report.fail(f"run aborted: {line[len('# aborted: '):]}")
                continue
            try:
                moves.append(parse_move_line(line, no))
            except TraceFormatError as exc:
                # keep the slot so later turns are not all reported as misnumbered
                report.fail(f"turn {no - 1}: malformed line: {exc}")
                moves.append(None)
        turns_declared = parsed.turns
    else:
        moves = list(trace.moves)
        turns_declared = trace.turns
        if trace.aborted:
            report.fail(f"run aborted: {trace.aborted}")
    claimed: dict[Edge, int] = {}
    for pos, move in enumerate(moves, start=1):
        if move is None:
            continue
        turn, player, edge, _ = move
        if turn != pos:
            report.fail(f"turn {pos}: numbered {turn}")
        due = Player.MAKER if pos % 2 == 1 else Player.BREAKER
        if player is not due:
            report.fail(f"turn {pos}: {player.value} moved but {due.value} was due")
        if edge in claimed:
            report.fail(f"turn {pos}: edge {edge} already claimed at turn {claimed[edge]}")
        else:
            claimed[edge] = pos
    if len(moves) != turns_declared:
        report.fail(f"header declares {turns_declared} turns, trace has {len(moves)}")
    report.note(f"{len(moves)} moves checked")
    return report


def verify_maker_strategy(trace, config: Optional[MakerConfig] = None) -> Report:
    """Recompute every Maker move and check the strategy's laws along the way."""
    trace = _as_trace(trace)
    if trace.maker != QStrategy.identifier:
        raise ValueError(f"trace Maker is {trace.maker!r}, not {QStrategy.identifier!r}")
    report = Report()
    maker = QStrategy(config)
    partition = maker.config.partition
    stream = maker.config.stream
    state = GameState()
    diverged = False
    flags = {"blocked-F": 0}
    recomputed_flags = 0
    adj: dict[int, set[int]] = {}  # Maker adjacency by vertex index; ints hash far faster than Fractions
    for turn, player, edge, flag in trace.moves:
        if player is Player.MAKER and not diverged:
            maker.move(state)
            plan = maker.last_plan
            if plan.edge != edge:
                report.fail(f"turn {turn}: Maker played {edge}, the strategy gives {plan.edge}")
                diverged = True
            else:
                cap = plan.ell * (plan.ell + 1) + 1
                if len(plan.F) > cap:
                    report.fail(f"turn {turn}: |F| = {len(plan.F)} exceeds {cap}")
                if plan.branch == "connect":
                    _check_balanced(state, adj, plan, turn, report)
                if plan.flag:
                    recomputed_flags += 1
                if (plan.flag or None) != (flag or None):
                    report.fail(f"turn {turn}: fallback tag {flag!r}, strategy gives {plan.flag!r}")
        if flag in flags:
            flags[flag] += 1
        try:
            apply_move(state, player, edge)
        except IllegalMove as exc:
            report.fail(str(exc))
            return report
        if player is Player.MAKER:
            i, j = state.index[edge.u], state.index[edge.v]
            adj.setdefault(i, set()).add(j)
            adj.setdefault(j, set()).add(i)
    # laws that only need the final state
    v1 = state.vertices[0] if state.vertices else None
    for k, v in enumerate(state.vertices[1:], start=2):
        rec = state.records[v].neighbours
        if not rec or rec[0] != v1:
            report.fail(f"first-connection law: v_{k} = {format_rational(v)} first joined "
                        f"{format_rational(rec[0]) if rec else 'nothing'}, not v_1")
    for k, v in enumerate(state.vertices[2:], start=3):
        want = ClassId(enum_q(stream.stream_at(k)))
        if not 0 < v < 1:
            report.fail(f"class-placement law: v_{k} = {format_rational(v)} lies outside (0,1)")
            continue
        got = partition.class_of(v)
        if got != want:
            report.fail(f"class-placement law: v_{k} in {got}, expected {want}")
    report.note(f"maker moves recomputed: {(len(trace.moves) + 1) // 2}; diverged: {diverged}")
    report.note(f"fallback blocked-F: {flags['blocked-F']} tagged, {recomputed_flags} recomputed")
    report.note(f"largest F: {maker.max_F}")
    return report


def _check_balanced(state: GameState, adj: dict[int, set[int]], plan, turn: int,
                    report: Report) -> None:
    """The chosen F-member has the fewest L-neighbours among members with a free edge."""
    v = plan.active
    lset = set(plan.L)
    best = None
    for i in plan.F:
        w = state.vertex(i)
        if w == v or Edge.of(w, v) in state.owner:
            continue
        key = (len(adj.get(i, ()) & lset), i)
        if best is None or key < best[0]:
            best = (key, w)
    chosen = plan.edge.other(v)
    if best is None or best[1] != chosen:
        report.fail(f"turn {turn}: balanced order violated by {plan.edge}")


def verify_pairing(trace) -> Report:
    """Partner responses and the per-interval density witnesses of a pairing game."""
    trace = _as_trace(trace)
    if trace.breaker != "pairing":
        raise ValueError(f"trace Breaker is {trace.breaker!r}, not 'pairing'")
    table = PairTable()
    report = Report()
    state = GameState()
    pending: Optional[tuple[int, Edge]] = None
    for turn, player, edge, _ in trace.moves:
        if player is Player.BREAKER and pending is not None:
            if edge != pending[1]:
                report.fail(f"turn {turn}: Breaker skipped the partner {pending[1]} "
                            f"of Maker's turn-{pending[0]} edge")
            pending = None
        apply_move(state, player, edge)
        if player is Player.MAKER:
            partner = table.pair_of(edge)
            if partner is not None:
                owner = state.owner.get(partner)
                if owner is Player.MAKER:
                    report.fail(f"turn {turn}: Maker owns both {edge} and {partner}")
                elif owner is None:
                    pending = (turn, partner)
    for line in density_witnesses(state, table):
        j, common, bound = line
        if common > bound:
            report.fail(f"interval {j}: {common} common neighbours exceed the bound {bound}")
        report.note(f"I_{j}: common={common} bound={bound}")
    return report


def density_witnesses(state: GameState, table: Optional[PairTable] = None) -> list[tuple[int, int, int]]:
    """For each interval I_j whose base pair is Maker-incident: (j, common I_j-neighbours, bound).

    The bound counts members of I_j that come before max(p_j, q_j) in the
    enumeration; only they can carry an unpaired pair of edges.
    """
    table = table or PairTable()
    out = []
    by_j: dict[int, list[Fraction]] = {}
    for s in state.maker_adj:
        j = table.interval_of(s)
        if j is not None:
            by_j.setdefault(j, []).append(s)
    for j in sorted(by_j):
        p, q = table.base_pair(j)
        if p not in state.maker_adj or q not in state.maker_adj:
            continue
        common = sum(1 for s in by_j[j] if p in state.maker_adj[s] and q in state.maker_adj[s])
        top = max(enum_index_of(p), enum_index_of(q))
        bound = sum(1 for t in range(1, top) if table.interval_of(enum_q(t)) == j)
        out.append((j, common, bound))
    return out


def pair_disjointness(bound: int, pairs: Optional[Iterable] = None) -> Report:
    """Check that the first ``bound`` pairs share no edge.

    ``pairs`` may supply another table of (j, s, edge, edge) tuples, which is
    how the detector itself is tested.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    source = PairTable().pairs(bound) if pairs is None else pairs
    owner: dict[Edge, tuple[int, Fraction]] = {}
    report = Report()
    n = 0
    for j, s, e1, e2 in source:
        if n >= bound:
            break
        n += 1
        if e1 == e2:
            report.fail(f"pair (j={j}, s={format_rational(s)}) repeats one edge")
        for e in (e1, e2):
            if e in owner and owner[e] != (j, s):
                i, t = owner[e]
                report.fail(f"collision on {e}: (i={i}, s={format_rational(t)}) and "
                            f"(j={j}, t={format_rational(s)})")
            owner.setdefault(e, (j, s))
    report.note(f"{n} pairs, {len(owner)} distinct edges")
    return report


# ---------------------------------------------------------------------------
# clique extraction


BOTTOM = "bottom"  # class "label" of u_1 = 0, which lies below every class


@dataclass
class StepRecord:
    """What justified u_{k+1}; ``k`` is the size of the clique before the step."""

    k: int
    gap: int  # a_k
    x: int  # class enumeration index of R_{k+1}
    label: Fraction
    candidates: list[tuple[Fraction, int]]  # (label, |W_k ∩ P|) for the qualifying gap classes
    F: list[int]  # vertex indices
    scores: list[int]  # per F member: classes with >= threshold members in its W
    chosen: int  # vertex index of u_{k+1}
    w_sample: list[int]  # leading members of W_{k+1}
    w_size: int


@dataclass
class CliqueCertificate:
    vertices: list[Fraction]
    indices: list[int]
    labels: list[object]  # R_i: BOTTOM for u_1, else a Fraction label
    steps: list[StepRecord]
    threshold: int
    m_max: int
    w1_size: int

    @property
    def m(self) -> int:
        return len(self.vertices)

    def to_text(self) -> str:
        fr = format_rational
        lines = [f"certificate m={self.m} threshold={self.threshold} m_max={self.m_max} w1={self.w1_size}"]
        for i, (v, ix, lab) in enumerate(zip(self.vertices, self.indices, self.labels), start=1):
            lines.append(f"u {i} {ix} {fr(v)} {lab if lab == BOTTOM else fr(lab)}")
        for st in self.steps:
            cands = ",".join(f"{fr(lab)}:{c}" for lab, c in st.candidates)
            lines.append(
                f"step {st.k} gap={st.gap} x={st.x} label={fr(st.label)} chosen={st.chosen} "
                f"F={','.join(map(str, st.F))} scores={','.join(map(str, st.scores))} "
                f"cands={cands} w={st.w_size} sample={','.join(map(str, st.w_sample))}"
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CliqueCertificate":
        lines = [ln for ln in text.split("\n") if ln]
        head = dict(item.split("=", 1) for item in lines[0].split()[1:])
        cert = cls([], [], [], [], int(head["threshold"]), int(head["m_max"]), int(head["w1"]))
        for line in lines[1:]:
            parts = line.split()
            if parts[0] == "u":
                cert.indices.append(int(parts[2]))
                cert.vertices.append(parse_rational(parts[3]))
                cert.labels.append(BOTTOM if parts[4] == BOTTOM else parse_rational(parts[4]))
            elif parts[0] == "step":
                kv = dict(p.split("=", 1) for p in parts[2:])

                def ints(s: str) -> list[int]:
                    return [int(x) for x in s.split(",")] if s else []

                cands = []
                for item in kv["cands"].split(",") if kv["cands"] else []:
                    lab, c = item.rsplit(":", 1)
                    cands.append((parse_rational(lab), int(c)))
                cert.steps.append(StepRecord(
                    int(parts[1]), int(kv["gap"]), int(kv["x"]), parse_rational(kv["label"]),
                    cands, ints(kv["F"]), ints(kv["scores"]), int(kv["chosen"]),
                    ints(kv["sample"]), int(kv["w"])))
        return cert


W_SAMPLE = 16
CERT_SECTION = "certificate"


def append_certificate(trace_text: str, cert: CliqueCertificate) -> str:
    """Trace text with ``cert`` as an appended section (replacing an older one)."""
    head, sections = split_sections(trace_text)
    sections[CERT_SECTION] = cert.to_text()
    out = head.rstrip("\n") + "\n"
    for name, body in sections.items():
        out += f"## {name}\n{body}"
    return out


def read_certificate(trace_text: str) -> Optional[CliqueCertificate]:
    body = split_sections(trace_text)[1].get(CERT_SECTION)
    return CliqueCertificate.from_text(body) if body else None


class _Extraction:
    """Shared views of a final state: classes and record-prefix buckets."""

    def __init__(self, state: GameState, partition: Partition) -> None:
        self.state = state
        self.partition = partition
        self.cls: dict[int, Optional[ClassId]] = {}
        for k, v in enumerate(state.vertices, start=1):
            self.cls[k] = partition.class_of(v) if 0 < v < 1 else None
        # prefix (as vertex indices) -> vertex indices whose record starts with it
        self.bucket: dict[tuple[int, ...], list[int]] = {}
        for k, v in enumerate(state.vertices, start=1):
            rec = state.record_indices(v)
            for j in range(1, len(rec) + 1):
                self.bucket.setdefault(rec[:j], []).append(k)

    def W(self, prefix: tuple[int, ...]) -> list[int]:
        return self.bucket.get(prefix, [])

    def class_counts(self, members: Iterable[int]) -> dict[Fraction, int]:
        counts: dict[Fraction, int] = {}
        for k in members:
            c = self.cls[k]
            if c is not None:
                counts[c.label] = counts.get(c.label, 0) + 1
        return counts


def _gap_bounds(labels: Sequence[object], i: int) -> tuple[Optional[Fraction], Optional[Fraction]]:
    """Open interval of class labels directly above R_i, as (low, high); None = unbounded."""
    lo = labels[i - 1]
    concrete = sorted(lab for lab in labels if lab != BOTTOM)
    low = None if lo == BOTTOM else lo
    if low is None:
        high = concrete[0] if concrete else None
    else:
        pos = bisect_left(concrete, low)
        high = concrete[pos + 1] if pos + 1 < len(concrete) else None
    return low, high


def _in_gap(label: Fraction, low, high) -> bool:
    return (low is None or label > low) and (high is None or label < high)


def _qualifying(counts: dict[Fraction, int], low, high, threshold: int) -> list[tuple[Fraction, int]]:
    """Classes in the gap with at least ``threshold`` members, in class-enumeration order."""
    out = [(lab, c) for lab, c in counts.items() if c >= threshold and _in_gap(lab, low, high)]
    out.sort(key=lambda item: enum_index_of(item[0]))
    return out


def _score(ex: _Extraction, labels: Sequence[object], members: list[int], threshold: int) -> int:
    counts = ex.class_counts(members)
    total = 0
    for i in range(1, len(labels) + 1):
        low, high = _gap_bounds(labels, i)
        total += len(_qualifying(counts, low, high, threshold))
    return total


def extract_clique(state: GameState, records=None, m_max: int = 8, threshold: int = 3,
                   config: Optional[MakerConfig] = None) -> CliqueCertificate:
    """Longest certified ordered clique, built as in the recursion described above.

    ``records`` is accepted for interface symmetry; the connection records
    are read from ``state``.
    """
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    config = config or MakerConfig()
    if not state.vertices:
        raise ValueError("extraction needs at least the opening move")
    ex = _Extraction(state, config.partition)
    v1 = state.vertices[0]
    w1 = [k for k in range(2, len(state.vertices) + 1)]

    best: list = [[]]  # best path of StepRecords

    def search(indices: list[int], labels: list[object], W: list[int], path: list[StepRecord]) -> None:
        if len(path) > len(best[0]):
            best[0] = list(path)
        k = len(indices)
        if k >= m_max:
            return
        gap = gap_at(k)
        low, high = _gap_bounds(labels, gap)
        counts = ex.class_counts(W)
        cands = _qualifying(counts, low, high, threshold)
        size = k * (k + 1) + 1
        prefix = tuple(indices)
        for lab, _ in cands:
            members = [w for w in W if ex.cls[w] is not None and ex.cls[w].label == lab]
            if len(members) < size:
                continue
            F = members[:size]
            new_labels = labels + [lab]
            nexts = [ex.W(prefix + (f,)) for f in F]
            scores = [_score(ex, new_labels, nx, threshold) for nx in nexts]
            for f, nx in zip(F, nexts):
                step = StepRecord(k, gap, enum_index_of(lab), lab, cands, F, scores, f,
                                  nx[:W_SAMPLE], len(nx))
                path.append(step)
                search(indices + [f], new_labels, nx, path)
                path.pop()
                if len(best[0]) >= m_max - 1:
                    return

    search([1], [BOTTOM], w1, [])
    steps = best[0]
    indices = [1] + [st.chosen for st in steps]
    return CliqueCertificate(
        vertices=[state.vertex(i) for i in indices],
        indices=indices,
        labels=[BOTTOM] + [st.label for st in steps],
        steps=steps,
        threshold=threshold,
        m_max=m_max,
        w1_size=len(w1),
    )


def check_certificate(cert: CliqueCertificate, state: GameState,
                      config: Optional[MakerConfig] = None) -> Report:
    """Re-derive every claim of ``cert`` from ``state``."""
    config = config or MakerConfig()
    report = Report()
    n = len(state.vertices)
    if cert.threshold < 1:
        report.fail(f"threshold {cert.threshold} must be >= 1")
    if not 1 <= cert.m <= max(cert.m_max, 1):
        report.fail(f"m = {cert.m} outside 1..m_max = {cert.m_max}")
    if not (len(cert.vertices) == len(cert.indices) == len(cert.labels) == len(cert.steps) + 1):
        report.fail("certificate fields have inconsistent lengths")
        return report
    for i, (k, v) in enumerate(zip(cert.indices, cert.vertices), start=1):
        if not 1 <= k <= n or state.vertex(k) != v:
            report.fail(f"u_{i}: index {k} does not name {format_rational(v)}")
            return report
    if cert.indices[0] != 1 or cert.labels[0] != BOTTOM:
        report.fail("recursion start: u_1 must be v_1 with the bottom label")
    if len(set(cert.indices)) != len(cert.indices):
        report.fail("clique vertices repeat")
    if cert.w1_size != n - 1:
        report.fail(f"|W_1| recorded {cert.w1_size}, actual {n - 1}")
    # (a) the clique lies in Maker's graph
    for a, b in combinations(cert.vertices, 2):
        if b not in state.maker_adj.get(a, ()):
            report.fail(f"(a) edge {format_rational(a)} {format_rational(b)} is not Maker's")
    ex = _Extraction(state, config.partition)
    for i, (k, lab) in enumerate(zip(cert.indices[1:], cert.labels[1:]), start=2):
        c = ex.cls.get(k)
        if c is None or c.label != lab:
            report.fail(f"u_{i}: recorded class label {lab} but the vertex lies in {c}")
    W = list(range(2, n + 1))
    labels: list[object] = [BOTTOM]
    for step_no, st in enumerate(cert.steps):
        k = step_no + 1
        tag = f"step {k}->{k + 1}"
        if st.k != k:
            report.fail(f"{tag}: recorded k={st.k}")
        # (d) gap placement
        if st.gap != gap_at(k):
            report.fail(f"(d) {tag}: gap index {st.gap}, the gap sequence gives {gap_at(k)}")
        gap = gap_at(k)
        low, high = _gap_bounds(labels, gap)
        if not _in_gap(st.label, low, high):
            report.fail(f"(d) {tag}: class {format_rational(st.label)} is not directly above R_{gap}")
        if st.label != cert.labels[k]:
            report.fail(f"{tag}: step label differs from R_{k + 1}")
        if enum_q(st.x) != st.label if st.x >= 1 else True:
            report.fail(f"{tag}: x = {st.x} does not enumerate class {format_rational(st.label)}")
        counts = ex.class_counts(W)
        cands = _qualifying(counts, low, high, cert.threshold)
        if st.candidates != cands:
            report.fail(f"{tag}: qualifying classes recorded {st.candidates}, actual {cands}")
        if st.label not in {lab for lab, _ in cands}:
            report.fail(f"{tag}: class {format_rational(st.label)} has fewer than "
                        f"{cert.threshold} members of W_{k}")
        members = [w for w in W if ex.cls[w] is not None and ex.cls[w].label == st.label]
        F = members[: k * (k + 1) + 1]
        if len(F) < k * (k + 1) + 1:
            report.fail(f"{tag}: F has {len(F)} < {k * (k + 1) + 1} vertices")
        if st.F != F:
            report.fail(f"{tag}: F recorded {st.F}, actual {F}")
        if st.chosen not in F:
            report.fail(f"{tag}: u_{k + 1} (index {st.chosen}) is not in F")
        if st.chosen != cert.indices[k]:
            report.fail(f"{tag}: chosen index {st.chosen} differs from u_{k + 1}")
        new_labels = labels + [st.label]
        prefix = tuple(cert.indices[: k])
        nexts = [ex.W(prefix + (f,)) for f in F]
        scores = [_score(ex, new_labels, nx, cert.threshold) for nx in nexts]
        if st.scores != scores:
            report.fail(f"{tag}: scores recorded {st.scores}, actual {scores}")
        # (b) reservoir
        before = counts
        W = ex.W(tuple(cert.indices[: k + 1]))
        # survival: restricting W can only lose members, so every class that
        # meets the threshold after the step already met it before
        for lab, c in ex.class_counts(W).items():
            if c > before.get(lab, 0):
                report.fail(f"{tag}: class {format_rational(lab)} gained members under restriction")
        if st.w_size != len(W):
            report.fail(f"(b) {tag}: |W_{k + 1}| recorded {st.w_size}, actual {len(W)}")
        if st.w_sample != W[:W_SAMPLE]:
            report.fail(f"(b) {tag}: W_{k + 1} sample does not match")
        want = tuple(cert.indices[: k + 1])
        for w in st.w_sample:
            if not 1 <= w <= n or state.record_indices(state.vertex(w))[: k + 1] != want:
                report.fail(f"(b) {tag}: vertex index {w} has the wrong record prefix")
        labels = new_labels
    report.note(f"certificate m={cert.m} threshold={cert.threshold}: {len(cert.steps)} steps re-derived")
    return report


def mutate_certificate(cert: CliqueCertificate, rng: random.Random,
                       state: Optional[GameState] = None) -> tuple[str, CliqueCertificate]:
    """One single-field corruption of ``cert`` (for fuzzing the checker).

    Every mutation replaces one recorded value by a different one that the
    state contradicts.  Threshold changes go up past the chosen class's
    count or down to zero, since lowering it inside the slack would leave a
    true certificate.
    """
    bad = copy.deepcopy(cert)
    kinds = ["vertex", "index", "label", "threshold", "w1"]
    if bad.steps:
        kinds += ["gap", "x", "cand", "F", "score", "chosen", "sample", "wsize", "steplabel"]
    kind = rng.choice(kinds)
    n = len(state.vertices) if state is not None else 10 ** 6
    if kind == "vertex":
        i = rng.randrange(bad.m)
        bad.vertices[i] = bad.vertices[i] + Fraction(1, rng.randint(10 ** 6, 10 ** 7))
    elif kind == "index":
        i = rng.randrange(bad.m)
        bad.indices[i] = bad.indices[i] + rng.choice([-1, 1]) if bad.indices[i] > 1 else 2
    elif kind == "label":
        i = rng.randrange(bad.m)
        if i == 0:
            bad.labels[0] = Fraction(0)
        else:
            while bad.labels[i] == cert.labels[i]:  # a random draw can hit the true label
                bad.labels[i] = Fraction(rng.randint(-50, 50), rng.randint(51, 97))
    elif kind == "threshold":
        if bad.steps and rng.random() < 0.8:
            st = bad.steps[rng.randrange(len(bad.steps))]
            chosen = dict(st.candidates).get(st.label, 0)
            bad.threshold = chosen + rng.randint(1, 5)
        else:
            bad.threshold = 0
    elif kind == "w1":
        bad.w1_size += rng.choice([-1, 1])
    else:
        st = bad.steps[rng.randrange(len(bad.steps))]
        if kind == "gap":
            st.gap += rng.randint(1, 3)
        elif kind == "x":
            st.x += rng.randint(1, 3)
        elif kind == "cand":
            if st.candidates and rng.random() < 0.5:
                lab, c = st.candidates[rng.randrange(len(st.candidates))]
                idx = st.candidates.index((lab, c))
                st.candidates[idx] = (lab, c + rng.choice([-1, 1]))
            else:
                st.candidates.append((Fraction(rng.randint(1, 99), 100) + Fraction(1, 997), 10 ** 6))
        elif kind == "F":
            i = rng.randrange(len(st.F))
            st.F[i] = st.F[i] + rng.randint(1, 5)
        elif kind == "score":
            i = rng.randrange(len(st.scores))
            st.scores[i] += rng.choice([-1, 1])
        elif kind == "chosen":
            others = [f for f in range(1, n + 1) if f != st.chosen][:50]
            st.chosen = rng.choice(others)
        elif kind == "sample":
            if st.w_sample and rng.random() < 0.7:
                i = rng.randrange(len(st.w_sample))
                st.w_sample[i] += rng.randint(1, 3)
            else:
                st.w_sample.append(n + 1)
        elif kind == "wsize":
            st.w_size += rng.choice([-1, 1])
        elif kind == "steplabel":
            st.label = st.label + Fraction(1, rng.randint(10 ** 6, 10 ** 7))
    return kind, bad


# ---------------------------------------------------------------------------
# Ramsey tools


class Colour(str, enum.Enum):
    RED = "red"
    BLUE = "blue"


def index_colouring(i: int, j: int) -> Colour:
    """Blue when value order and enumeration order of q_i, q_j agree."""
    if i == j:
        raise ValueError("index_colouring needs two distinct indices")
    qi, qj = enum_q(i), enum_q(j)
    if (qi <= qj and i <= j) or (qj <= qi and j <= i):
        return Colour.BLUE
    return Colour.RED


def _longest_monotone(values: Sequence[Fraction]) -> int:
    tails: list[Fraction] = []
    for x in values:
        pos = bisect_left(tails, x)
        if pos == len(tails):
            tails.append(x)
        else:
            tails[pos] = x
    return len(tails)


def max_mono_clique_prefix(n: int, colour) -> int:
    """Largest clique on e_1..e_n monochromatic in ``colour`` under index_colouring.

    Blue cliques are exactly the increasing subsequences of (e_1, ..., e_n)
    and red ones the decreasing ones, so patience sorting answers it.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    colour = Colour(colour)
    values = [enum_q(i) for i in range(1, n + 1)]
    if colour is Colour.RED:
        values = [-v for v in values]
    return _longest_monotone(values)


@dataclass
class ColouringOracle:
    """A vertex 2-colouring of Q with a query counter."""

    name: str
    rule: Callable[[Fraction], Colour]
    budget: Optional[int] = None
    queries: int = 0

    def __call__(self, r: Fraction) -> Colour:
        if self.budget is not None and self.queries >= self.budget:
            raise RuntimeError(f"oracle {self.name} exceeded its budget of {self.budget} queries")
        self.queries += 1
        return self.rule(r)


def builtin_oracle(spec: str, budget: Optional[int] = None) -> ColouringOracle:
    rules = {
        "all-blue": lambda r: Colour.BLUE,
        "all-red": lambda r: Colour.RED,
        "denominator-parity": lambda r: Colour.RED if Fraction(r).denominator % 2 else Colour.BLUE,
    }
    if spec not in rules:
        raise ValueError(f"unknown oracle {spec!r}; choose from {', '.join(rules)}")
    return ColouringOracle(spec, rules[spec], budget)


def dense_labels(count: int) -> list[Fraction]:
    """``count`` class labels, taken level by level from the dyadic refinement of (-1, 1).

    Level 0 is {0}; each further level adds the midpoints of the gaps of
    the previous one together with the two outer ends, so any two labels
    of a completed level have another label of the next level between them.
    """
    out = [Fraction(0)]
    points = [Fraction(-1), Fraction(0), Fraction(1)]
    while len(out) < count:
        mids = [(a + b) / 2 for a, b in zip(points, points[1:])]
        out.extend(mids)
        points = sorted(points + mids)
    return out[:count]


@dataclass
class DenseSubsetResult:
    case: Optional[int]  # 1, 2, or None when inconclusive
    elements: list[Fraction]
    labels: list[Fraction]
    colour: Optional[Colour]
    queries: int

    @property
    def inconclusive(self) -> bool:
        return self.case is None


def mono_dense_subset(oracle: ColouringOracle, count: int, budget: int,
                      partition: Optional[Partition] = None) -> DenseSubsetResult:
    """Follow the two cases of the argument with at most ``budget`` queries per class.

    Case 2: every chosen class shows a red member, one red element per class.
    Case 1: some class shows no red member within the budget, so its first
    ``count`` members (all blue) are returned; this verdict is only as good
    as the budget.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    partition = partition or Partition()
    labels = dense_labels(count)
    reds: list[Fraction] = []
    for lab in labels:
        c = ClassId(lab)
        found = None
        blues = []
        for j in range(1, budget + 1):
            r = partition.class_member(c, j)
            if oracle(r) is Colour.RED:
                found = r
                break
            blues.append(r)
        if found is None:
            if len(blues) >= count:
                return DenseSubsetResult(1, blues[:count], [lab], Colour.BLUE, oracle.queries)
            return DenseSubsetResult(None, blues, [lab], None, oracle.queries)
        reds.append(found)
    return DenseSubsetResult(2, reds, labels, Colour.RED, oracle.queries)
