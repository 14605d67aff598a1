"""The enumeration of finite words behind the universal sequence.

Words are nonempty tuples of positive integers.  They are listed by
*weight* ``len(w) + sum(w)`` and, inside one weight, lexicographically::

    (1) | (2) | (1,1) (3) | (1,2) (2,1) (4) | (1,1,1) (1,3) (2,2) (3,1) (5) | ...

Adding one to every letter turns a word of weight ``W`` into a composition
of ``W`` with parts at least two, so there are ``F(W-1)`` words of weight
``W`` (Fibonacci numbers).  Ranks therefore grow exponentially in the
letters involved, and the helpers here never enumerate words one by one
when a closed form exists:

* :func:`succ` and :func:`pred` step through the order in O(len) time;
  :func:`rank` is exact with big integers.
* :class:`WordConstraint` describes "prefix P, suffix Q, contains C,
  length >= n".  It finds the least word at or above a bound satisfying it
  with a feasibility table indexed by remaining weight.
* :class:`OccurrenceFinder` finds the next place where a pattern occurs in
  the concatenation ``X = w_1 w_2 w_3 ...`` of all words.  Each way of
  cutting the pattern across word boundaries either pins down one word
  (a *single* candidate) or leaves a regular family of words that the
  constraint search handles.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterator, Optional

Word = tuple[int, ...]


def weight(w: Word) -> int:
    return len(w) + sum(w)


def min_word(r: int) -> Word:
    """Lexicographically least word of weight ``r`` (r >= 2)."""
    if r < 2:
        raise ValueError(f"no word has weight {r}")
    if r % 2 == 0:
        return (1,) * (r // 2)
    return (1,) * ((r - 3) // 2) + (2,)


def succ(w: Word) -> Word:
    """The word right after ``w`` in the enumeration."""
    if len(w) == 1:
        return min_word(w[0] + 2)
    y, z = w[-2], w[-1]
    if z >= 2:
        return w[:-2] + (y + 1,) + min_word(z)
    return w[:-2] + (y + 2,)


def pred(w: Word) -> Optional[Word]:
    """The word right before ``w``, or ``None`` for the first word ``(1,)``."""
    total = weight(w)
    n = len(w)
    if w[-1] >= 3:
        return w[:-1] + (w[-1] - 2, 1)
    tail = w[-1] + 1  # weight of the letters after position i, grown below
    for i in range(n - 2, -1, -1):
        if w[i] >= 2:
            return w[:i] + (w[i] - 1, tail)
        tail += w[i] + 1
    # w is the least word of its weight
    if total <= 2:
        return None
    return (total - 2,)


class _Counts:
    """Number of words per weight, and cumulative sums, extended on demand."""

    def __init__(self) -> None:
        self.n = [1, 0]  # n[r]: words of weight r, with the empty word at r=0
        self.cn = [1, 1]  # cn[r] = n[0] + ... + n[r]

    def _grow(self, r: int) -> None:
        n, cn = self.n, self.cn
        while len(n) <= r:
            k = len(n)
            n.append(cn[k - 2])
            cn.append(cn[-1] + n[-1])

    def count(self, r: int) -> int:
        if r < 0:
            return 0
        self._grow(r)
        return self.n[r]

    def cumulative(self, r: int) -> int:
        if r < 0:
            return 0
        self._grow(r)
        return self.cn[r]


COUNTS = _Counts()


def rank(w: Word) -> int:
    """1-based position of ``w`` in the enumeration."""
    total = weight(w)
    before = COUNTS.cumulative(total - 1) - 1  # all lighter nonempty words
    rest = total
    for x in w:
        before += COUNTS.cumulative(rest - 2) - COUNTS.cumulative(rest - x - 1)
        rest -= x + 1
    return before + 1


def unrank(k: int) -> Word:
    """Inverse of :func:`rank`."""
    if k < 1:
        raise ValueError("ranks start at 1")
    total = 2
    k -= 1  # number of words before the target
    while k >= COUNTS.count(total):
        k -= COUNTS.count(total)
        total += 1
    out = []
    rest = total
    while rest > 0:
        y = 1
        while True:
            c = COUNTS.count(rest - y - 1)
            if k < c:
                break
            k -= c
            y += 1
        out.append(y)
        rest -= y + 1
    return tuple(out)


def iter_words(start: Word = (1,)) -> Iterator[Word]:
    w = start
    while True:
        yield w
        w = succ(w)


# ---------------------------------------------------------------------------
# Constrained least-word search


def _kmp_table(pattern: Word) -> list[int]:
    fail = [0] * (len(pattern) + 1)
    k = 0
    for i in range(1, len(pattern)):
        while k and pattern[i] != pattern[k]:
            k = fail[k]
        if pattern[i] == pattern[k]:
            k += 1
        fail[i + 1] = k
    return fail


def _kmp_step(pattern: Word, fail: list[int], state: int, letter: Optional[int]) -> int:
    # letter None stands for any letter absent from the pattern
    if state == len(pattern):
        state = fail[state]
    while True:
        if letter is not None and state < len(pattern) and pattern[state] == letter:
            return state + 1
        if state == 0:
            return 0
        state = fail[state]


_FREE = None


@dataclass
class WordConstraint:
    """Words with a given prefix and suffix, containing a factor, of a minimum length.

    Letters outside the constraint's own alphabet are interchangeable, so the
    automaton reads them as a single symbol.  ``feasible(state, r)`` tells
    whether some completion of remaining weight ``r`` is accepted; the table
    is filled for all states one weight at a time.
    """

    prefix: Word = ()
    suffix: Word = ()
    factor: Word = ()
    min_len: int = 0
    _special: tuple[int, ...] = field(init=False, repr=False)
    _states: dict = field(init=False, repr=False)
    _trans: list = field(init=False, repr=False)
    _accept: list = field(init=False, repr=False)
    _table: list = field(init=False, repr=False)
    _trues: list = field(init=False, repr=False)
    _cum: list = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._special = tuple(sorted(set(self.prefix) | set(self.suffix) | set(self.factor)))
        self._qfail = _kmp_table(self.suffix)
        self._cfail = _kmp_table(self.factor)
        self._states = {}
        self._trans = []
        self._accept = []
        start = (0, 0, 0, 0)
        self.start = self._intern(start)
        # explore reachable states
        todo = [start]
        while todo:
            raw = todo.pop()
            sid = self._states[raw]
            moves = {}
            for y in self._special + (_FREE,):
                nxt = self._raw_step(raw, y)
                if nxt is None:
                    continue
                if nxt not in self._states:
                    self._intern(nxt)
                    todo.append(nxt)
                moves[y] = self._states[nxt]
            self._trans[sid] = moves
        n = len(self._trans)
        self._table = [bytearray() for _ in range(n)]
        self._trues = [[] for _ in range(n)]
        self._cum = [[] for _ in range(n)]

    def _intern(self, raw) -> int:
        sid = len(self._trans)
        self._states[raw] = sid
        self._trans.append({})
        p, q, c, n = raw
        self._accept.append(
            p == len(self.prefix) and q == len(self.suffix)
            and c == len(self.factor) and n == self.min_len
        )
        return sid

    def _raw_step(self, raw, y):
        p, q, c, n = raw
        if p < len(self.prefix):
            if y != self.prefix[p]:
                return None
            p += 1
        q = _kmp_step(self.suffix, self._qfail, q, y) if self.suffix else 0
        if c < len(self.factor):
            c = _kmp_step(self.factor, self._cfail, c, y)
        n = min(n + 1, self.min_len)
        return (p, q, c, n)

    # -- feasibility table -------------------------------------------------
    def _extend(self, r_max: int) -> None:
        table, trues, cum = self._table, self._trues, self._cum
        special = self._special
        for r in range(len(table[0]), r_max + 1):
            col = []
            for sid, moves in enumerate(self._trans):
                ok = r == 0 and self._accept[sid]
                if not ok and r >= 2:
                    for y in special:
                        if y > r - 1:
                            break
                        t = moves.get(y)
                        if t is not None and table[t][r - y - 1]:
                            ok = True
                            break
                    if not ok:
                        t = moves.get(_FREE)
                        if t is not None:
                            hits = cum[t][r - 2]
                            for y in special:
                                if y > r - 1:
                                    break
                                if table[t][r - y - 1]:
                                    hits -= 1
                            ok = hits > 0
                col.append(ok)
            for sid, ok in enumerate(col):
                table[sid].append(ok)
                if ok:
                    trues[sid].append(r)
                prev = cum[sid][-1] if cum[sid] else 0
                cum[sid].append(prev + ok)

    def feasible(self, sid: int, r: int) -> bool:
        if r < 0:
            return False
        if r >= len(self._table[0]):
            self._extend(r)
        return bool(self._table[sid][r])

    def weight_floor(self) -> int:
        """A cheap lower bound on the weight of accepted words.

        Exact when there is no factor constraint: the word is either P and Q
        glued along an overlap, or P, a filler of ones, then Q.
        """
        if self.factor:
            return max(weight(self.factor), weight(self.prefix), weight(self.suffix), 2 * self.min_len, 2)
        p, q = self.prefix, self.suffix
        best = None
        for length in range(max(len(p), len(q), self.min_len, 1), len(p) + len(q)):
            cut = len(p) + len(q) - length  # letters shared by P and Q
            if p[len(p) - cut:] == q[:cut]:
                w = p + q[cut:]
                best = weight(w) if best is None else min(best, weight(w))
        gap = max(0, self.min_len - len(p) - len(q))
        if len(p) + len(q) == 0 and gap == 0:
            gap = 1
        glued = weight(p) + weight(q) + 2 * gap
        return glued if best is None else min(best, glued)

    def min_weight(self, limit: int) -> Optional[int]:
        """Least weight of an accepted word, searching up to ``limit``."""
        self._extend(limit)
        for r in self._trues[self.start]:
            if r >= 2:
                return r
        return None

    def step(self, sid: int, y: int) -> Optional[int]:
        moves = self._trans[sid]
        if y in moves:
            return moves[y]
        if y in self._special:
            return None
        return moves.get(_FREE)

    def accepts(self, w: Word) -> bool:
        sid: Optional[int] = self.start
        for y in w:
            sid = self.step(sid, y)
            if sid is None:
                return False
        return self._accept[sid]

    def _least_letter(self, sid: int, rest: int, above: int) -> Optional[tuple[int, int]]:
        """Smallest letter y > above leading to a feasible state, with that state."""
        best: Optional[tuple[int, int]] = None
        moves = self._trans[sid]
        for y in self._special:
            if y <= above or y > rest - 1:
                continue
            t = moves.get(y)
            if t is not None and self.feasible(t, rest - y - 1):
                best = (y, t)
                break
        t = moves.get(_FREE)
        if t is not None and rest - above - 2 >= 0:
            self.feasible(t, rest)  # make sure the table reaches this far
            trues = self._trues[t]
            k = bisect_right(trues, rest - above - 2)
            special = set(self._special)
            while k > 0:
                r2 = trues[k - 1]
                y = rest - r2 - 1
                if best is not None and y >= best[0]:
                    break
                if y not in special:
                    best = (y, t)
                    break
                k -= 1
        return best

    def _complete(self, sid: int, rest: int) -> list[int]:
        out: list[int] = []
        while rest > 0:
            pick = self._least_letter(sid, rest, 0)
            assert pick is not None, "feasibility table promised a completion"
            y, sid = pick
            out.append(y)
            rest -= y + 1
        return out

    def least_of_weight(self, total: int) -> Optional[Word]:
        if not self.feasible(self.start, total):
            return None
        return tuple(self._complete(self.start, total))

    def least_at_least(self, lower: Word, max_weight: int) -> Optional[Word]:
        """Least accepted word ``>= lower`` of weight at most ``max_weight``."""
        total = weight(lower)
        if total > max_weight:
            return None
        self.feasible(self.start, max_weight)
        states = [self.start]
        for y in lower:
            nxt = self.step(states[-1], y)
            if nxt is None:
                break
            states.append(nxt)
        if len(states) == len(lower) + 1 and self._accept[states[-1]]:
            return lower
        used = [0]
        for y in lower:
            used.append(used[-1] + y + 1)
        for i in range(len(states) - 1, -1, -1):
            if i == len(lower):
                continue
            pick = self._least_letter(states[i], total - used[i], lower[i])
            if pick is not None:
                y, t = pick
                return lower[:i] + (y,) + tuple(self._complete(t, total - used[i] - y - 1))
        for w_total in range(total + 1, max_weight + 1):
            if self.feasible(self.start, w_total):
                return tuple(self._complete(self.start, w_total))
        return None


# ---------------------------------------------------------------------------
# Occurrences inside X = w_1 w_2 w_3 ...


@dataclass(frozen=True, order=True)
class XPos:
    """A letter of X: word rank, then offset inside the word."""

    rank: int
    offset: int


@dataclass(frozen=True)
class XOccurrence:
    start: XPos
    end: XPos  # position of the last letter
    start_word: Word
    end_word: Word


def _read_forward(w: Word, offset: int, count: int) -> Optional[tuple[list[int], Word, int, int]]:
    """``count`` letters of X from (w, offset); also the word/offset of the last one."""
    out: list[int] = []
    hops = 0
    while True:
        take = w[offset:offset + count - len(out)]
        out.extend(take)
        if len(out) == count:
            return out, w, offset + len(take) - 1, hops
        w = succ(w)
        offset = 0
        hops += 1


def _occurrence_at(pattern: Word, w: Word, offset: int, to_boundary: bool) -> Optional[XOccurrence]:
    if offset < 0 or offset >= len(w):
        return None
    letters, last_word, last_off, hops = _read_forward(w, offset, len(pattern))
    if tuple(letters) != pattern:
        return None
    if to_boundary and last_off != len(last_word) - 1:
        return None
    r = rank(w)
    return XOccurrence(XPos(r, offset), XPos(r + hops, last_off), w, last_word)


def _cut_sets(k: int) -> Iterator[tuple[int, ...]]:
    for mask in range(1, 1 << (k - 1)):
        yield tuple(i for i in range(1, k) if mask >> (i - 1) & 1)


@dataclass
class _Family:
    constraint: WordConstraint
    offset_from_end: Optional[int]  # occurrence offset is len(w) - this; None: search inside


class OccurrenceFinder:
    """Finds occurrences of one pattern in X, in order, without scanning X.

    ``to_boundary`` restricts to occurrences whose last letter ends a word.
    """

    #: words scanned letter by letter before the structural search kicks in
    SCAN_WORDS = 48

    def __init__(self, pattern: Word, to_boundary: bool = False) -> None:
        if not pattern or min(pattern) < 1:
            raise ValueError("patterns are nonempty words of positive integers")
        self.pattern = tuple(pattern)
        self.to_boundary = to_boundary
        self._singles: list[tuple[Word, int]] = []
        self._families: list[_Family] = []
        self._plan()

    def _plan(self) -> None:
        u = self.pattern
        k = len(u)
        singles: set[tuple[Word, int]] = set()
        if self.to_boundary:
            self._families.append(_Family(WordConstraint(suffix=u), k))
            for cuts in _cut_sets(k):
                last = u[cuts[-1]:]
                w: Optional[Word] = last
                for _ in cuts:
                    w = pred(w) if w is not None else None
                if w is not None:
                    singles.add((w, len(w) - cuts[0]))
        else:
            self._families.append(_Family(WordConstraint(factor=u), None))
            for cuts in _cut_sets(k):
                a, b = u[:cuts[0]], u[cuts[-1]:]
                if len(cuts) >= 2:
                    w = pred(u[cuts[0]:cuts[1]])
                    if w is not None:
                        singles.add((w, len(w) - len(a)))
                    continue
                singles.add((a, 0))
                for j in range(len(b)):
                    if b[j] >= 3 and a[-1] == 1:
                        w = b[:j] + (b[j] - 2, 1)
                        singles.add((w, len(w) - len(a)))
                    if b[j] >= 2:
                        w = b[:j] + (b[j] - 1, a[-1])
                        singles.add((w, len(w) - len(a)))
                self._families.append(
                    _Family(WordConstraint(prefix=b, suffix=a, min_len=len(b) + 2), len(a))
                )
        self._singles = sorted(singles)

    # -- structural search ---------------------------------------------------
    def _single_hits(self, at: XPos) -> list[XOccurrence]:
        hits = []
        for w, off in self._singles:
            occ = _occurrence_at(self.pattern, w, off, self.to_boundary)
            if occ is not None and occ.start >= at:
                hits.append(occ)
        return hits

    def _family_hit(self, fam: _Family, at_word: Word, at: XPos, max_weight: int) -> Optional[XOccurrence]:
        lower = at_word
        while True:
            w = fam.constraint.least_at_least(lower, max_weight)
            if w is None:
                return None
            if fam.offset_from_end is not None:
                offsets = [len(w) - fam.offset_from_end]
            else:
                offsets = _find_all(self.pattern, w)
            r = rank(w)
            for off in offsets:
                if XPos(r, off) >= at:
                    occ = _occurrence_at(self.pattern, w, off, self.to_boundary)
                    if occ is not None:
                        return occ
            lower = succ(w)

    def structural_next(self, at_word: Word, at: XPos,
                        max_weight: Optional[int] = None) -> Optional[XOccurrence]:
        """First occurrence starting at or after ``at``.

        ``at_word`` is the word of rank ``at.rank``.  With ``max_weight``
        only occurrences starting in words of at most that weight count, and
        None means there is none; without it an answer always exists.
        """
        best: Optional[XOccurrence] = None
        for occ in self._single_hits(at):
            if max_weight is not None and weight(occ.start_word) > max_weight:
                continue
            if best is None or occ.start < best.start:
                best = occ
        budget = weight(best.start_word) if best is not None else max_weight
        for fam in self._families:
            limit = budget
            if limit is None:
                # a member always exists somewhere: widen until one shows up
                limit = max(weight(at_word), weight(self.pattern), fam.constraint.weight_floor()) + 8
                while True:
                    occ = self._family_hit(fam, at_word, at, limit)
                    if occ is not None:
                        break
                    limit *= 2
            else:
                if fam.constraint.weight_floor() > limit or fam.constraint.min_weight(limit) is None:
                    continue
                occ = self._family_hit(fam, at_word, at, limit)
            if occ is not None and (best is None or occ.start < best.start):
                best = occ
                budget = weight(best.start_word)
        assert best is not None or max_weight is not None
        return best

    # -- public iteration ------------------------------------------------------
    def iter_from(self, at_word: Word, offset: int = 0,
                  max_rank: Optional[int] = None) -> Iterator[XOccurrence]:
        """Occurrences starting at or after ``(at_word, offset)``, in order.

        The iteration is infinite unless ``max_rank`` is given; then it stops
        before the first occurrence starting beyond that word rank.
        """
        at = XPos(rank(at_word), offset)
        cap = weight(unrank(max_rank)) if max_rank is not None else None
        while True:
            if max_rank is not None and at.rank > max_rank:
                return
            occ = self._scan(at_word, at)
            if occ is None:
                occ = self.structural_next(at_word, at, cap)
                if occ is None:
                    return
            if max_rank is not None and occ.start.rank > max_rank:
                return
            yield occ
            at_word = occ.start_word
            at = XPos(occ.start.rank, occ.start.offset + 1)

    def _scan(self, at_word: Word, at: XPos) -> Optional[XOccurrence]:
        """Letter-by-letter look at the next few words; None if nothing turns up."""
        u = self.pattern
        k = len(u)
        w = at_word
        buf: list[int] = []
        starts: list[int] = []  # buffer index where each window word begins
        window: list[Word] = []
        for step in range(self.SCAN_WORDS + k):
            window.append(w)
            starts.append(len(buf))
            buf.extend(w[at.offset:] if step == 0 else w)
            if step >= self.SCAN_WORDS and len(buf) - starts[self.SCAN_WORDS] >= k - 1:
                break
            w = succ(w)
        for i in _find_all(u, buf):
            wi = bisect_right(starts, i) - 1
            if wi >= self.SCAN_WORDS:
                break
            wj = bisect_right(starts, i + k - 1) - 1
            off = i - starts[wi] + (at.offset if wi == 0 else 0)
            end_off = i + k - 1 - starts[wj] + (at.offset if wj == 0 else 0)
            if self.to_boundary and end_off != len(window[wj]) - 1:
                continue
            return XOccurrence(XPos(at.rank + wi, off), XPos(at.rank + wj, end_off), window[wi], window[wj])
        return None


def _find_all(pattern: Word, seq) -> list[int]:
    """Start indices of ``pattern`` in ``seq`` (a list or tuple), overlaps included."""
    out = []
    k = len(pattern)
    if k > len(seq):
        return out
    # anchor on the rarest-looking letter: the largest one
    anchor = max(range(k), key=lambda i: pattern[i])
    letter = pattern[anchor]
    lst = seq if isinstance(seq, list) else list(seq)
    i = anchor
    n = len(lst)
    while True:
        try:
            i = lst.index(letter, i, n - (k - 1 - anchor))
        except ValueError:
            return out
        s = i - anchor
        if tuple(lst[s:s + k]) == pattern:
            out.append(s)
        i += 1
