"""The universal sequence (n_i) and the gap sequence (a_i).

Let ``X = w_1 w_2 w_3 ...`` be the concatenation of all words in the order
of :mod:`qgame.words`.  The stream is built from triangular blocks::

    n = w_1 | w_1 w_2 | w_1 w_2 w_3 | ...      (block t = X[:P_t])

where ``P_t = |w_1| + ... + |w_t|``.  Every word is some ``w_s`` and sits
inside every block ``t >= s``, so it occurs infinitely often.

``occurrence_next(word, m)`` looks for the m-th occurrence, counting every
starting position (overlaps and block joins included).  The first few
million symbols are kept as a byte string and scanned directly.  Past that
prefix the count is done per block: block ``T`` contains every occurrence
of ``word`` in ``X`` that ends in the first ``T`` words, plus possibly some
occurrences straddling the join with block ``T + 1``.  Both kinds are found
by :class:`qgame.words.OccurrenceFinder`, which reasons about ranks instead
of scanning, so words that first appear astronomically deep in the stream
(large letters do: the letter ``v`` needs weight ``v + 1``) are still
answered exactly.
"""

from __future__ import annotations

import math
import os
import threading
from array import array
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .words import OccurrenceFinder, Word, XOccurrence, succ, unrank

DEFAULT_CACHE_LIMIT = 1 << 22


def _cache_limit_from_env() -> int:
    raw = os.environ.get("KQ_CACHE_LIMIT")
    if not raw:
        return DEFAULT_CACHE_LIMIT
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"KQ_CACHE_LIMIT must be an integer, got {raw!r}") from None
    return max(value, 1024)


def gap_at(i: int) -> int:
    """The i-th term of 1, 1, 2, 1, 2, 3, 1, 2, 3, 4, ..."""
    if i < 1:
        raise ValueError(f"index must be >= 1, got {i}")
    # t is the block holding i: t(t-1)/2 < i <= t(t+1)/2
    t = (math.isqrt(8 * i) + 1) // 2
    while t * (t + 1) // 2 < i:
        t += 1
    while t * (t - 1) // 2 >= i:
        t -= 1
    return i - t * (t - 1) // 2


@dataclass
class _Memo:
    """What is known about one query word."""

    naive: list[int] = field(default_factory=list)  # 0-based stream starts, in order
    resume: int = 0  # every start below this is in ``naive``
    answers: dict[int, int] = field(default_factory=dict)


class UniversalStream:
    """The stream ``n_1, n_2, ...`` with occurrence search.

    ``cache_limit`` bounds the materialized prefix in symbols; it defaults
    to the ``KQ_CACHE_LIMIT`` environment variable or 4 Mi symbols.  Results
    never depend on it, only speed does.
    """

    def __init__(self, cache_limit: Optional[int] = None) -> None:
        self.cache_limit = cache_limit if cache_limit is not None else _cache_limit_from_env()
        self._lock = threading.RLock()
        self._x = bytearray()  # X, letters as bytes
        self._word_end = array("q", [0])  # _word_end[t] = P_t
        self._last_word: Word = ()
        self._stream = bytearray()
        self._block_start = array("q", [0, 0])  # 0-based start of block t (index t)
        self._blocks = 0  # blocks fully materialized
        self._memo: dict[Word, _Memo] = {}
        self._materialize(min(4096, self.cache_limit))

    # -- materialization ------------------------------------------------------
    def _extend_x(self, words: int) -> None:
        w = self._last_word
        for _ in range(words):
            w = succ(w) if w else (1,)
            if max(w) > 255:
                raise OverflowError("materialized prefix would need letters above 255")
            self._x.extend(w)
            self._word_end.append(len(self._x))
        self._last_word = w

    def _materialize(self, target: int) -> None:
        """Add whole blocks while the stream stays within ``target`` symbols."""
        with self._lock:
            while True:
                t = self._blocks + 1
                if len(self._word_end) <= t:
                    self._extend_x(64)
                length = self._word_end[t]
                if len(self._stream) + length > target and self._blocks >= 2:
                    return
                self._stream += self._x[:length]
                self._blocks = t
                self._block_start.append(len(self._stream))

    def _grow(self) -> bool:
        """Double the materialized prefix if the limit allows; True if it grew."""
        if len(self._stream) * 2 > self.cache_limit:
            target = self.cache_limit
        else:
            target = len(self._stream) * 2
        before = self._blocks
        self._materialize(target)
        return self._blocks > before

    def prefix(self, n: int) -> list[int]:
        """The first ``n`` stream values."""
        with self._lock:
            while len(self._stream) < n and self._grow():
                pass
            if len(self._stream) >= n:
                return list(self._stream[:n])
        return [self.stream_at(i) for i in range(1, n + 1)]

    def block_length(self, t: int) -> int:
        """``P_t``, the length of block ``t``."""
        with self._lock:
            while len(self._word_end) <= t and t <= 1 << 20:
                self._extend_x(1024)
            if t < len(self._word_end):
                return self._word_end[t]
        total = self._word_end[-1]
        w = self._last_word
        for _ in range(len(self._word_end), t + 1):
            w = succ(w)
            total += len(w)
        return total

    # -- point queries ------------------------------------------------------
    def stream_at(self, i: int) -> int:
        """``n_i`` for i >= 1."""
        if i < 1:
            raise ValueError(f"index must be >= 1, got {i}")
        with self._lock:
            while len(self._stream) < i and self._grow():
                pass
            if i <= len(self._stream):
                return self._stream[i - 1]
            # walk the blocks past the materialized prefix without storing them
            t = self._blocks + 1
            start = len(self._stream)
            while True:
                length = self.block_length(t)
                if i <= start + length:
                    return self._x_letter(i - start - 1)
                start += length
                t += 1

    def _x_letter(self, j: int) -> int:
        """Letter ``j`` (0-based) of X."""
        if j < len(self._x):
            return self._x[j]
        t = bisect_right(self._word_end, j)
        if t < len(self._word_end):
            return self._x[j]
        total = self._word_end[-1]
        w = self._last_word
        while True:
            w = succ(w)
            if j < total + len(w):
                return w[j - total]
            total += len(w)

    # -- occurrence search -------------------------------------------------
    def occurrence_next(self, word: Sequence[int], m: int) -> int:
        """The stream value right after the m-th occurrence of ``word``."""
        u = tuple(int(x) for x in word)
        if not u or min(u) < 1:
            raise ValueError("word must be a nonempty sequence of positive integers")
        if m < 1:
            raise ValueError(f"m must be >= 1, got {m}")
        with self._lock:
            memo = self._memo.setdefault(u, _Memo())
            if m in memo.answers:
                return memo.answers[m]
            answer = self._naive_answer(u, m, memo)
            if answer is None:
                answer = self._structural_answer(u, m, memo)
            memo.answers[m] = answer
            return answer

    def _horizon_block(self, k: int) -> int:
        # naive region: blocks before the last one whose start still leaves
        # room for a whole occurrence inside the materialized prefix
        return bisect_right(self._block_start, len(self._stream) - k, 1, self._blocks + 2) - 1

    def _naive_scan(self, u: Word, memo: _Memo, want: Optional[int] = None) -> int:
        """Collect starts before the naive horizon (stopping early once ``want`` are known).

        Returns the horizon block.
        """
        k = len(u)
        t_mat = self._horizon_block(k)
        horizon = self._block_start[t_mat]
        if max(u) > 255:
            memo.resume = horizon
            return t_mat
        needle = bytes(u)
        data = self._stream
        pos = memo.resume
        while pos < horizon and (want is None or len(memo.naive) < want):
            pos = data.find(needle, pos, horizon + k - 1)
            if pos < 0 or pos >= horizon:
                pos = horizon
                break
            memo.naive.append(pos)
            pos += 1
        memo.resume = pos
        return t_mat

    def _naive_answer(self, u: Word, m: int, memo: _Memo) -> Optional[int]:
        while True:
            self._naive_scan(u, memo, m)
            if len(memo.naive) >= m:
                return self._stream[memo.naive[m - 1] + len(u)]
            if not self._grow():
                return None

    def _structural_answer(self, u: Word, m: int, memo: _Memo) -> int:
        k = len(u)
        t_mat = self._naive_scan(u, memo)
        while self._word_end[t_mat] < k:
            # blocks must be at least as long as the word; only matters for huge words
            self.cache_limit = max(self.cache_limit, 2 * len(self._stream))
            self._grow()
            t_mat = self._naive_scan(u, memo)
        need = m - len(memo.naive)
        events = _BlockEvents(self, u, t_mat, need)
        return events.answer()


class _BlockEvents:
    """Occurrences starting in blocks ``T >= t_mat``, counted block by block.

    Block ``T`` holds every occurrence inside ``X`` whose last letter lies in
    the first ``T`` words, and a crossing occurrence when block ``T`` ends
    with a head ``u[:a]`` of the word while ``X`` (hence block ``T + 1``)
    starts with the rest.  Blocks from ``t_mat`` on are longer than the word,
    so nothing spans three blocks.
    """

    def __init__(self, stream: UniversalStream, u: Word, t_mat: int, need: int) -> None:
        self.s = stream
        self.u = u
        self.t_mat = t_mat
        self.need = need
        # occurrences in X, in start order: (end rank, ends its word, next letter of X)
        self.inner: list[tuple[int, bool, int]] = []
        # crossings: (block, letters spilling into the next block), in stream order
        self.crossings: list[tuple[int, int]] = []

    def _early_inner(self) -> None:
        """Occurrences in X ending before word ``t_mat``, read off the materialized X."""
        s, u = self.s, self.u
        if max(u) > 255:
            return
        k = len(u)
        limit = s._word_end[self.t_mat - 1]
        needle = bytes(u)
        pos = 0
        while True:
            pos = s._x.find(needle, pos, limit)
            if pos < 0:
                return
            end = pos + k - 1
            r = bisect_right(s._word_end, end)
            at_end = end + 1 == s._word_end[r]
            self.inner.append((r, at_end, s._x[end + 1]))
            pos += 1

    def _add(self, occ: XOccurrence) -> None:
        w, off = occ.end_word, occ.end.offset
        if off + 1 < len(w):
            self.inner.append((occ.end.rank, False, w[off + 1]))
        else:
            self.inner.append((occ.end.rank, True, succ(w)[0]))

    def _count(self, t: int) -> int:
        """Events in blocks t_mat..t."""
        total = 0
        for e, _, _ in self.inner:
            if e > t:
                break
            total += t - max(e, self.t_mat) + 1
        return total + bisect_right(self.crossings, (t, len(self.u)))

    def _collect(self) -> int:
        self._early_inner()
        start = unrank(max(1, self.t_mat - len(self.u)))
        finder = OccurrenceFinder(self.u)
        if not self.inner:
            first = next(occ for occ in finder.iter_from(start, 0) if occ.end.rank >= self.t_mat)
            self._add(first)
            start, offset = first.start_word, first.start.offset + 1
        else:
            offset = 0
        # every block from max(first end, t_mat) on holds at least one event
        upper = max(self.inner[0][0], self.t_mat) + self.need - 1
        for occ in finder.iter_from(start, offset, max_rank=upper):
            if occ.end.rank < self.t_mat:
                continue
            if occ.end.rank > upper:
                break
            self._add(occ)
        self._collect_crossings(upper)
        return upper

    def _collect_crossings(self, upper: int) -> None:
        u = self.u
        k = len(u)
        head = [self.s._x_letter(j) for j in range(k)]
        found: list[tuple[int, int]] = []
        for a in range(1, k):
            if tuple(head[:k - a]) != u[a:]:
                continue
            finder = OccurrenceFinder(u[:a], to_boundary=True)
            taken = 0
            for occ in finder.iter_from(unrank(max(1, self.t_mat - a)), 0, max_rank=upper):
                if occ.end.rank < self.t_mat:
                    continue
                if occ.end.rank > upper or taken >= self.need:
                    break
                found.append((occ.end.rank, k - a))
                taken += 1
        # in one block a longer head starts earlier, i.e. fewer letters spill over
        self.crossings = sorted(found)

    def answer(self) -> int:
        lo, hi = self.t_mat, self._collect()
        while lo < hi:
            mid = (lo + hi) // 2
            if self._count(mid) >= self.need:
                hi = mid
            else:
                lo = mid + 1
        t_star = lo
        idx = self.need - (self._count(t_star - 1) if t_star > self.t_mat else 0)
        in_block = [occ for occ in self.inner if occ[0] <= t_star]
        if idx <= len(in_block):
            end_rank, at_end, nxt = in_block[idx - 1]
            if at_end and end_rank == t_star:
                return 1  # the next block starts with X[0] = 1
            return nxt
        idx -= len(in_block)
        spill = [c for t, c in self.crossings if t == t_star][idx - 1]
        return self.s._x_letter(spill)


_DEFAULT: Optional[UniversalStream] = None
_DEFAULT_LOCK = threading.Lock()


def default_stream() -> UniversalStream:
    """A process-wide shared stream (the memo is the main performance lever)."""
    global _DEFAULT
    with _DEFAULT_LOCK:
        if _DEFAULT is None:
            _DEFAULT = UniversalStream()
        return _DEFAULT


def stream_at(i: int) -> int:
    return default_stream().stream_at(i)


def occurrence_next(word: Sequence[int], m: int) -> int:
    return default_stream().occurrence_next(word, m)
