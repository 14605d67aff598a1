"""Back-and-forth isomorphism between (Q x Q, lex) and (0,1) ∩ Q, plus the
partition of (0,1) ∩ Q it induces.

The isomorphism is grown lazily.  Odd steps go *forth*: the first unmatched
pair of the domain enumeration is sent to the codomain element of least
index that keeps the matching order preserving.  Even steps go *back*: the
first unmatched element of (0,1) receives the compatible domain pair that
comes first in the domain enumeration.  Because both sides are exhausted in
turn, the limit map is total and onto, and its state after ``n`` steps
depends on ``n`` alone.

Two domain orders are available.  ``"diagonal"`` walks index pairs
``(i, j)`` by ``(i + j, i)``.  ``"hyperbolic"`` walks them by ``(i * j, i)``,
which reaches the ``k``-th member of a fixed class after roughly
``k log k`` steps instead of ``k**2 / 2``; long Maker runs need that.

The class of ``r`` is the first coordinate of the preimage of ``r``.  Two
classes compare like their labels, and every member of the smaller class
lies below every member of the larger one.
"""

from __future__ import annotations

import heapq
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from gmpy2 import mpq
from sortedcontainers import SortedList

from .rationals import (
    enum_index_of,
    enum_q,
    calkin_wilf_terms,
    format_rational,
    unit_index_of,
)
from .rationals import _simplest_terms

DOMAIN_ORDERS = ("diagonal", "hyperbolic")


def _diagonal_pairs() -> Iterator[tuple[int, int]]:
    s = 2
    while True:
        for i in range(1, s):
            yield i, s - i
        s += 1


def _hyperbolic_pairs() -> Iterator[tuple[int, int]]:
    # Pairs sorted by (i*j, i).  One heap entry per row i that has started.
    heap = [(1, 1, 1)]
    while True:
        _, i, j = heapq.heappop(heap)
        yield i, j
        heapq.heappush(heap, (i * (j + 1), i, j + 1))
        if j == 1:
            heapq.heappush(heap, (i + 1, i + 1, 1))


def domain_key(order: str, i: int, j: int) -> tuple[int, int]:
    """Sort key of the index pair ``(i, j)`` under a domain order."""
    if order == "diagonal":
        return (i + j, i)
    if order == "hyperbolic":
        return (i * j, i)
    raise ValueError(f"unknown domain order {order!r}")


def domain_position(order: str, i: int, j: int) -> int:
    """1-based position of ``(i, j)`` in the domain enumeration.

    The forth step that handles this position is at most step
    ``2 * position - 1``, which gives a hard bound on the work
    ``iso_forward`` needs for a given pair.
    """
    if order == "diagonal":
        s = i + j
        return (s - 1) * (s - 2) // 2 + i
    if order == "hyperbolic":
        n = i * j
        before = sum((n - 1) // a for a in range(1, n))  # pairs with product < n
        same = sum(1 for a in range(1, i + 1) if n % a == 0)
        return before + same
    raise ValueError(f"unknown domain order {order!r}")


@dataclass(frozen=True, order=True)
class ClassId:
    """A class of the partition, named by its first-coordinate label."""

    label: Fraction

    def __str__(self) -> str:
        return f"ClassId({format_rational(self.label)})"


def _to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def _positive_simplest(lo, hi) -> mpq:
    if hi is None:
        p, q = _simplest_terms(int(lo.numerator), int(lo.denominator), 1, 0)
    else:
        p, q = _simplest_terms(int(lo.numerator), int(lo.denominator),
                               int(hi.numerator), int(hi.denominator))
    return mpq(p, q)


def _least_enum(lo, hi) -> mpq:
    # least_enum_in on gmpy2 rationals; see rationals.least_enum_in
    if (lo is None or lo < 0) and (hi is None or hi > 0):
        return _MPQ_ZERO
    if lo is not None and lo >= 0:
        return _positive_simplest(lo, hi)
    return -_positive_simplest(-hi, None if lo is None else -lo)


def _least_unit(lo, hi) -> mpq:
    a, b = int(lo.numerator), int(lo.denominator)
    c, d = int(hi.numerator), int(hi.denominator)
    p, q = _simplest_terms(a, b - a, c, d - c)
    return mpq(p, p + q)


_MPQ_ZERO = mpq(0)
_MPQ_ONE = mpq(1)


class BackAndForth:
    """Lazily extended order isomorphism ``f: (Q^2, lex) -> ((0,1) ∩ Q, <)``.

    Matched pairs live in two sorted containers: domain pairs in lex order
    and their images in increasing order.  Rank ``k`` in one is rank ``k``
    in the other because the matching is an isomorphism.  Internally the
    numbers are gmpy2 ``mpq`` values, whose C-level comparisons make the
    sorted containers several times faster than with ``Fraction``; every
    public method takes and returns ``Fraction``.

    Extension is guarded by a lock, so one instance may be shared by threads.
    """

    def __init__(self, order: str = "diagonal") -> None:
        if order not in DOMAIN_ORDERS:
            raise ValueError(f"unknown domain order {order!r}")
        self.order = order
        self.steps = 0
        self._dom = SortedList()
        self._cod = SortedList()
        self._forward: dict = {}
        self._backward: dict = {}
        self._matched_idx: set[tuple[int, int]] = set()
        self._pairs = _diagonal_pairs() if order == "diagonal" else _hyperbolic_pairs()
        self._next_unit = 1
        self._enum_cache: list = [_MPQ_ZERO]  # index 0 unused
        self._lock = threading.RLock()

    # -- enumeration helpers -------------------------------------------------
    def _q(self, i: int) -> mpq:
        cache = self._enum_cache
        while len(cache) <= i:
            x = enum_q(len(cache))
            cache.append(mpq(x.numerator, x.denominator))
        return cache[i]

    def _key_of(self, pair) -> tuple[int, int]:
        return domain_key(self.order, enum_index_of(pair[0]), enum_index_of(pair[1]))

    def _record(self, pair, image) -> None:
        self._dom.add(pair)
        self._cod.add(image)
        self._forward[pair] = image
        self._backward[image] = pair

    # -- the two kinds of step -----------------------------------------------
    def _forth(self) -> None:
        while True:
            i, j = next(self._pairs)
            if (i, j) not in self._matched_idx:
                break
        self._matched_idx.add((i, j))
        pair = (self._q(i), self._q(j))
        pos = self._dom.bisect_left(pair)
        lo = self._cod[pos - 1] if pos > 0 else _MPQ_ZERO
        hi = self._cod[pos] if pos < len(self._cod) else _MPQ_ONE
        self._record(pair, _least_unit(lo, hi))

    def _back(self) -> None:
        while True:
            a, b = calkin_wilf_terms(self._next_unit)
            self._next_unit += 1
            r = mpq(a, a + b)
            if r not in self._backward:
                break
        pos = self._cod.bisect_left(r)
        below = self._dom[pos - 1] if pos > 0 else None
        above = self._dom[pos] if pos < len(self._dom) else None
        pair = self._least_between(below, above)
        self._matched_idx.add((enum_index_of(pair[0]), enum_index_of(pair[1])))
        self._record(pair, r)

    def _least_between(self, below, above):
        """Domain pair strictly between two lex bounds with the smallest key."""
        if below is None and above is None:
            return (_MPQ_ZERO, _MPQ_ZERO)
        if below is not None and above is not None and below[0] == above[0]:
            return (below[0], _least_enum(below[1], above[1]))
        candidates = []
        if below is not None:
            candidates.append((below[0], _least_enum(below[1], None)))
        if above is not None:
            candidates.append((above[0], _least_enum(None, above[1])))
        lo_x = None if below is None else below[0]
        hi_x = None if above is None else above[0]
        candidates.append((_least_enum(lo_x, hi_x), _MPQ_ZERO))
        return min(candidates, key=self._key_of)

    def step(self) -> None:
        """Perform one more step of the back-and-forth."""
        with self._lock:
            self.steps += 1
            if self.steps % 2 == 1:
                self._forth()
            else:
                self._back()

    def extend_to(self, steps: int) -> None:
        """Run steps until ``self.steps >= steps``."""
        with self._lock:
            while self.steps < steps:
                self.step()

    # -- queries -----------------------------------------------------------
    def iso_forward(self, pair: tuple) -> Fraction:
        """Image of a pair of rationals; extends the matching as needed."""
        key = (mpq(pair[0]), mpq(pair[1]))
        image = self._forward.get(key)
        if image is None:
            with self._lock:
                while key not in self._forward:
                    self.step()
                image = self._forward[key]
        return _to_fraction(image)

    def iso_backward(self, r) -> tuple[Fraction, Fraction]:
        """Preimage of ``r``; raises ``ValueError`` outside (0,1)."""
        key = mpq(r)
        pair = self._backward.get(key)
        if pair is None:
            unit_index_of(Fraction(r))  # validates the range
            with self._lock:
                while key not in self._backward:
                    self.step()
                pair = self._backward[key]
        return (_to_fraction(pair[0]), _to_fraction(pair[1]))

    def is_matched(self, r) -> bool:
        return mpq(r) in self._backward

    def matched_pairs(self) -> list[tuple[tuple[Fraction, Fraction], Fraction]]:
        """Snapshot of the matching, sorted by image."""
        with self._lock:
            return [((_to_fraction(a), _to_fraction(b)), _to_fraction(r))
                    for (a, b), r in zip(self._dom, self._cod)]

    def matched_in_order(self, count: int) -> list[tuple[tuple[Fraction, Fraction], Fraction]]:
        """The first ``count`` domain pairs of the enumeration with their images."""
        out = []
        pairs = _diagonal_pairs() if self.order == "diagonal" else _hyperbolic_pairs()
        for _ in range(count):
            i, j = next(pairs)
            pair = (enum_q(i), enum_q(j))
            out.append((pair, self.iso_forward(pair)))
        return out

    def __len__(self) -> int:
        return len(self._dom)


class Partition:
    """The partition of (0,1) ∩ Q into the classes ``f[{q} x Q]``."""

    def __init__(self, iso: Optional[BackAndForth] = None, order: str = "diagonal") -> None:
        self.iso = iso if iso is not None else BackAndForth(order)

    @property
    def order(self) -> str:
        return self.iso.order

    def class_of(self, r) -> ClassId:
        return ClassId(self.iso.iso_backward(r)[0])

    def class_member(self, c: ClassId, k: int) -> Fraction:
        """The k-th member of class ``c`` (k >= 1), ordered by ``enum_q``."""
        return self.iso.iso_forward((c.label, enum_q(k)))

    @staticmethod
    def class_compare(c1: ClassId, c2: ClassId) -> int:
        """-1, 0 or 1 as ``c1`` is below, equal to or above ``c2``."""
        return (c1.label > c2.label) - (c1.label < c2.label)

    @staticmethod
    def class_enum(i: int) -> ClassId:
        """The i-th class of the fixed enumeration of the partition."""
        return ClassId(enum_q(i))

    @staticmethod
    def class_index(c: ClassId) -> int:
        return enum_index_of(c.label)

    @staticmethod
    def class_between(c1: ClassId, c2: ClassId) -> ClassId:
        """A class strictly between ``c1 < c2``: the midpoint of the labels."""
        if not c1.label < c2.label:
            raise ValueError(f"class_between needs {c1} < {c2}")
        return ClassId((c1.label + c2.label) / 2)
