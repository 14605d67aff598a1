"""Exact rationals and the fixed enumerations of Q and of (0,1) ∩ Q.

Rationals are plain :class:`fractions.Fraction` values.  They are already
immutable, always reduced, keep a positive denominator and compare exactly,
so a home-grown numeric class would add nothing.

The enumeration of Q is built on the Calkin-Wilf sequence ``cw(1), cw(2),
...`` of positive rationals::

    e(1) = 0,   e(2t) = cw(t),   e(2t + 1) = -cw(t)

and (0,1) is enumerated by pushing ``cw`` through ``x -> x / (x + 1)``.
Both directions are computed from the binary expansion of the index, so
neither needs a table.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def calkin_wilf_terms(n: int) -> tuple[int, int]:
    """Numerator and denominator of the n-th Calkin-Wilf rational (n >= 1).

    The bits of ``n`` below its leading one describe the path from the root
    1/1: a zero bit goes to the left child ``a/(a+b)``, a one bit to the
    right child ``(a+b)/b``.
    """
    if n < 1:
        raise ValueError(f"Calkin-Wilf index must be >= 1, got {n}")
    a, b = 1, 1
    for bit in bin(n)[3:]:
        if bit == "0":
            b = a + b
        else:
            a = a + b
    return a, b


def calkin_wilf(n: int) -> Fraction:
    """The n-th positive rational of the Calkin-Wilf sequence."""
    a, b = calkin_wilf_terms(n)
    return Fraction(a, b)


def calkin_wilf_index(x: Fraction) -> int:
    """Inverse of :func:`calkin_wilf`; ``x`` must be positive.

    Walking up the tree, long runs of identical steps are taken in one go,
    so the cost is linear in the length of the continued fraction of ``x``
    rather than in the depth of the node.
    """
    a, b = int(x.numerator), int(x.denominator)
    if a <= 0:
        raise ValueError(f"Calkin-Wilf index needs a positive rational, got {x}")
    runs: list[tuple[int, int]] = []
    while a != b:
        if a < b:
            k = (b - 1) // a
            b -= k * a
            runs.append((0, k))
        else:
            k = (a - 1) // b
            a -= k * b
            runs.append((1, k))
    n = 1
    for bit, k in reversed(runs):
        n <<= k
        if bit:
            n |= (1 << k) - 1
    return n


def enum_q(i: int) -> Fraction:
    """The i-th rational of the fixed enumeration of Q (i >= 1)."""
    if i < 1:
        raise ValueError(f"enumeration index must be >= 1, got {i}")
    if i == 1:
        return ZERO
    x = calkin_wilf(i // 2)
    return x if i % 2 == 0 else -x


def enum_index_of(r: Fraction) -> int:
    """Position of ``r`` in :func:`enum_q`."""
    if not hasattr(r, "denominator"):
        r = Fraction(r)
    if r == 0:
        return 1
    if r > 0:
        return 2 * calkin_wilf_index(r)
    return 2 * calkin_wilf_index(-r) + 1


def enum_unit_interval(i: int) -> Fraction:
    """The i-th element of the fixed enumeration of (0,1) ∩ Q (i >= 1)."""
    x = calkin_wilf(i)
    return x / (x + 1)


def unit_index_of(r: Fraction) -> int:
    """Inverse of :func:`enum_unit_interval`.

    Raises ``ValueError`` when ``r`` is not strictly between 0 and 1.
    """
    r = Fraction(r)
    if not 0 < r < 1:
        raise ValueError(f"{format_rational(r)} is outside the open unit interval")
    return calkin_wilf_index(r / (1 - r))


def _simplest_terms(ln: int, ld: int, hn: int, hd: int) -> tuple[int, int]:
    # Shallowest Calkin-Wilf node in (ln/ld, hn/hd) with 0 <= lo < hi, where
    # hd == 0 encodes +oo.  Depth grows with the sum of the partial quotients,
    # so the usual continued-fraction recursion for the "simplest" rational
    # finds it.  Integers only: Fraction arithmetic here dominated profiles.
    terms = []
    while True:
        n = ln // ld
        if hd == 0 or (n + 1) * hd < hn:
            terms.append(n + 1)
            break
        terms.append(n)
        rest = ln - n * ld
        ln, ld, hn, hd = hd, hn - n * hd, ld, rest
    p, q = terms[-1], 1
    for t in reversed(terms[:-1]):
        p, q = t * p + q, p
    return p, q


def _simplest_positive(lo: Fraction, hi: Optional[Fraction]) -> Fraction:
    if hi is None:
        p, q = _simplest_terms(lo.numerator, lo.denominator, 1, 0)
    else:
        p, q = _simplest_terms(lo.numerator, lo.denominator, hi.numerator, hi.denominator)
    return Fraction(p, q)


def least_cw_in(lo: Fraction, hi: Optional[Fraction]) -> Fraction:
    """Positive rational with the smallest Calkin-Wilf index in ``(lo, hi)``.

    Requires ``0 <= lo < hi``; ``hi=None`` stands for +infinity.  Each row
    of the Calkin-Wilf tree holds the same rationals as the matching row of
    the Stern-Brocot tree, and an open interval contains exactly one node of
    minimal depth, so minimal depth and minimal index coincide.
    """
    if lo < 0 or (hi is not None and hi <= lo):
        raise ValueError("least_cw_in needs 0 <= lo < hi")
    return _simplest_positive(lo, hi)


def least_enum_in(lo: Optional[Fraction], hi: Optional[Fraction]) -> Fraction:
    """Element of the open interval ``(lo, hi)`` with the least :func:`enum_q` index.

    Either bound may be ``None`` for an infinite end.
    """
    if lo is not None and hi is not None and not lo < hi:
        raise ValueError("empty interval")
    if (lo is None or lo < 0) and (hi is None or hi > 0):
        return ZERO
    if lo is not None and lo >= 0:
        return _simplest_positive(lo, hi)
    # the interval lies at or below zero
    assert hi is not None
    mirrored_hi = None if lo is None else -lo
    return -_simplest_positive(-hi, mirrored_hi)


def least_unit_in(lo: Fraction, hi: Fraction) -> Fraction:
    """Element of ``(lo, hi)`` with the least :func:`enum_unit_interval` index.

    Requires ``0 <= lo < hi <= 1``.  The map ``r -> r / (1 - r)`` sends
    (0,1) monotonically onto the positive rationals, so the search happens
    on the Calkin-Wilf side.
    """
    if not 0 <= lo < hi <= 1:
        raise ValueError("least_unit_in needs 0 <= lo < hi <= 1")
    a, b = lo.numerator, lo.denominator
    c, d = hi.numerator, hi.denominator
    p, q = _simplest_terms(a, b - a, c, d - c)
    return Fraction(p, p + q)


def format_rational(r: Fraction) -> str:
    """Trace-file text form, always ``num/den`` (integers get ``/1``)."""
    return f"{r.numerator}/{r.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse the ``num/den`` form written by :func:`format_rational`.

    Only the canonical spelling is accepted: positive denominator, lowest
    terms, no spaces.  Trace files must reproduce byte for byte, so a
    second spelling of the same number would be a bug.
    """
    num_text, sep, den_text = text.partition("/")
    if not sep:
        raise ValueError(f"rational {text!r} lacks a '/'")
    try:
        num, den = int(num_text), int(den_text)
    except ValueError:
        raise ValueError(f"malformed rational {text!r}") from None
    if den <= 0:
        raise ValueError(f"rational {text!r} needs a positive denominator")
    value = Fraction(num, den)
    if format_rational(value) != text:
        raise ValueError(f"rational {text!r} is not in canonical form")
    return value
