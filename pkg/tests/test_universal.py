import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from qgame.universal import UniversalStream, gap_at, occurrence_next, stream_at
from qgame.words import (OccurrenceFinder, XPos, iter_words, min_word, pred, rank, succ,
                         unrank, weight)

WORDS = oracles.word_list(3000)
REFERENCE = oracles.stream_prefix(1 << 20)

word_strategy = st.lists(st.integers(min_value=1, max_value=4), min_size=1, max_size=4).map(tuple)


def test_word_order_matches_brute_force():
    assert list(itertools.islice(iter_words(), len(WORDS))) == WORDS


def test_words_per_weight_follow_fibonacci():
    fib = [0, 1]
    while len(fib) < 20:
        fib.append(fib[-1] + fib[-2])
    for w in range(2, 16):
        assert len(oracles.compositions(w)) == fib[w - 1]


def test_rank_unrank_pred_succ_on_prefix():
    for r, w in enumerate(WORDS, start=1):
        assert rank(w) == r and unrank(r) == w
        if r > 1:
            assert pred(w) == WORDS[r - 2]
        if r < len(WORDS):
            assert succ(w) == WORDS[r]
    assert pred((1,)) is None
    assert min_word(2) == (1,)


@given(st.lists(st.integers(min_value=1, max_value=5000), min_size=1, max_size=6).map(tuple))
def test_rank_round_trip_far_out(w):
    r = rank(w)
    assert unrank(r) == w
    assert succ(pred(w)) == w if r > 1 else pred(w) is None


@given(st.lists(st.integers(min_value=1, max_value=30), min_size=1, max_size=5).map(tuple))
def test_succ_increases_weight_or_lex(w):
    nxt = succ(w)
    assert (weight(nxt), nxt) > (weight(w), w)
    assert rank(nxt) == rank(w) + 1


def test_stream_head_and_gap_sequence():
    assert UniversalStream().prefix(7) == [1, 1, 2, 1, 2, 1, 1]
    assert [gap_at(i) for i in (1, 3, 6)] == [1, 2, 3]
    assert [gap_at(i) for i in range(1, 11)] == [1, 1, 2, 1, 2, 3, 1, 2, 3, 4]
    with pytest.raises(ValueError):
        gap_at(0)


def test_stream_prefix_matches_block_construction():
    assert UniversalStream().prefix(200_000) == REFERENCE[:200_000]


def test_point_queries_past_small_cache():
    stream = UniversalStream(cache_limit=1024)
    rng = random.Random(5)
    for i in sorted(rng.sample(range(1, len(REFERENCE) + 1), 300)):
        assert stream.stream_at(i) == REFERENCE[i - 1]


@pytest.mark.parametrize("word", [(1,), (2,), (1, 1), (1, 2, 1), (3,), (2, 2, 1), (4, 1), (1, 1, 1, 1), (6, 1, 1)])
@pytest.mark.parametrize("to_boundary", [False, True])
def test_occurrence_finder_lists_every_occurrence(word, to_boundary):
    X, where = [], []
    for r, w in enumerate(WORDS, start=1):
        for o, y in enumerate(w):
            X.append(y)
            where.append((r, o, len(w)))
    k = len(word)
    want = []
    for i in range(len(X) - k):
        if tuple(X[i:i + k]) == word:
            end = where[i + k - 1]
            if not to_boundary or end[1] == end[2] - 1:
                want.append(where[i][:2])
    got = []
    for occ in OccurrenceFinder(word, to_boundary).iter_from((1,), 0):
        if occ.start.rank > 2900:
            break
        got.append((occ.start.rank, occ.start.offset))
    assert got == [w for w in want if w[0] <= 2900]
    rng = random.Random(hash(word) & 0xFFFF)
    finder = OccurrenceFinder(word, to_boundary)
    for _ in range(15):
        r = rng.randint(1, 2000)
        off = rng.randrange(len(WORDS[r - 1]))
        hit = finder.structural_next(WORDS[r - 1], XPos(r, off))
        later = [w for w in want if w >= (r, off)]
        if later:
            assert (hit.start.rank, hit.start.offset) == later[0]


@pytest.mark.parametrize("cache", [1024, 3000, None])
def test_occurrence_next_agrees_with_naive_scan(cache):
    stream = UniversalStream(cache_limit=cache)
    words = [w for n in (1, 2, 3) for w in itertools.product((1, 2, 3), repeat=n)]
    words += [(4,), (1, 4), (5, 1), (2, 5), (6,), (1, 7), (3, 3, 3), (1, 2, 1, 1, 3)]
    for w in words:
        for m in (1, 2, 5, 17, 60):
            assert stream.occurrence_next(w, m) == oracles.naive_next(REFERENCE, w, m), (w, m)


@settings(max_examples=40, deadline=None)
@given(word_strategy, st.integers(min_value=1, max_value=12))
def test_occurrence_next_property(word, m):
    want = oracles.naive_next(REFERENCE, word, m)
    if want is not None:
        assert UniversalStream(cache_limit=2048).occurrence_next(word, m) == want


def test_letters_far_beyond_any_prefix():
    # Only the structural path can reach this word.  Its earliest occurrence
    # in X straddles pred((3000, 2000)) = (3000, 1998, 1) and (3000, 2000),
    # which is lighter than the word itself.  In the first block holding it
    # that occurrence ends the block, so a fresh block's leading 1 follows;
    # in later blocks the next word, which starts with 3001, follows.
    word = (1, 3000, 2000)
    assert pred((3000, 2000)) == (3000, 1998, 1)
    assert succ((3000, 2000))[0] == 3001
    assert occurrence_next(word, 1) == 1
    assert occurrence_next(word, 2) == 3001
    assert occurrence_next(word, 3) == 3001


def test_occurrence_next_rejects_bad_input():
    with pytest.raises(ValueError):
        occurrence_next((), 1)
    with pytest.raises(ValueError):
        occurrence_next((1,), 0)
    with pytest.raises(ValueError):
        occurrence_next((0,), 1)


def test_module_level_helpers_share_the_default_stream():
    assert [stream_at(i) for i in range(1, 8)] == [1, 1, 2, 1, 2, 1, 1]


def test_cache_limit_from_environment(monkeypatch):
    monkeypatch.setenv("KQ_CACHE_LIMIT", "4096")
    assert UniversalStream().cache_limit == 4096
    monkeypatch.setenv("KQ_CACHE_LIMIT", "lots")
    with pytest.raises(ValueError):
        UniversalStream()
