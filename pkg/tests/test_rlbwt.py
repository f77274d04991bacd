import itertools

import pytest

from deltasketch.errors import (
    InvalidParameterError,
    SentinelPositionError,
    WrongPhaseError,
)
from deltasketch.oracle import naive_bwt
from deltasketch.rlbwt import SENTINEL, DynamicRLBWT


def build(data):
    d = DynamicRLBWT()
    for a in data:
        d.extend(a)
    return d


def assert_matches_naive(data):
    d = build(data)
    nb = naive_bwt(bytes(data))
    assert d.to_text() == nb.bwt_text()
    assert d.runs() == (nb.r, nb.r_prime)
    for j in range(1, d.length + 1):
        if d.access(j) == SENTINEL:
            assert j == d.term_pos
        else:
            assert d.lf(j) == nb.lf[j]


def test_empty_structure():
    d = DynamicRLBWT()
    assert d.to_text() == "$"
    assert d.runs() == (1, 0)
    assert d.data_len == 0


def test_babba_fixture():
    d = build(b"babba")
    assert d.to_text() == "bb$aba"
    assert d.runs()[0] == 5
    assert d.lf(2) == 5


def test_single_char():
    d = build(b"a")
    assert d.to_text() == "a$"


def test_exhaustive_binary_up_to_9():
    for n in range(1, 10):
        for t in itertools.product(b"ab", repeat=n):
            assert_matches_naive(bytes(t))


def test_exhaustive_ternary_up_to_6():
    for n in range(1, 7):
        for t in itertools.product(b"abc", repeat=n):
            assert_matches_naive(bytes(t))


def test_random_byte_strings(rng):
    for _ in range(60):
        n = rng.randrange(1, 120)
        assert_matches_naive(bytes(rng.randrange(256) for _ in range(n)))


def test_incremental_states_match_naive(rng):
    # the invariant must hold after every single extension, not just at the end
    for _ in range(20):
        data = bytes(rng.randrange(97, 101) for _ in range(rng.randrange(1, 40)))
        d = DynamicRLBWT()
        for i, a in enumerate(data, 1):
            d.extend(a)
            nb = naive_bwt(data[:i])
            assert d.to_text() == nb.bwt_text()
            assert d.runs() == (nb.r, nb.r_prime)


def test_rank_and_access(rng):
    data = bytes(rng.randrange(97, 100) for _ in range(200))
    d = build(data)
    text = d.to_text()
    for c in b"abc":
        count = 0
        for j in range(1, d.length + 1):
            if text[j - 1] == chr(c):
                count += 1
            assert d.rank(c, j) == count


def test_lf_batch_matches_scalar(rng):
    data = bytes(rng.randrange(97, 101) for _ in range(300))
    d = build(data)
    qs = [j for j in range(1, d.length + 1) if d.access(j) != SENTINEL]
    rng.shuffle(qs)
    assert d.lf_batch(qs) == [d.lf(j) for j in qs]


def test_lf_at_terminator_rejected():
    d = build(b"babba")
    with pytest.raises(SentinelPositionError):
        d.lf(d.term_pos)
    with pytest.raises(SentinelPositionError):
        d.lf_batch([d.term_pos])


def test_position_bounds():
    d = build(b"ab")
    with pytest.raises(InvalidParameterError):
        d.access(0)
    with pytest.raises(InvalidParameterError):
        d.access(d.length + 1)


def test_extend_rejects_non_byte():
    d = DynamicRLBWT()
    with pytest.raises(InvalidParameterError):
        d.extend(256)


def test_bookmark_init_phase():
    d = build(b"ab")
    bm = d.init_bookmark(2)
    assert bm.state == "active" and bm.j == 1
    with pytest.raises(WrongPhaseError):
        d.init_bookmark(5)
    with pytest.raises(WrongPhaseError):
        d.init_bookmark(1)


def test_bookmark_invariant(rng):
    # after every push, access(j_k) must equal the byte k back in the stream
    for _ in range(30):
        data = [rng.randrange(97, 101) for _ in range(rng.randrange(5, 80))]
        k = rng.randrange(1, len(data) + 1)
        d = DynamicRLBWT()
        bm = None
        for i, a in enumerate(data, 1):
            i_prime = d.extend(a)
            if bm is not None:
                bm.advance(d, i_prime)
            if i == k:
                bm = d.init_bookmark(k)
            if bm is not None:
                assert d.access(bm.j) == data[i - k]


def test_bookmark_fig2_walkthrough():
    # stream "ab": reversed text with terminator is "ba$"; the k = 2 bookmark
    # starts at LF of the terminator row, which is row 1
    d = DynamicRLBWT()
    d.extend(ord("a"))
    d.extend(ord("b"))
    bm = d.init_bookmark(2)
    assert d.access(bm.j) == ord("a")
    i_prime = d.extend(ord("c"))
    bm.advance(d, i_prime)
    assert d.access(bm.j) == ord("b")


def test_run_counts_on_unary_and_alternating():
    d = build(b"aaaa")
    r, r_prime = d.runs()
    assert r_prime <= 2
    d = build(b"abababab")
    nb = naive_bwt(b"abababab")
    assert d.runs() == (nb.r, nb.r_prime)
