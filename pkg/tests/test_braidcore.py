import random

import pytest
from hypothesis import given, strategies as st

from lefkit.braidcore import (
    BraidError,
    BraidWord,
    HalfTwistSequence,
    MonotonicBand,
    Permutation,
    band_to_word,
    is_monotonic,
    hurwitz_slide,
    perm_of,
    total_braid,
    word_reduce,
)
from lefkit.linediagram import worked_example_words

from oracles import braid_action, compose_maps, perm_as_map, transposition_map


def W(text, m):
    return BraidWord.parse(text, m)


def brute_perm(w: BraidWord) -> dict:
    """Each letter swaps two strand positions; compose left to right."""
    return compose_maps(*[transposition_map(i, i + 1) for i, _ in w.letters], {x: x for x in range(1, w.strands + 1)})


# ---------------------------------------------------------------- strategies

letters = lambda m: st.tuples(st.integers(1, m - 1), st.sampled_from((1, -1)))


@st.composite
def words(draw, m=None, max_len=12):
    m = m or draw(st.integers(2, 8))
    return BraidWord(m, tuple(draw(st.lists(letters(m), max_size=max_len))))


@st.composite
def bands(draw, m_max=9):
    k = draw(st.integers(2, m_max))
    j = draw(st.integers(1, k - 1))
    pat = tuple(draw(st.lists(st.sampled_from((1, -1)), min_size=k - j - 1, max_size=k - j - 1)))
    return MonotonicBand(j, k, draw(st.sampled_from((1, -1))), pat)


# ---------------------------------------------------------------- permutations


def test_composition_is_left_to_right():
    p = Permutation.parse("(1 2)", 3)
    q = Permutation.parse("(2 3)", 3)
    assert (p * q)(1) == q(p(1)) == 3
    assert str(p * q) == "(1 3 2)"


def test_conj_is_inverse_first():
    t = Permutation.parse("(1 2)", 3)
    p = Permutation.parse("(2 3)", 3)
    assert t.conj(p) == p.inverse() * t * p == Permutation.parse("(1 3)", 3)


def test_parse_rejects_junk():
    with pytest.raises(BraidError):
        Permutation.parse("(1 2) x", 3)
    with pytest.raises(BraidError):
        Permutation.parse("(1 1)", 3)


# ---------------------------------------------------------------- words


def test_word_reduce_examples():
    assert len(word_reduce(W("s1 S1", 2))) == 0
    assert word_reduce(W("s1 s2", 3)) == W("s1 s2", 3)
    assert word_reduce(W("s3 s2 S2 S3 s1", 4)) == W("s1", 4)


def test_word_parse_powers():
    assert W("S2^2", 3).letters == ((2, -1), (2, -1))
    assert W("s2^-1", 3).letters == ((2, -1),)
    with pytest.raises(BraidError):
        W("s3", 3)
    with pytest.raises(BraidError):
        W("x1", 3)


@given(words())
def test_word_reduce_idempotent_and_shorter(w):
    r = word_reduce(w)
    assert word_reduce(r) == r
    assert len(r) <= len(w)
    assert all(r.letters[i] != (r.letters[i + 1][0], -r.letters[i + 1][1]) for i in range(len(r) - 1))
    assert perm_of(r) == perm_of(w)


def test_perm_of_examples():
    assert perm_of(W("s1", 3)) == Permutation.parse("(1 2)", 3)
    assert perm_of(W("s1 s2", 3)) == Permutation.parse("(1 3 2)", 3)
    beta2 = W("S3 S2 s3", 6)
    assert perm_of(beta2) == Permutation.parse("(2 4)", 6)
    assert perm_as_map(perm_of(beta2)) == brute_perm(beta2)


@given(st.integers(2, 8).flatmap(lambda m: st.tuples(words(m), words(m))))
def test_perm_of_is_homomorphism(uv):
    u, v = uv
    assert perm_of(u * v) == perm_of(u) * perm_of(v)
    assert perm_as_map(perm_of(u * v)) == brute_perm(u * v)


# ---------------------------------------------------------------- monotonic bands


def test_band_to_word_examples():
    assert band_to_word(MonotonicBand(1, 2, 1)) == W("s1", 2)
    assert band_to_word(MonotonicBand(2, 4, -1, (1,)), 6) == W("S3 S2 s3", 6)
    assert band_to_word(MonotonicBand(3, 6, 1, (-1, 1)), 6) == W("S5 s4 s3 S4 s5", 6)


def test_is_monotonic_examples():
    assert is_monotonic(W("s1", 2)) == MonotonicBand(1, 2, 1)
    assert is_monotonic(W("s2 s1 S2", 3)) == MonotonicBand(1, 3, 1, (-1,))
    flags = [is_monotonic(w) is not None for w in worked_example_words()]
    assert flags == [True, True, True, False]


@given(bands())
def test_band_word_round_trip(b):
    w = band_to_word(b)
    assert perm_of(w) == Permutation.transposition(b.j, b.k, b.k)
    assert is_monotonic(w) == b


def test_band_validation():
    with pytest.raises(BraidError):
        MonotonicBand(2, 2, 1)
    with pytest.raises(BraidError):
        MonotonicBand(1, 3, 1, ())
    with pytest.raises(BraidError):
        MonotonicBand(1, 2, 0)


# ---------------------------------------------------------------- Hurwitz action


def test_slide_disjoint_generators_swap():
    s = HalfTwistSequence(4, (W("s1", 4), W("s3", 4)))
    assert hurwitz_slide(s, 1).bands == (W("s3", 4), W("s1", 4))


def test_slide_adjacent_generators():
    s = HalfTwistSequence(3, (W("s1", 3), W("s2", 3)))
    r = hurwitz_slide(s, 1, "right")
    # s1 s2 S1 is stored as the monotonic word of the same half twist
    assert same_braid(r.bands[0].letters, W("s1 s2 S1", 3).letters, 3)
    assert r.bands == (band_to_word(is_monotonic(r.bands[0]), 3), W("s1", 3))
    assert [perm_of(w) for w in r.bands] == [Permutation.parse("(1 3)", 3), Permutation.parse("(1 2)", 3)]
    # brute force: conjugate (2 3) by (1 2)
    a, b = transposition_map(1, 2), transposition_map(2, 3)
    assert compose_maps(a, b, a) == perm_as_map(perm_of(r.bands[0]))


def test_slide_range_errors():
    s = HalfTwistSequence(3, (W("s1", 3), W("s2", 3)))
    with pytest.raises(BraidError):
        hurwitz_slide(s, 2)
    with pytest.raises(BraidError):
        hurwitz_slide(s, 1, "up")


def test_total_braid_examples():
    assert len(total_braid(HalfTwistSequence(3, ()))) == 0
    assert len(total_braid(HalfTwistSequence(2, (W("s1", 2), W("S1", 2))))) == 0
    s = HalfTwistSequence(6, tuple(worked_example_words()))
    t = total_braid(s)
    # 1 + 3 + 5 + 9 letters and no cancellation where consecutive words meet
    assert len(t) == sum(len(w) for w in s.bands) == 18
    # the conjugators of the last word cancel in the symmetric group, leaving (4 5)
    assert brute_perm(s.bands[3]) == {**{x: x for x in range(1, 7)}, 4: 5, 5: 4}
    want = compose_maps(*[transposition_map(*p) for p in ((1, 2), (2, 4), (3, 6), (4, 5))])
    assert perm_as_map(perm_of(t)) == {**{x: x for x in range(1, 7)}, **want} == brute_perm(t)


@st.composite
def sequences(draw):
    m = draw(st.integers(2, 6))
    n = draw(st.integers(2, 5))
    out = []
    for _ in range(n):
        k = draw(st.integers(2, m))
        j = draw(st.integers(1, k - 1))
        pat = tuple(draw(st.lists(st.sampled_from((1, -1)), min_size=k - j - 1, max_size=k - j - 1)))
        out.append(band_to_word(MonotonicBand(j, k, draw(st.sampled_from((1, -1))), pat), m))
    return HalfTwistSequence(m, tuple(out))


@st.composite
def slid_sequences(draw):
    s = draw(sequences())
    for _ in range(draw(st.integers(0, 3))):
        s = hurwitz_slide(s, draw(st.integers(1, len(s) - 1)), draw(st.sampled_from(("right", "left"))))
    return s


def same_braid(u, v, m) -> bool:
    # the Artin action on the free group is faithful
    return braid_action(tuple(u), m) == braid_action(tuple(v), m)


@given(slid_sequences(), st.data())
def test_slides_are_inverse_and_keep_total_permutation(s, data):
    i = data.draw(st.integers(1, len(s) - 1))
    r = hurwitz_slide(s, i, "right")
    assert hurwitz_slide(r, i, "left") == s
    assert hurwitz_slide(hurwitz_slide(s, i, "left"), i, "right") == s
    assert perm_of(total_braid(r)) == perm_of(total_braid(s))
    assert all(perm_of(w).is_transposition() for w in r.bands)
    a, b = s.bands[i - 1], s.bands[i]
    assert same_braid(r.bands[i - 1].letters + r.bands[i].letters, a.letters + b.letters, s.strands)
    assert same_braid(r.bands[i - 1].letters, a.letters + b.letters + a.inverse().letters, s.strands)


@given(st.integers(2, 7).flatmap(lambda m: st.tuples(st.just(m), bands(m_max=m), words(m, max_len=6))))
def test_stored_entries_are_the_same_braid(data):
    m, b, u = data
    w = u * band_to_word(b, m) * u.inverse()
    (stored,) = HalfTwistSequence(m, (w,)).bands
    assert same_braid(stored.letters, w.letters, m)
    assert HalfTwistSequence(m, (stored,)).bands == (stored,)


def test_half_twist_sequence_rejects_non_half_twists():
    with pytest.raises(BraidError):
        HalfTwistSequence(3, (W("s1 s2", 3),))
