import random

import pytest
from hypothesis import given, strategies as st

from lefkit.arcs import axis_form, axis_to_arc, monotonic_arc
from lefkit.braidcore import MonotonicBand, Permutation, perm_of, total_braid, HalfTwistSequence
from lefkit.fiber import lf_from_linediagram
from lefkit.gen import Bounds, gen_random
from lefkit.linediagram import (
    DiagramError,
    LfdSyntaxError,
    LineDiagram,
    band_from_word,
    braid_destabilize,
    braid_stabilize,
    check_labels,
    cover_destabilize,
    cover_stabilize,
    parse_lfd,
    serialize_lfd,
    slide,
    worked_example,
    worked_example_words,
)

from oracles import compose_maps, perm_as_map, transposition_map

T = Permutation.transposition


def diagram(d, labels, bands=()):
    return LineDiagram(d, tuple(T(a, b, d) for a, b in labels), tuple(bands))


seeds = st.integers(0, 2**30)


# ---------------------------------------------------------------- labels


def test_check_labels_examples():
    L = diagram(2, [(1, 2)] * 4, [MonotonicBand(1, 4, 1, (1, -1))])
    assert check_labels(L)
    good = diagram(3, [(1, 2), (2, 3), (1, 3)], [MonotonicBand(1, 3, 1, (1,))])
    assert check_labels(good)
    bad = diagram(3, [(1, 2), (2, 3), (1, 2)], [MonotonicBand(1, 3, 1, (1,))])
    assert not check_labels(bad)


def test_check_labels_brute_force():
    # conjugate (1 2) by (2 3) as maps: sheet k must carry (1 3)
    c = compose_maps(transposition_map(2, 3), transposition_map(1, 2), transposition_map(2, 3))
    assert {k: v for k, v in c.items() if k != v} == transposition_map(1, 3)


@given(seeds)
def test_generated_diagrams_are_consistent(seed):
    L = gen_random(seed, Bounds(4, 8, 10))
    assert check_labels(L)
    for b in L.bands:
        assert perm_of(L.words()[L.bands.index(b)]) == T(b.j, b.k, L.m)


def test_label_validation():
    with pytest.raises(DiagramError):
        LineDiagram(3, (Permutation.parse("(1 2 3)", 3),), ())
    with pytest.raises(DiagramError):
        diagram(2, [(1, 2)], [MonotonicBand(1, 2, 1)])


# ---------------------------------------------------------------- text format


@given(seeds)
def test_lfd_round_trip(seed):
    L = gen_random(seed, Bounds(4, 8, 10))
    assert parse_lfd(serialize_lfd(L)) == L


def test_lfd_general_band_round_trip():
    W = worked_example()
    text = serialize_lfd(W)
    # the non-monotonic band is written as its canonical word
    last = text.strip().split("\n")[-1]
    assert last.startswith("bandw ")
    from lefkit.braidcore import BraidWord

    assert perm_of(BraidWord.parse(last[6:], 6)) == T(4, 5, 6)
    assert parse_lfd(text) == W


@pytest.mark.parametrize(
    "text, line",
    [
        ("lfd 2\n", 1),
        ("lfd 1\ndegree x\n", 2),
        ("lfd 1\ndegree 2\nsheets 1\nlabel 1 (1 3)\n", 4),
        ("lfd 1\ndegree 2\nsheets 2\nlabel 1 (1 2)\nlabel 2 (1 2)\nband 1 2 * \n", 6),
        ("lfd 1\ndegree 2\nsheets 2\nlabel 1 (1 2)\nlabel 2 (1 2)\nband 1 3 +\n", 6),
    ],
)
def test_lfd_syntax_errors(text, line):
    with pytest.raises(LfdSyntaxError) as exc:
        parse_lfd(text)
    assert exc.value.line == line


# ---------------------------------------------------------------- worked example


def test_worked_example_monotonic_flags():
    W = worked_example()
    assert [isinstance(b, MonotonicBand) for b in W.bands] == [True, True, True, False]
    assert W.bands[1] == MonotonicBand(2, 4, -1, (1,))
    assert W.bands[2] == MonotonicBand(3, 6, 1, (-1, 1))


def test_worked_example_destabilization_order():
    W = worked_example()
    with pytest.raises(DiagramError, match="blocked by bands \\[3\\]"):
        braid_destabilize(W, 4, 5)
    W2 = braid_destabilize(W, 3, 6)
    W3 = braid_destabilize(W2, 3, 5)
    assert W3.m == 4 and W3.n == 2
    assert W3.bands == W.bands[:2]


# ---------------------------------------------------------------- stabilizations


def test_cover_stabilize_examples():
    L = diagram(2, [(1, 2)] * 2, [MonotonicBand(1, 2, 1)])
    S = cover_stabilize(L, 1)
    assert S.degree == 3 and S.m == 3 and S.labels[-1] == T(1, 3, 3)
    assert cover_destabilize(S) == L
    blocked = LineDiagram(3, S.labels, S.bands + (MonotonicBand(2, 3, 1),))
    with pytest.raises(DiagramError):
        cover_destabilize(blocked)


@given(seeds, st.data())
def test_cover_stabilize_fiber_counts(seed, data):
    L = gen_random(seed, Bounds(3, 6, 5))
    i = data.draw(st.integers(1, L.degree))
    F0 = lf_from_linediagram(L).fiber
    F1 = lf_from_linediagram(cover_stabilize(L, i)).fiber
    # one more vertex and one more edge, joined to the old surface
    assert F1.euler_char == F0.euler_char
    assert F1.components == F0.components
    assert F1.num_boundary == F0.num_boundary


@given(seeds, st.data())
def test_braid_stabilize_inverse(seed, data):
    L = gen_random(seed, Bounds(4, 6, 5))
    j = data.draw(st.integers(1, L.m))
    sign = data.draw(st.sampled_from((1, -1)))
    S = braid_stabilize(L, j, sign)
    assert check_labels(S) and S.m == L.m + 1 and S.n == L.n + 1
    assert braid_destabilize(S, S.n, j + 1) == L


@given(seeds, st.data())
def test_braid_stabilize_general_site(seed, data):
    L = gen_random(seed, Bounds(4, 6, 5))
    j = data.draw(st.integers(1, L.m))
    q = data.draw(st.integers(1, L.m + 1))
    top, bottom = (j, q) if q > j else (q, j + 1)
    pat = tuple(data.draw(st.lists(st.sampled_from((1, -1)), min_size=bottom - top - 1, max_size=bottom - top - 1)))
    index = data.draw(st.integers(1, L.n + 1))
    S = braid_stabilize(L, j, 1, q, pat, index)
    assert check_labels(S)
    assert braid_destabilize(S, index, q) == L


# ---------------------------------------------------------------- sliding


def test_slide_disjoint_bands_interchange():
    L = diagram(2, [(1, 2)] * 4, [MonotonicBand(1, 2, 1), MonotonicBand(3, 4, -1)])
    assert slide(L, 1).bands == (L.bands[1], L.bands[0])


def test_slide_permutation_rule():
    L = diagram(2, [(1, 2)] * 3, [MonotonicBand(1, 2, 1), MonotonicBand(2, 3, 1)])
    R = slide(L, 1, "right")
    assert [perm_of(w) for w in R.words()] == [T(1, 3, 3), T(1, 2, 3)]


@given(seeds, st.data())
def test_slide_properties(seed, data):
    L = gen_random(seed, Bounds(4, 7, 6))
    if L.n < 2:
        return
    i = data.draw(st.integers(1, L.n - 1))
    d = data.draw(st.sampled_from(("right", "left")))
    R = slide(L, i, d)
    assert check_labels(R)
    assert slide(R, i, "left" if d == "right" else "right") == L
    before = perm_of(total_braid(HalfTwistSequence(L.m, tuple(L.words()))))
    after = perm_of(total_braid(HalfTwistSequence(L.m, tuple(R.words()))))
    assert before == after


def test_slide_range_error():
    with pytest.raises(DiagramError):
        slide(worked_example(), 4)


# ---------------------------------------------------------------- arcs


@given(seeds)
def test_axis_form_round_trip(seed):
    L = gen_random(seed, Bounds(4, 8, 10))
    R = L
    rng = random.Random(seed)
    for _ in range(2):
        if R.n >= 2:
            R = slide(R, rng.randint(1, R.n - 1), rng.choice(("right", "left")))
    for a in R.arcs():
        assert axis_to_arc(axis_form(a)) == a


def test_band_from_word_worked_example():
    bands = [band_from_word(w) for w in worked_example_words()]
    assert bands[0] == MonotonicBand(1, 2, 1)
    assert not isinstance(bands[3], MonotonicBand)
    assert (bands[3].j, bands[3].k) == (4, 5)
