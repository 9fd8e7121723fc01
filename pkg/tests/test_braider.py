import random

import pytest
from hypothesis import given, settings, strategies as st

from lefkit.arcs import extremal_points
from lefkit.braider import braid_up, flatten, monotonize
from lefkit.braidcore import BraidError, BraidWord, MonotonicBand, Permutation, perm_of
from lefkit.gen import Bounds, gen_random
from lefkit.invariants import certify, euler_char_W, h1_W
from lefkit.fiber import lf_from_linediagram
from lefkit.linediagram import DiagramError, LineDiagram, band_from_word, check_labels, slide, worked_example
from lefkit.rectdiagram import RectError, single_disk

T = Permutation.transposition
seeds = st.integers(0, 2**30)


def tangled(seed: int, bounds=Bounds(4, 7, 6)):
    """A monotonic diagram with one random slide applied, or None if nothing bent."""
    L = gen_random(seed, bounds)
    if L.n < 2:
        return None
    rng = random.Random(seed)
    R = slide(L, rng.randint(1, L.n - 1), rng.choice(("right", "left")))
    return None if R.is_monotonic() else R


# ---------------------------------------------------------------- round trip


def test_single_disk_braids_to_one_sheet():
    L = braid_up(single_disk(T(1, 2, 2)))
    assert (L.m, L.n, L.labels) == (1, 0, (T(1, 2, 2),))


def test_worked_example_monotonic_part_round_trips():
    W = worked_example()
    M = LineDiagram(W.degree, W.labels, W.bands[:3])
    D = flatten(M)
    assert len(D.horizontal_runs()) == 6
    assert braid_up(D) == M


@given(seeds)
def test_round_trip(seed):
    L = gen_random(seed, Bounds(4, 8, 10))
    B = braid_up(flatten(L))
    assert B == L
    assert check_labels(B)
    for w, b in zip(B.words(), B.bands):
        assert perm_of(w) == T(b.j, b.k, B.m)


def test_flatten_refuses_general_bands():
    with pytest.raises(RectError, match="monotonic"):
        flatten(worked_example())


# ---------------------------------------------------------------- monotonize


def test_monotonize_identity_on_monotonic_input():
    L = gen_random(3, Bounds(3, 5, 4))
    M, script = monotonize(L)
    assert M == L and len(script) == 0


def test_monotonize_worked_example():
    W = worked_example()
    M, script = monotonize(W)
    assert M.is_monotonic() and M.m == 7
    assert [s.name for s in script] == ["S", "slide"]
    assert certify(W, M, script).ok


def test_monotonize_rejects_non_half_twists():
    with pytest.raises(BraidError):
        band_from_word(BraidWord.parse("s1 s2", 3))


@settings(max_examples=40)
@given(seeds)
def test_monotonize_gently_bent_cores(seed):
    R = tangled(seed)
    if R is None or max(len(extremal_points(a)) for a in R.arcs()) > 2:
        return
    M, script = monotonize(R)
    assert M.is_monotonic()
    names = [s.name for s in script]
    # stabilizations come first, slides after
    assert names == sorted(names, key=lambda n: n != "S")
    assert script.replay(R)[-1] == M
    assert certify(R, M, script).ok
    P0, P1 = lf_from_linediagram(R), lf_from_linediagram(M)
    assert euler_char_W(P0) == euler_char_W(P1) and h1_W(P0) == h1_W(P1)


@settings(max_examples=40)
@given(seeds)
def test_monotonize_is_sound_or_refuses(seed):
    R = tangled(seed)
    if R is None:
        return
    try:
        M, script = monotonize(R)
    except DiagramError:
        return
    assert M.is_monotonic()
    assert certify(R, M, script).ok
    assert braid_up(flatten(M)) == M
