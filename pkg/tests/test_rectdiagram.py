import random

import pytest
from hypothesis import given, strategies as st

from lefkit.braider import braid_up, flatten
from lefkit.braidcore import MonotonicBand, Permutation
from lefkit.gen import Bounds, gen_random
from lefkit.invariants import euler_char_W
from lefkit.linediagram import LineDiagram, cover_stabilize
from lefkit.moves import move_P
from lefkit.rectdiagram import (
    ALLOWED,
    LocalConfig,
    MoveInstance,
    NotTranscribed,
    RectDiagram,
    RectError,
    RectSyntaxError,
    apply_rect_move,
    count_handles,
    handle_euler,
    is_restricted,
    normalize_isotopy,
    parse_rect,
    serialize_rect,
    single_disk,
    to_restricted,
    translate,
    validate,
)

T = Permutation.transposition
seeds = st.integers(0, 2**30)


def shuffled(D: RectDiagram, seed: int, k: int = 10) -> RectDiagram:
    """Random r1 swaps of rows and columns, skipping those that do not apply."""
    rng = random.Random(seed)
    x0, y0, x1, y1 = D.bbox()
    for _ in range(k):
        for axis, lo, hi in (("rows", y0, y1), ("cols", x0, x1)):
            try:
                D = apply_rect_move(D, MoveInstance.make("r1", rng.randint(lo, hi), axis=axis))
            except RectError:
                pass
    return D


def hopf_like() -> LineDiagram:
    t = T(1, 2, 2)
    return LineDiagram(2, (t, t), (MonotonicBand(1, 2, 1),))


# ---------------------------------------------------------------- validation


def test_single_disk_is_valid():
    D = single_disk(T(1, 2, 2))
    assert validate(D).ok
    assert braid_up(D) == LineDiagram(2, (T(1, 2, 2),), ())


def test_shared_ordinate_is_reported():
    cells = {(0, 0): LocalConfig("c", 2), (1, 0): LocalConfig("c", 0), (3, 0): LocalConfig("c", 2), (4, 0): LocalConfig("c", 0)}
    D = RectDiagram(2, cells, {1: T(1, 2, 2), 2: T(1, 2, 2)})
    rep = validate(D)
    assert [i.kind for i in rep.issues] == ["ordinate"]


def test_broken_band_is_reported():
    D = RectDiagram(2, {(0, 0): LocalConfig("c", 2), (1, 0): LocalConfig("a", 0)}, {1: T(1, 2, 2)})
    assert validate(D).of_kind("continuity")


def test_bad_rotation_is_reported():
    D = RectDiagram(2, {(0, 0): LocalConfig("c", 2), (1, 0): LocalConfig("c", 0), (0, 1): LocalConfig("g", 1)}, {})
    assert validate(D).of_kind("rotation")
    for kind, rots in ALLOWED.items():
        assert rots <= {0, 1, 2, 3} and 0 in rots


def test_wirtinger_violation_is_located():
    t12, t23, t13 = T(1, 2, 3), T(2, 3, 3), T(1, 3, 3)
    L = LineDiagram(3, (t12, t23, t13), (MonotonicBand(1, 3, 1, (1,)),))
    D = flatten(L)
    assert validate(D).ok
    sites = [xy for xy, c in D.cells.items() if c.kind == "f"]
    assert len(sites) == 1
    x, y = sites[0]
    rid = D.regions[(x, y, 2)]
    bad = RectDiagram(D.degree, D.cells, {**D.labels, rid: t12})
    issues = validate(bad).of_kind("wirtinger")
    assert [i.site for i in issues] == [(x, y)]


@given(seeds)
def test_flatten_output_is_valid_and_restricted(seed):
    L = gen_random(seed, Bounds(4, 8, 10))
    D = flatten(L)
    assert validate(D).ok
    assert is_restricted(D)
    assert to_restricted(D) == D


# ---------------------------------------------------------------- handle counts


def test_flatten_minimal_example():
    D = flatten(hopf_like())
    assert len(D.horizontal_runs()) == 2
    assert len(D.vertical_runs()) == 1
    assert sum(1 for c in D.cells.values() if c.kind in "gh") == 1


@given(seeds)
def test_flatten_band_counts(seed):
    L = gen_random(seed, Bounds(4, 8, 10))
    D = flatten(L)
    assert len(D.vertical_runs()) == L.n
    assert sum(1 for c in D.cells.values() if c.kind in "gh") == L.n
    assert count_handles(D) == (L.m, L.n)
    assert handle_euler(D) == euler_char_W(L) == L.degree - L.m + L.n


# ---------------------------------------------------------------- text format


@given(seeds)
def test_rect_round_trip(seed):
    D = flatten(gen_random(seed, Bounds(4, 8, 10)))
    assert parse_rect(serialize_rect(D)) == D


@pytest.mark.parametrize(
    "text, line",
    [
        ("rect 2\n", 1),
        ("rect 1\ndegree two\n", 2),
        ("rect 1\ndegree 2\ncell 0 0 z 0\n", 3),
        ("rect 1\ndegree 2\ncell 0 0 c 2\ncell 0 0 c 0\n", 4),
        ("rect 1\ndegree 2\ncell 0 0 c 2\nlabel 1 (1 3)\n", 4),
        ("rect 1\ndegree 2\n\n# note\nbox 1\n", 5),
    ],
)
def test_rect_syntax_errors(text, line):
    with pytest.raises(RectSyntaxError) as exc:
        parse_rect(text)
    assert exc.value.line == line


# ---------------------------------------------------------------- moves


def test_r1_swaps_contiguous_rows():
    t = T(1, 2, 2)
    cells = {(0, 0): LocalConfig("c", 2), (1, 0): LocalConfig("c", 0), (2, 1): LocalConfig("c", 2), (3, 1): LocalConfig("c", 0)}
    D = RectDiagram(2, cells, {1: t, 2: t})
    E = apply_rect_move(D, MoveInstance.make("r1", 0, axis="rows"))
    assert set(E.cells) == {(0, 1), (1, 1), (2, 0), (3, 0)}
    assert validate(E).ok
    assert apply_rect_move(E, MoveInstance.make("r1", 0, axis="rows")) == D
    # overlapping spans are not contiguous in the move's sense
    stacked = flatten(LineDiagram(2, (t, t), ()))
    with pytest.raises(RectError):
        apply_rect_move(stacked, MoveInstance.make("r1", 0, axis="rows"))


@given(seeds, st.integers(0, 50))
def test_r1_is_local_and_invertible(seed, k):
    D = flatten(gen_random(seed, Bounds(4, 8, 10)))
    rng = random.Random(k)
    x0, y0, x1, y1 = D.bbox()
    y = rng.randint(y0, y1)
    try:
        E = apply_rect_move(D, MoveInstance.make("r1", y, axis="rows"))
    except RectError:
        return
    assert validate(E).ok
    outside = {xy: c for xy, c in D.cells.items() if xy[1] not in (y, y + 1)}
    assert {xy: c for xy, c in E.cells.items() if xy[1] not in (y, y + 1)} == outside
    assert apply_rect_move(E, MoveInstance.make("r1", y, axis="rows")) == D


@given(seeds)
def test_stab_matches_cover_stabilize(seed):
    L = gen_random(seed, Bounds(4, 8, 10))
    D = flatten(L)
    S = apply_rect_move(D, MoveInstance.make("stab", i=1))
    assert S.degree == D.degree + 1
    assert validate(S).ok
    assert braid_up(S) == cover_stabilize(L, 1)
    assert apply_rect_move(S, MoveInstance.make("destab")) == D


@given(seeds, st.sampled_from("+-"))
def test_k2_matches_payload_move(seed, variant):
    L = gen_random(seed, Bounds(4, 8, 10))
    D = flatten(L)
    K = apply_rect_move(D, MoveInstance.make("k2", variant=variant, i=1))
    assert validate(K).ok
    assert {xy: c for xy, c in K.cells.items() if xy in D.cells} == D.cells
    P = move_P(L, variant, 1)
    assert braid_up(K) == P
    # handle counts of both sides, d - #disks + #bands
    assert handle_euler(K) - handle_euler(D) == (P.degree - P.m + P.n) - (L.degree - L.m + L.n) == 1
    assert apply_rect_move(K, MoveInstance.make("k2inv")) == D


@given(seeds, st.data())
def test_k1_pair_insertion(seed, data):
    D = flatten(gen_random(seed, Bounds(4, 8, 10)))
    cols = sorted(r[0][0] for r in D.vertical_runs())
    if not cols:
        return
    x = data.draw(st.sampled_from(cols))
    K = apply_rect_move(D, MoveInstance.make("k1", x, sign=data.draw(st.sampled_from((1, -1)))))
    assert validate(K).ok
    H0, V0 = count_handles(D)
    H1, V1 = count_handles(K)
    assert (H1 - H0, V1 - V0) == (0, 2)
    assert handle_euler(K) == handle_euler(D) + 2
    assert apply_rect_move(K, MoveInstance.make("k1inv", x + 1)) == D


def test_untranscribed_moves_say_so():
    D = flatten(hopf_like())
    with pytest.raises(NotTranscribed):
        apply_rect_move(D, MoveInstance.make("r2", 0))
    with pytest.raises(RectError):
        apply_rect_move(D, MoveInstance.make("r99", 0))


def test_destab_needs_an_isolated_disk():
    with pytest.raises(RectError):
        apply_rect_move(flatten(hopf_like()), MoveInstance.make("destab"))


# ---------------------------------------------------------------- restricted form


def test_cap_replacement():
    cells = {(0, 0): LocalConfig("c", 2), (1, 0): LocalConfig("d", 0), (2, 0): LocalConfig("c", 0), (1, 1): LocalConfig("c", 3)}
    D = RectDiagram(2, cells, {1: T(1, 2, 2)})
    assert validate(D).ok and not is_restricted(D)
    R = to_restricted(D)
    assert validate(R).ok and is_restricted(R)
    assert braid_up(R) == braid_up(D)


# ---------------------------------------------------------------- normal form


@given(seeds, st.integers(-5, 5), st.integers(-5, 5))
def test_normal_form_ignores_translation(seed, dx, dy):
    D = flatten(gen_random(seed, Bounds(4, 8, 10)))
    assert normalize_isotopy(translate(D, dx, dy)) == normalize_isotopy(D)


@given(seeds, st.integers(0, 1000))
def test_normal_form_ignores_r1(seed, k):
    D = flatten(gen_random(seed, Bounds(4, 8, 10)))
    N = normalize_isotopy(D)
    assert validate(N).ok
    assert normalize_isotopy(shuffled(D, k)) == N


def test_normal_form_separates_k1_pairs():
    D = flatten(hopf_like())
    x = D.vertical_runs()[0][0][0]
    K = apply_rect_move(D, MoveInstance.make("k1", x, sign=1))
    assert normalize_isotopy(K) != normalize_isotopy(D)
