"""Seeded random labeled line diagrams."""

from __future__ import annotations

import os
import random
from dataclasses import dataclass

from .braidcore import MonotonicBand, Permutation
from .arcs import monotonic_arc
from .linediagram import LineDiagram, band_consistent, check_labels


@dataclass(frozen=True)
class Bounds:
    degree: int = 3
    sheets: int = 6
    bands: int = 6


def default_seed(seed: int | None = None) -> int:
    env = os.environ.get("LEFKIT_SEED")
    if env is not None:
        return int(env)
    return 0 if seed is None else seed


def _random_transposition(rng: random.Random, d: int, reached: set[int]) -> Permutation:
    fresh = [x for x in range(1, d + 1) if x not in reached]
    if fresh and reached and rng.random() < 0.7:
        a, b = rng.choice(sorted(reached)), rng.choice(fresh)
    else:
        a, b = rng.sample(range(1, d + 1), 2)
    reached |= {a, b}
    return Permutation.transposition(a, b, d)


def gen_random(seed: int, bounds: Bounds = Bounds(), exact: bool = False) -> LineDiagram:
    """Random monotonic labeled line diagram within the bounds.

    Sheets are labeled top to bottom; a sheet that ends some band gets the
    label forced by forward transport along the first such band, so every
    band is consistent by construction.  With ``exact`` the sizes are the
    bounds themselves, otherwise they are drawn uniformly up to them.
    """
    rng = random.Random(seed)
    d = bounds.degree if exact else rng.randint(2, max(2, bounds.degree))
    m = bounds.sheets if exact else rng.randint(1, max(1, bounds.sheets))
    n = bounds.bands if exact else rng.randint(0, bounds.bands)
    if m < 2:
        n = 0
    shapes = []
    for _ in range(n):
        j, k = sorted(rng.sample(range(1, m + 1), 2))
        pat = tuple(rng.choice((1, -1)) for _ in range(k - j - 1))
        shapes.append((j, k, rng.choice((1, -1)), pat))
    labels: list[Permutation | None] = [None] * m
    reached: set[int] = set()
    for r in range(1, m + 1):
        for j, k, s, pat in shapes:
            if k == r:
                T = Permutation.identity(d)
                for h, e in zip(range(j + 1, k), pat):
                    if e == 1:
                        T = T * labels[h - 1]
                labels[r - 1] = labels[j - 1].conj(T)
                break
        else:
            labels[r - 1] = _random_transposition(rng, d, reached)
    bands = []
    L0 = LineDiagram(d, tuple(labels), ())
    for j, k, s, pat in shapes:
        b = MonotonicBand(j, k, s, pat)
        if band_consistent(L0, monotonic_arc(b)):
            bands.append(b)
    L = LineDiagram(d, tuple(labels), tuple(bands))
    assert check_labels(L)
    return L


def gen_t_site(seed: int, bounds: Bounds = Bounds(3, 5, 4), tries: int = 50):
    """Random presentation with a T-move site at twists (i, i+1).

    A band is attached at two distinct vertices of an existing vanishing
    cycle a = P1 * P2^-1, with both feet on the same side of a, and the
    opposite-sign pair e*P1, e*P2 is inserted into the sequence.
    Returns (presentation, i) or None.
    """
    from .fiber import Cycle, FiberSurface, LFPresentation, Twist, lf_from_linediagram
    from .moves import transfer

    rng = random.Random(seed)
    for k in range(tries):
        P = lf_from_linediagram(gen_random(rng.randrange(1 << 30), bounds))
        F = P.fiber
        walks = [t.cycle for t in P.twists if t.cycle is not None and len(t.cycle) >= 2 and any(t.cls)]
        if not walks:
            continue
        a = rng.choice(walks).steps
        verts = F.walk_vertices(Cycle(a))
        once = [x for x in range(len(a)) if verts.count(verts[x]) == 1]
        cuts = [(x, y) for x in once for y in once if x < y]
        if not cuts:
            continue
        x, y = rng.choice(cuts)
        a = a[x:] + a[:x]
        h, t = verts[x], verts[y]
        p1 = a[: y - x]
        p2 = tuple((r, -s) for r, s in reversed(a[y - x :]))
        e = F.m + 1
        left = rng.random() < 0.5
        rot = {v: list(es) for v, es in F.rotation.items()}
        # at h the core leaves along p1, at t along p2 reversed
        for v, out in ((h, p1[0][0]), (t, p2[-1][0])):
            ring = rot[v]
            q = ring.index(out)
            ring.insert(q + 1 if left else q, e)
        F2 = FiberSurface(F.degree, list(F.edges) + [(t, h)], rot, tuple(F.turns) + (1,))
        c1 = Cycle(((e, 1),) + p1)
        c2 = Cycle(((e, 1),) + p2)
        try:
            F2.check_closed(c1)
            F2.check_closed(c2)
        except ValueError:
            continue
        old = [transfer(F, F2, tw) for tw in P.twists]
        s = rng.choice((1, -1))
        i = rng.randint(1, len(old) + 1)
        pair = [Twist.of_cycle(F2, c1, s), Twist.of_cycle(F2, c2, -s)]
        return LFPresentation(F2, tuple(old[: i - 1] + pair + old[i - 1 :])), i
    return None
