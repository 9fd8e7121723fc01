"""Arcs in the punctured disk and the braid action on them.

Punctures sit at 1..m on a horizontal axis and the base point lies far
below.  ``s_h`` is the straight path from the base point up to puncture h,
and the loop ``g_h`` goes up just left of h, over it, and back down just
right of it.  An arc between punctures a and b is stored in star form as a
reduced word u in the loops, meaning the path s_a^-1 . u . s_b.

The axis form records where an arc crosses the axis.  Positions are
doubled, so puncture h is at 2h and the gap between h and h+1 is at 2h+1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .braidcore import (
    BraidError,
    BraidWord,
    Letter,
    MonotonicBand,
    Permutation,
    band_to_word,
    free_reduce,
    peel_conjugate,
    split_conjugate,
)

LOWER, UPPER = -1, 1


def fg_inverse(u) -> tuple[Letter, ...]:
    return tuple((h, -e) for h, e in reversed(u))


@dataclass(frozen=True)
class Arc:
    """Isotopy class of an arc between punctures a < b, in star form."""

    a: int
    u: tuple[Letter, ...]
    b: int

    @classmethod
    def make(cls, a: int, u, b: int) -> "Arc":
        u = free_reduce(u)
        if a == b:
            raise BraidError("arc endpoints coincide")
        if a > b:
            a, b, u = b, a, fg_inverse(u)
        # loops around an endpoint can be absorbed by turning around it
        changed = True
        while changed:
            changed = False
            if u and u[0][0] == a:
                u = u[1:]
                changed = True
            if u and u[-1][0] == b:
                u = u[:-1]
                changed = True
        return cls(a, tuple(u), b)

    def linked(self) -> set[int]:
        return {h for h, _ in self.u}

    def transport(self, labels: list[Permutation]) -> Permutation:
        """Product of the labels met along u, left to right."""
        d = labels[0].degree
        p = Permutation.identity(d)
        for h, _ in self.u:
            p = p * labels[h - 1]
        return p


def elementary_arc(j: int) -> Arc:
    return Arc(j, (), j + 1)


# ---------------------------------------------------------------- braid action


def _act_letter(i: int, e: int, m: int):
    """Images of loops and endpoint corrections for the homeomorphism of s_i^e."""
    if e == 1:
        loops = {i: ((i, 1), (i + 1, 1), (i, -1)), i + 1: ((i, 1),)}
        corr = {i: ((i, 1),)}
    else:
        loops = {i: ((i + 1, 1),), i + 1: ((i + 1, -1), (i, 1), (i + 1, 1))}
        corr = {i + 1: ((i + 1, -1),)}
    return loops, corr


def act_on_arc(arc: Arc, letters, m: int) -> Arc:
    """Push an arc forward by the homeomorphisms of the letters, left to right."""
    a, u, b = arc.a, arc.u, arc.b
    for i, e in letters:
        loops, corr = _act_letter(i, e, m)
        new_u: list[Letter] = []
        for h, x in u:
            img = loops.get(h, ((h, 1),))
            new_u.extend(img if x == 1 else fg_inverse(img))
        ca = corr.get(a, ())
        cb = corr.get(b, ())
        u = fg_inverse(ca) + tuple(new_u) + cb

        def swap(p):
            return i + 1 if p == i else i if p == i + 1 else p

        a, b = swap(a), swap(b)
        u = free_reduce(u)
    return Arc.make(a, u, b)


def word_arc(w: BraidWord) -> tuple[Arc, int]:
    """Arc and sign of a conjugated standard generator."""
    conj, (j, sign) = split_conjugate(free_reduce(w.letters))
    return act_on_arc(elementary_arc(j), fg_inverse(conj), w.strands), sign


def monotonic_arc(b: MonotonicBand) -> Arc:
    return Arc.make(b.j, tuple((h, 1) for h in b.through()), b.k)


# ---------------------------------------------------------------- axis form


@dataclass(frozen=True)
class AxisForm:
    a: int
    start: int
    crossings: tuple[int, ...]
    b: int

    def points(self) -> list[int]:
        return [2 * self.a, *self.crossings, 2 * self.b]

    def halves(self) -> list[int]:
        out = []
        h = self.start
        for _ in range(len(self.crossings) + 1):
            out.append(h)
            h = -h
        return out


def axis_form(arc: Arc) -> AxisForm:
    cr: list[int] = []
    for h, e in arc.u:
        cr.extend([2 * h - 1, 2 * h + 1] if e == 1 else [2 * h + 1, 2 * h - 1])
    start = LOWER
    a, b = arc.a, arc.b
    changed = True
    while changed:
        changed = False
        stack: list[int] = []
        for x in cr:
            if stack and stack[-1] == x:
                stack.pop()
                changed = True
            else:
                stack.append(x)
        cr = stack
        if cr and cr[0] in (2 * a - 1, 2 * a + 1):
            cr = cr[1:]
            start = -start
            changed = True
        if cr and cr[-1] in (2 * b - 1, 2 * b + 1):
            cr = cr[:-1]
            changed = True
    return AxisForm(a, start, tuple(cr), b)


def axis_to_arc(ax: AxisForm) -> Arc:
    pts = ax.points()
    u: list[Letter] = []
    for (x1, x2), half in zip(zip(pts, pts[1:]), ax.halves()):
        if half != UPPER:
            continue
        if x1 < x2:
            u.extend((h, 1) for h in range(x1 // 2, x2 // 2 + 1) if x1 < 2 * h < x2)
        else:
            u.extend((h, -1) for h in range(x1 // 2, x2 // 2 - 1, -1) if x2 < 2 * h < x1)
    return Arc.make(ax.a, u, ax.b)


def axis_monotone(ax: AxisForm) -> bool:
    pts = ax.points()
    return all(p < q for p, q in zip(pts, pts[1:]))


def arc_to_monotonic(arc: Arc, sign: int) -> MonotonicBand | None:
    ax = axis_form(arc)
    if not axis_monotone(ax):
        return None
    pts = ax.points()
    halves = ax.halves()
    pattern = []
    for h in range(arc.a + 1, arc.b):
        t = max(i for i, p in enumerate(pts[:-1]) if p < 2 * h)
        pattern.append(1 if halves[t] == UPPER else -1)
    return MonotonicBand(arc.a, arc.b, sign, tuple(pattern))


def complexity(arc: Arc) -> tuple[int, int]:
    ax = axis_form(arc)
    pts = ax.points()
    return len(ax.crossings), sum(abs(p - q) for p, q in zip(pts, pts[1:]))


def extremal_points(arc: Arc) -> list[int]:
    """Indices into the axis points where the arc reverses horizontal direction."""
    pts = axis_form(arc).points()
    out = []
    for t in range(1, len(pts) - 1):
        if (pts[t] - pts[t - 1]) * (pts[t + 1] - pts[t]) < 0:
            out.append(t)
    return out


def untangle(arc: Arc, m: int) -> tuple[tuple[Letter, ...], Arc]:
    """Greedy sequence of generators taking the arc to an x-monotone one."""
    applied: list[Letter] = []
    cur = arc
    guard = 0
    while arc_to_monotonic(cur, 1) is None:
        best = None
        here = complexity(cur)
        for i in range(1, m):
            for e in (1, -1):
                nxt = act_on_arc(cur, [(i, e)], m)
                c = complexity(nxt)
                if c < here and (best is None or c < best[0]):
                    best = (c, (i, e), nxt)
        if best is None:
            raise BraidError("could not untangle arc")
        applied.append(best[1])
        cur = best[2]
        guard += 1
        if guard > 1000:
            raise BraidError("untangling did not terminate")
    return tuple(applied), cur


def canonical_word(arc: Arc, sign: int, m: int) -> BraidWord:
    """Deterministic word for the half-twist of given sign about an arc."""
    mono = arc_to_monotonic(arc, sign)
    if mono is not None:
        return band_to_word(mono, m)
    w, straight = untangle(arc, m)
    core = band_to_word(arc_to_monotonic(straight, sign), m)
    letters = w + core.letters + fg_inverse(w)
    return BraidWord(m, peel_conjugate(letters))
