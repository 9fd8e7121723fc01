"""Moves on fibration presentations and replayable move scripts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Union

import numpy as np

from .braidcore import BraidError, MonotonicBand, Permutation
from .fiber import (
    Cycle,
    FiberSurface,
    LFPresentation,
    Twist,
    imat,
    lf_from_linediagram,
)
from .invariants import basis_chains, boundary_openbook, OpenBook
from .linediagram import (
    DiagramError,
    LineDiagram,
    band_arc,
    braid_destabilize,
    braid_stabilize,
    cover_destabilize,
    cover_stabilize,
    make_band,
    slide,
    insert_puncture,
)


class MoveError(ValueError):
    pass


# ---------------------------------------------------------------- helpers


def chain_of(F: FiberSurface, cls) -> list[int]:
    B = basis_chains(F)
    v = B.dot(imat(list(cls)).reshape(len(cls))) if F.rank else np.zeros(F.m, dtype=object)
    return [int(x) for x in v]


def transfer(F_old: FiberSurface, F_new: FiberSurface, t: Twist, edge_map=None) -> Twist:
    """Carry a twist to a fiber whose graph contains the old one."""
    edge_map = edge_map or {r: r for r in range(1, F_old.m + 1)}
    z_old = chain_of(F_old, t.cls)
    z = [0] * F_new.m
    for r, x in enumerate(z_old, start=1):
        z[edge_map[r] - 1] = x
    cycle = None
    if t.cycle is not None:
        cycle = Cycle(tuple((edge_map[e], s) for e, s in t.cycle.steps))
    cls = tuple(int(x) for x in F_new.class_of_chain(z))
    rot = F_new.rotation_number(cycle) if cycle is not None else t.rot
    return Twist(cls, t.sign, rot, cycle)


# ---------------------------------------------------------------- twist sliding


def twist_slide(P: LFPresentation, i: int, direction: str = "right") -> LFPresentation:
    """Homological Hurwitz move on the monodromy sequence (1-indexed)."""
    if not 1 <= i < P.n:
        raise MoveError(f"slide position {i} out of range 1..{P.n - 1}")
    F = P.fiber
    A, B = P.twists[i - 1], P.twists[i]
    if direction == "right":
        k = A.sign * F.pairing(B.vector(), A.vector())
        cls = tuple(int(x) for x in B.vector() + k * A.vector())
        pair = (Twist(cls, B.sign, B.rot + k * A.rot), A)
    elif direction == "left":
        k = -B.sign * F.pairing(A.vector(), B.vector())
        cls = tuple(int(x) for x in A.vector() + k * B.vector())
        pair = (B, Twist(cls, A.sign, A.rot + k * B.rot))
    else:
        raise MoveError(f"bad direction {direction!r}")
    tw = list(P.twists)
    tw[i - 1 : i + 1] = pair
    return P.with_twists(tw)


# ---------------------------------------------------------------- S: Hopf stabilization


def move_S(L: LineDiagram, sheet: int, sign: int = 1) -> LineDiagram:
    return braid_stabilize(L, sheet, sign)


def move_S_inverse(L: LineDiagram, band: int, sheet: int | None = None) -> LineDiagram:
    try:
        return braid_destabilize(L, band, sheet)
    except DiagramError as exc:
        raise MoveError(str(exc)) from None


# ---------------------------------------------------------------- T: band reattachment


def _rotate_to(steps, e):
    """Rotate a walk to start with edge e, reversing it if e is run backwards."""
    for k, (x, s) in enumerate(steps):
        if x == e:
            w = steps[k:] + steps[:k]
            if s == -1:
                w = tuple((x2, -s2) for x2, s2 in reversed(w))
                w = w[-1:] + w[:-1]
            return tuple(w)
    raise MoveError(f"walk does not traverse edge {e}")


def _side(F: FiberSurface, v: int, x: int, d_in: int, d_out: int) -> bool:
    """Whether dart x lies counterclockwise strictly between the exit and entry darts at v."""
    ring = F.rotation[v]
    p, q, s = F._pos[(v, d_in)], F._pos[(v, d_out)], F._pos[(v, x)]
    k = len(ring)
    return 0 < (s - q) % k < (p - q) % k


def t_move_site(P: LFPresentation, i: int) -> tuple[int, dict[int, tuple[int, int]]]:
    """Edge and dart swaps for a T move on twists i, i+1, or raise MoveError."""
    if not 1 <= i < P.n:
        raise MoveError(f"twist index {i} out of range")
    F = P.fiber
    A, B = P.twists[i - 1], P.twists[i]
    if A.sign == B.sign:
        raise MoveError("T needs consecutive twists of opposite sign")
    if A.cycle is None or B.cycle is None:
        raise MoveError("T needs explicit cycles for both twists")
    once_a = {e for e, _ in A.cycle.steps if sum(1 for x, _ in A.cycle.steps if x == e) == 1}
    once_b = {e for e, _ in B.cycle.steps if sum(1 for x, _ in B.cycle.steps if x == e) == 1}
    for e in sorted(once_a & once_b):
        others = [
            k
            for k, t in enumerate(P.twists, start=1)
            if k not in (i, i + 1)
            and (
                (t.cycle is not None and any(x == e for x, _ in t.cycle.steps))
                or (t.cycle is None and chain_of(F, t.cls)[e - 1] != 0)
            )
        ]
        if others:
            continue
        wa, wb = _rotate_to(A.cycle.steps, e), _rotate_to(B.cycle.steps, e)
        if len(wa) < 2 or len(wb) < 2:
            continue
        tail, head = F.edges[e - 1]
        # sides are only well defined when each cycle meets each foot once
        vis = [F.walk_vertices(c).count(v) for c in (A.cycle, B.cycle) for v in (head, tail)]
        if head == tail or vis != [1, 1, 1, 1]:
            continue
        # the two cycles leave e through different darts at the head and
        # enter it through different darts at the tail
        ends = {head: (wa[1][0], wb[1][0]), tail: (wa[-1][0], wb[-1][0])}
        if any(y == z for y, z in ends.values()):
            continue
        # the core runs P1 then P2 backwards; the band must leave it on the
        # same side at both feet, so that band and annulus form a pair of pants
        if _side(F, head, e, ends[head][1], ends[head][0]) != _side(F, tail, e, ends[tail][0], ends[tail][1]):
            continue
        swaps = {}
        for v, (y, z) in ends.items():
            ring = F.rotation[v]
            p = F._pos[(v, e)]
            nbrs = {ring[(p - 1) % len(ring)], ring[(p + 1) % len(ring)]}
            pick = y if y in nbrs else z if z in nbrs else None
            if pick is None:
                break
            swaps[v] = (e, pick)
        else:
            return e, swaps
    raise MoveError(f"no T-move site on twists {i}, {i + 1}")


def _swap_darts(F: FiberSurface, swaps) -> FiberSurface:
    rot = {v: list(es) for v, es in F.rotation.items()}
    for v, (e, d) in swaps.items():
        a, b = rot[v].index(e), rot[v].index(d)
        rot[v][a], rot[v][b] = rot[v][b], rot[v][a]
    return FiberSurface(F.degree, F.edges, rot, F.turns)


def _cyclic_normal(ring):
    if not ring:
        return ring
    k = ring.index(min(ring))
    return ring[k:] + ring[:k]


def _cancel_edge(P: LFPresentation, i: int, e: int):
    """Slide twist i+1 off edge e using twist i, then cancel e with twist i."""
    F = P.fiber
    za = chain_of(F, P.twists[i - 1].cls)
    zb = chain_of(F, P.twists[i].cls)
    sigma = za[e - 1] * zb[e - 1]  # both are +-1
    zb = [y - sigma * x for x, y in zip(za, zb)]
    rot = {v: _cyclic_normal(tuple(r for r in es if r != e)) for v, es in F.rotation.items()}
    chains = []
    for k, t in enumerate(P.twists, start=1):
        if k == i:
            continue
        z = zb if k == i + 1 else chain_of(F, t.cls)
        chains.append((tuple(x for r, x in enumerate(z, start=1) if r != e), t.sign))
    return tuple(sorted(rot.items())), tuple(chains)


def move_T(P: LFPresentation, i: int) -> LFPresentation:
    """Reattach the band carrying twists i, i+1 on the other side of their annulus.

    Both twists keep their signs.  The rewrite is accepted only if cancelling
    the band after sliding twist i+1 over twist i gives identical results on
    both sides.
    """
    e, swaps = t_move_site(P, i)
    F = P.fiber
    F2 = _swap_darts(F, swaps)
    tw = [transfer(F, F2, t) for t in P.twists]
    P2 = LFPresentation(F2, tuple(tw))
    if _cancel_edge(P, i, e) != _cancel_edge(P2, i, e):
        raise MoveError("T-move self-check failed")
    return P2


# ---------------------------------------------------------------- U: two holes


def move_U(P: LFPresentation, vertex: int = 1, index: int | None = None) -> LFPresentation:
    """Punch two holes near a corner of a vertex disk and add opposite boundary twists."""
    F = P.fiber
    if not 1 <= vertex <= F.degree:
        raise MoveError(f"vertex {vertex} out of range")
    w = F.degree + 1
    m = F.m
    e1, e2, e3 = m + 1, m + 2, m + 3
    edges = list(F.edges) + [(vertex, w)] * 3
    rot = {v: list(es) for v, es in F.rotation.items()}
    rot[vertex] += [e1, e2, e3]
    rot[w] = [e3, e2, e1]
    F2 = FiberSurface(w, edges, rot, tuple(F.turns) + (1, 1, 1))
    old = [transfer(F, F2, t) for t in P.twists]
    c_plus = Cycle(((e1, 1), (e2, -1)))
    c_minus = Cycle(((e2, 1), (e3, -1)))
    pair = [Twist.of_cycle(F2, c_plus, 1), Twist.of_cycle(F2, c_minus, -1)]
    index = len(old) + 1 if index is None else index
    if not 1 <= index <= len(old) + 1:
        raise MoveError(f"insertion index {index} out of range")
    return LFPresentation(F2, tuple(old[: index - 1] + pair + old[index - 1 :]))


def move_U_inverse(P: LFPresentation, index: int) -> LFPresentation:
    F = P.fiber
    w = F.degree
    ring = F.rotation[w]
    if len(ring) != 3 or index < 1 or index + 1 > P.n:
        raise MoveError("no U-move pattern at this site")
    e3, e2, e1 = ring
    v = F.edges[e1 - 1][0]
    if {e1, e2, e3} != {F.m - 2, F.m - 1, F.m} or F.rotation[v][-3:] != (e1, e2, e3):
        raise MoveError("no U-move pattern at this site")
    a, b = P.twists[index - 1], P.twists[index]
    if (a.cycle, b.cycle, a.sign, b.sign) != (Cycle(((e1, 1), (e2, -1))), Cycle(((e2, 1), (e3, -1))), 1, -1):
        raise MoveError("twists do not match the U-move pattern")
    rest = [t for k, t in enumerate(P.twists, start=1) if k not in (index, index + 1)]
    rot = {u: es for u, es in F.rotation.items() if u != w}
    rot[v] = F.rotation[v][:-3]
    F0 = FiberSurface(w - 1, F.edges[:-3], rot, F.turns[:-3])
    for t in rest:
        if t.cycle is None and any(chain_of(F, t.cls)[-3:]):
            raise MoveError("another twist runs over the holes")
    return LFPresentation(F0, tuple(transfer_down(F, F0, t) for t in rest))


def transfer_down(F: FiberSurface, F0: FiberSurface, t: Twist) -> Twist:
    z = chain_of(F, t.cls)[: F0.m]
    cls = tuple(int(x) for x in F0.class_of_chain(z))
    return Twist(cls, t.sign, F0.rotation_number(t.cycle) if t.cycle else t.rot, t.cycle)


# ---------------------------------------------------------------- Q: cancelling pair


def move_Q(P: LFPresentation, index: int, c, sign: int = 1) -> LFPresentation:
    """Insert twists (c, sign), (c, -sign) before position ``index``."""
    F = P.fiber
    t = c if isinstance(c, Twist) else Twist.of_cycle(F, c, sign)
    if not any(t.cls):
        raise MoveError("Q needs a homologically non-trivial cycle")
    if not 1 <= index <= P.n + 1:
        raise MoveError(f"insertion index {index} out of range")
    a = Twist(t.cls, sign, t.rot, t.cycle)
    b = Twist(t.cls, -sign, t.rot, t.cycle)
    tw = list(P.twists)
    tw[index - 1 : index - 1] = [a, b]
    return P.with_twists(tw)


def move_Q_inverse(P: LFPresentation, index: int) -> LFPresentation:
    if not 1 <= index < P.n:
        raise MoveError(f"index {index} out of range")
    a, b = P.twists[index - 1], P.twists[index]
    if a.cls != b.cls or a.sign != -b.sign or a.cycle != b.cycle:
        raise MoveError("twists do not form a cancelling pair")
    tw = list(P.twists)
    del tw[index - 1 : index + 1]
    return P.with_twists(tw)


# ---------------------------------------------------------------- P: blow-up payload

# Four sheets over two new covering indices v = d+1, w = d+2 and a chosen old
# index i.  The added fiber piece is a pair of pants; the three bands lift to
# its three boundary curves.  The first two twists are negative.
PAYLOAD_BANDS = (
    MonotonicBand(1, 4, -1, (1, 1)),
    MonotonicBand(2, 3, -1, ()),
    MonotonicBand(1, 4, 1, (-1, -1)),
)
PAYLOAD_CHI_DELTA = 1


def payload_labels(d: int, i: int) -> tuple[Permutation, ...]:
    v, w = d + 1, d + 2
    t = lambda a, b: Permutation.transposition(a, b, d + 2)
    return (t(i, v), t(v, w), t(v, w), t(i, v))


def payload_bands(variant: str) -> tuple[MonotonicBand, ...]:
    if variant not in "+-" or len(variant) != 1:
        raise MoveError(f"bad P variant {variant!r}")
    g, gm, gp = PAYLOAD_BANDS
    if variant == "+":
        g = MonotonicBand(g.j, g.k, -g.sign, g.pattern)
    return (g, gm, gp)


def move_P(L: LineDiagram, variant: str = "-", i: int = 1) -> LineDiagram:
    d = L.degree
    if not 1 <= i <= d:
        raise MoveError(f"index {i} out of range")
    labels = payload_labels(d, i) + tuple(t.extend(d + 2) for t in L.labels)
    arcs = L.arcs()
    for _ in range(4):
        arcs = [insert_puncture(a, 1) for a in arcs]
    bands = payload_bands(variant) + tuple(make_band(a, b.sign) for a, b in zip(arcs, L.bands))
    return LineDiagram(d + 2, labels, bands)


def move_P_inverse(L: LineDiagram) -> LineDiagram:
    d = L.degree - 2
    if d < 1 or L.m < 4 or L.n < 3:
        raise MoveError("no P payload on top")
    i = min(L.labels[0].support())
    variant = "-" if L.bands[0].sign == -1 else "+"
    if L.labels[:4] != payload_labels(d, i) or tuple(L.bands[:3]) != payload_bands(variant):
        raise MoveError("no P payload on top")
    rest_labels = L.labels[4:]
    if any(x > d for t in rest_labels for x in t.support()):
        raise MoveError("payload indices used by other sheets")
    arcs = [band_arc(b) for b in L.bands[3:]]
    if any(a.a <= 4 or a.linked() & {1, 2, 3, 4} for a in arcs):
        raise MoveError("other bands meet the payload")
    from .linediagram import delete_puncture

    for _ in range(4):
        arcs = [delete_puncture(a, 1) for a in arcs]
    labels = tuple(Permutation(t.images[:d]) for t in rest_labels)
    return LineDiagram(d, labels, tuple(make_band(a, b.sign) for a, b in zip(arcs, L.bands[3:])))


# ---------------------------------------------------------------- scripts

LD_MOVES = {"slide", "S", "Sinv", "cstab", "cdestab", "P", "Pinv"}
LF_MOVES = {"tslide", "T", "U", "Uinv", "Q", "Qinv"}


@dataclass(frozen=True)
class MoveStep:
    name: str
    params: tuple[tuple[str, Any], ...] = ()

    @classmethod
    def make(cls, name: str, **params) -> "MoveStep":
        if name not in LD_MOVES | LF_MOVES:
            raise MoveError(f"unknown move {name!r}")
        return cls(name, tuple(sorted(params.items())))

    def get(self, key, default=None):
        return dict(self.params).get(key, default)

    def __str__(self) -> str:
        ps = " ".join(f"{k}={_fmt(v)}" for k, v in self.params)
        return f"{self.name} {ps}".strip()


def _fmt(v) -> str:
    if isinstance(v, tuple):
        return "".join("t" if x == 1 else "f" for x in v) or "-"
    return str(v)


@dataclass
class MoveScript:
    steps: list[MoveStep] = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def then(self, step: MoveStep) -> "MoveScript":
        return MoveScript(self.steps + [step])

    def __str__(self) -> str:
        return "\n".join(str(s) for s in self.steps)

    def replay(self, start):
        states = [start]
        for step in self.steps:
            states.append(apply_step(states[-1], step))
        return states


def _parse_value(key: str, text: str):
    if key == "pattern":
        if text == "-":
            return ()
        if set(text) - {"t", "f"}:
            raise MoveError(f"pattern letters must be t or f, got {text!r}")
        return tuple(1 if ch == "t" else -1 for ch in text)
    try:
        return int(text)
    except ValueError:
        return text


def parse_step(text: str) -> MoveStep:
    """Inverse of ``str(MoveStep)``: ``name key=value ...``."""
    parts = text.split()
    if not parts:
        raise MoveError("empty move line")
    params = {}
    for tok in parts[1:]:
        key, eq, val = tok.partition("=")
        if not eq or not key:
            raise MoveError(f"bad parameter {tok!r}")
        params[key] = _parse_value(key, val)
    return MoveStep.make(parts[0], **params)


def parse_script(text: str) -> MoveScript:
    lines = [ln.strip() for ln in text.splitlines()]
    return MoveScript([parse_step(ln) for ln in lines if ln and not ln.startswith("#")])


State = Union[LineDiagram, LFPresentation]


def as_presentation(x: State) -> LFPresentation:
    return lf_from_linediagram(x) if isinstance(x, LineDiagram) else x


def apply_step(state: State, step: MoveStep) -> State:
    g = step.get
    n = step.name
    if n in LD_MOVES:
        if not isinstance(state, LineDiagram):
            raise MoveError(f"move {n} needs a line diagram")
        try:
            if n == "slide":
                return slide(state, g("i"), g("dir", "right"))
            if n == "S":
                return braid_stabilize(state, g("sheet"), g("sign", 1), g("q"), g("pattern"), g("index"))
            if n == "Sinv":
                return move_S_inverse(state, g("band"), g("sheet"))
            if n == "cstab":
                return cover_stabilize(state, g("i", 1))
            if n == "cdestab":
                return cover_destabilize(state)
            if n == "P":
                return move_P(state, g("variant", "-"), g("i", 1))
            if n == "Pinv":
                return move_P_inverse(state)
        except (DiagramError, BraidError) as exc:
            raise MoveError(f"{step}: {exc}") from None
    P = as_presentation(state)
    if n == "tslide":
        return twist_slide(P, g("i"), g("dir", "right"))
    if n == "T":
        return move_T(P, g("i"))
    if n == "U":
        return move_U(P, g("vertex", 1), g("index"))
    if n == "Uinv":
        return move_U_inverse(P, g("index"))
    if n == "Q":
        k = g("twist")
        return move_Q(P, g("index"), P.twists[k - 1], g("sign", 1))
    if n == "Qinv":
        return move_Q_inverse(P, g("index"))
    raise MoveError(f"unknown move {n!r}")


def inverse_step(before: LineDiagram, step: MoveStep) -> MoveStep:
    """Line-diagram move undoing ``step`` when applied after it."""
    g = step.get
    n = step.name
    if n == "slide":
        return MoveStep.make("slide", i=g("i"), dir="left" if g("dir", "right") == "right" else "right")
    if n == "S":
        q = g("q") or g("sheet") + 1
        index = g("index") or before.n + 1
        return MoveStep.make("Sinv", band=index, sheet=q)
    if n == "Sinv":
        b = before.bands[g("band") - 1]
        arc = band_arc(b)
        sheet = g("sheet") or arc.b
        if not isinstance(b, MonotonicBand):
            raise MoveError("only cancellations of monotonic bands are invertible here")
        if sheet == arc.b:
            return MoveStep.make("S", sheet=b.j, sign=b.sign, q=b.k, pattern=b.pattern, index=g("band"))
        return MoveStep.make("S", sheet=b.k - 1, sign=b.sign, q=b.j, pattern=b.pattern, index=g("band"))
    if n == "cstab":
        return MoveStep.make("cdestab")
    if n == "cdestab":
        last = before.labels[-1]
        if before.degree not in last.support():
            raise MoveError("only a last-sheet covering destabilization is invertible here")
        return MoveStep.make("cstab", i=min(last.support()))
    if n == "P":
        return MoveStep.make("Pinv")
    if n == "Pinv":
        i = min(before.labels[0].support())
        return MoveStep.make("P", variant="-" if before.bands[0].sign == -1 else "+", i=i)
    raise MoveError(f"no line-diagram inverse for {n}")


# ---------------------------------------------------------------- boundary open book


def openbook(P: State) -> OpenBook:
    return boundary_openbook(as_presentation(P))
