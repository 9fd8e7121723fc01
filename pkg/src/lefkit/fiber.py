"""Regular fiber of the fibration as a ribbon graph, with its homological calculus.

Vertices are the sheets of the covering and edge r joins the two sheets
swapped by the r-th label.  The fiber is drawn with every sheet as a
horizontal bar and every edge as a U-shaped strip hanging below the bars,
attached at horizontal position r.  Hence at each vertex the incident edge
ends appear counterclockwise in increasing position.  The tail of edge r is
its smaller sheet, and along the strip the tail end sits slightly left of
the head end.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .arcs import Arc, monotonic_arc
from .braidcore import BraidError, MonotonicBand, Permutation

Step = tuple[int, int]  # (edge, +1 tail->head | -1 head->tail)


def imat(rows) -> np.ndarray:
    """Exact integer matrix (object dtype, so products never overflow)."""
    a = np.array(rows, dtype=object)
    return a


def identity_matrix(r: int) -> np.ndarray:
    out = np.zeros((r, r), dtype=object)
    for i in range(r):
        out[i, i] = 1
    return out


def reduce_walk(steps) -> tuple[Step, ...]:
    """Cancel backtracks, including across the cyclic seam."""
    out: list[Step] = []
    for e, s in steps:
        if out and out[-1] == (e, -s):
            out.pop()
        else:
            out.append((e, s))
    while len(out) >= 2 and out[0] == (out[-1][0], -out[-1][1]):
        out = out[1:-1]
    return tuple(out)


@dataclass(frozen=True)
class Cycle:
    steps: tuple[Step, ...]

    def reverse(self) -> "Cycle":
        return Cycle(tuple((e, -s) for e, s in reversed(self.steps)))

    def chain(self, m: int) -> list[int]:
        v = [0] * m
        for e, s in self.steps:
            v[e - 1] += s
        return v

    def __len__(self):
        return len(self.steps)


class FiberSurface:
    """Ribbon graph with a bar-and-strip drawing.

    ``rotation[v]`` lists the edges at v in left-to-right order along its bar,
    which is also their counterclockwise cyclic order.  ``turns[r]`` is +1 if
    the strip of edge r turns counterclockwise when run from tail to head.
    """

    def __init__(self, degree: int, edges, rotation=None, turns=None, labels=None):
        self.degree = degree
        self.edges: tuple[tuple[int, int], ...] = tuple(tuple(e) for e in edges)
        self.m = len(self.edges)
        self.labels = tuple(labels) if labels is not None else None
        if rotation is None:
            rot: dict[int, list[int]] = {v: [] for v in range(1, degree + 1)}
            for r, (a, b) in enumerate(self.edges, start=1):
                rot[a].append(r)
                rot[b].append(r)
            rotation = rot
        self.rotation = {v: tuple(rotation.get(v, ())) for v in range(1, degree + 1)}
        for r, (a, b) in enumerate(self.edges, start=1):
            if a == b or r not in self.rotation[a] or r not in self.rotation[b]:
                raise BraidError(f"edge {r} is not attached at its ends")
        if sum(len(es) for es in self.rotation.values()) != 2 * self.m:
            raise BraidError("rotation system lists stray edge ends")
        self.turns = tuple(turns) if turns is not None else (1,) * self.m
        self._pos = {(v, r): i for v, es in self.rotation.items() for i, r in enumerate(es)}
        self._spanning_tree()
        self.basis = [self._fundamental_cycle(e) for e in self.cotree]
        self.J = imat([[self.intersection(x, y) for y in self.basis] for x in self.basis]).reshape(
            len(self.basis), len(self.basis)
        )

    @classmethod
    def from_labels(cls, degree: int, labels) -> "FiberSurface":
        edges = []
        for t in labels:
            if t.degree != degree or not t.is_transposition():
                raise BraidError(f"bad label {t}")
            edges.append(t.support())
        return cls(degree, edges, labels=labels)

    def key(self):
        return (self.degree, self.edges, tuple(sorted(self.rotation.items())), self.turns)

    def __eq__(self, other):
        return isinstance(other, FiberSurface) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    # -- structure

    def _spanning_tree(self):
        parent: dict[int, tuple[int, int] | None] = {}
        tree = set()
        comps = 0
        for root in range(1, self.degree + 1):
            if root in parent:
                continue
            comps += 1
            parent[root] = None
            q = deque([root])
            while q:
                v = q.popleft()
                for r in self.rotation[v]:
                    a, b = self.edges[r - 1]
                    w = b if v == a else a
                    if w not in parent:
                        parent[w] = (r, v)
                        tree.add(r)
                        q.append(w)
        self.parent = parent
        self.tree = frozenset(tree)
        self.components = comps
        self.cotree = tuple(r for r in range(1, self.m + 1) if r not in tree)

    def _root_path(self, v: int) -> list[Step]:
        """Steps from v up to the root of its tree."""
        out = []
        while self.parent[v] is not None:
            r, p = self.parent[v]
            out.append((r, 1 if self.edges[r - 1][0] == v else -1))
            v = p
        return out

    def _fundamental_cycle(self, r: int) -> Cycle:
        a, b = self.edges[r - 1]
        # r: a -> b, then b -> root, then root -> a
        steps = [(r, 1)] + self._root_path(b) + [(e, -s) for e, s in reversed(self._root_path(a))]
        return Cycle(reduce_walk(steps))

    @property
    def euler_char(self) -> int:
        return self.degree - self.m

    def faces(self) -> list[list[tuple[int, int]]]:
        """Boundary walks as lists of darts (vertex, edge)."""
        seen = set()
        out = []
        for v, es in self.rotation.items():
            for r in es:
                if (v, r) in seen:
                    continue
                face = []
                cur = (v, r)
                while cur not in seen:
                    seen.add(cur)
                    face.append(cur)
                    w, e = cur
                    a, b = self.edges[e - 1]
                    u = b if w == a else a
                    ring = self.rotation[u]
                    cur = (u, ring[(self._pos[(u, e)] + 1) % len(ring)])
                out.append(face)
        # isolated vertices are disks with one boundary circle each
        for v, es in self.rotation.items():
            if not es:
                out.append([])
        return out

    @property
    def num_boundary(self) -> int:
        return len(self.faces())

    @property
    def genus(self) -> int:
        twice = 2 * self.components - self.euler_char - self.num_boundary
        return twice // 2

    @property
    def rank(self) -> int:
        return len(self.basis)

    # -- cycles

    def walk_vertices(self, c: Cycle) -> list[int]:
        """Vertices visited; entry i is where step i starts."""
        out = []
        for e, s in c.steps:
            a, b = self.edges[e - 1]
            out.append(a if s == 1 else b)
        return out

    def check_closed(self, c: Cycle) -> None:
        vs = self.walk_vertices(c)
        for i, (e, s) in enumerate(c.steps):
            a, b = self.edges[e - 1]
            end = b if s == 1 else a
            if end != vs[(i + 1) % len(vs)]:
                raise BraidError("edge path does not close up")

    def coords(self, c: Cycle) -> np.ndarray:
        z = c.chain(self.m)
        return imat([z[r - 1] for r in self.cotree]).reshape(len(self.cotree))

    def class_of_chain(self, z) -> np.ndarray:
        return imat([z[r - 1] for r in self.cotree]).reshape(len(self.cotree))

    def passages(self, c: Cycle) -> list[tuple[int, int, int]]:
        """(vertex, incoming edge, outgoing edge) for each vertex visit."""
        out = []
        k = len(c.steps)
        for i in range(k):
            e_in, s_in = c.steps[i]
            e_out, _ = c.steps[(i + 1) % k]
            a, b = self.edges[e_in - 1]
            out.append((b if s_in == 1 else a, e_in, e_out))
        return out

    def intersection(self, x: Cycle, y: Cycle) -> int:
        """Algebraic intersection number, with y pushed to the right of itself."""
        total = 0
        px = self.passages(x)
        py = self.passages(y)
        for v, xa, xb in px:
            deg = len(self.rotation[v])
            a, b = self._pos[(v, xa)], self._pos[(v, xb)]
            span = (b - a) % deg
            for w, ya, yb in py:
                if w != v:
                    continue
                p = (self._pos[(v, ya)] - a) % deg
                q = (self._pos[(v, yb)] - a) % deg
                total += int(p < span) - int(0 < q <= span)
        return total

    def pairing(self, x, y) -> int:
        """Intersection pairing on coordinate vectors."""
        return int(np.dot(np.dot(x, self.J), y))

    def rotation_number(self, c: Cycle) -> int:
        """Tangent winding of the canonical realization in the bar-and-strip drawing."""
        if not c.steps:
            return 1
        quarters = 0
        for e, s in c.steps:
            quarters += 2 * s * self.turns[e - 1]
        for v, e_in, e_out in self.passages(c):
            v_pos = self._pos
            quarters += -2 if v_pos[(v, e_out)] > v_pos[(v, e_in)] else 2
        return quarters // 4

    def twist_matrix(self, c, sign: int) -> np.ndarray:
        """Homological Dehn twist x -> x + sign <x, c> c on the basis."""
        v = self.coords(c) if isinstance(c, Cycle) else np.asarray(c, dtype=object)
        Jc = np.dot(self.J, v)
        M = identity_matrix(self.rank)
        for i in range(self.rank):
            for k in range(self.rank):
                M[i, k] += sign * v[i] * Jc[k]
        return M

    # -- lifting

    def lift_arc(self, band) -> Cycle:
        arc = band if isinstance(band, Arc) else monotonic_arc(band) if isinstance(band, MonotonicBand) else band.arc
        return lift(self, arc)

    def dump(self) -> str:
        lines = [f"fiber degree {self.degree} edges {self.m}"]
        for r, (a, b) in enumerate(self.edges, start=1):
            lines.append(f"edge {r} {a} {b}")
        for v, es in self.rotation.items():
            lines.append(f"vertex {v} rotation {' '.join(map(str, es))}")
        for f in self.faces():
            lines.append("face " + " ".join(f"{v}:{r}" for v, r in f))
        lines.append(f"chi {self.euler_char} boundary {self.num_boundary} genus {self.genus}")
        return "\n".join(lines)


def build_fiber(degree: int, labels) -> FiberSurface:
    return FiberSurface.from_labels(degree, labels)


def _walk(F: FiberSurface, u, start: int) -> tuple[list[Step], int]:
    s = start
    steps = []
    for h, _ in u:
        a, b = F.edges[h - 1]
        if s == a:
            steps.append((h, 1))
            s = b
        elif s == b:
            steps.append((h, -1))
            s = a
    return steps, s


def lift(F: FiberSurface, arc: Arc) -> Cycle:
    """Closed lift of a band core; the sheet transport must close up."""
    ta = F.labels[arc.a - 1]
    u0 = min(ta.support())
    go, U = _walk(F, arc.u, u0)
    tb = F.labels[arc.b - 1]
    if U not in tb.support():
        raise BraidError(f"lift of arc {arc} does not reach the branch point of sheet {arc.b}")
    V = tb(U)
    back_u = tuple((h, -e) for h, e in reversed(arc.u))
    ret, W = _walk(F, back_u, V)
    if W != ta(u0):
        raise BraidError(f"lift of arc {arc} does not close")
    step_b = (arc.b, 1 if F.edges[arc.b - 1][0] == U else -1)
    step_a = (arc.a, 1 if F.edges[arc.a - 1][0] == W else -1)
    c = Cycle(reduce_walk(go + [step_b] + ret + [step_a]))
    F.check_closed(c) if c.steps else None
    return c


@dataclass(frozen=True)
class Twist:
    """One signed vanishing cycle.

    ``cls`` is the homology class on the fiber basis and ``rot`` the rotation
    number of an embedded representative.  ``cycle`` is an explicit edge path
    when one is known; homological moves may drop it.
    """

    cls: tuple[int, ...]
    sign: int
    rot: int
    cycle: Cycle | None = None

    @classmethod
    def of_cycle(cls, F: FiberSurface, c: Cycle, sign: int) -> "Twist":
        return cls(tuple(int(x) for x in F.coords(c)), sign, F.rotation_number(c), c)

    def vector(self) -> np.ndarray:
        return imat(list(self.cls)).reshape(len(self.cls))

    def reverse(self) -> "Twist":
        return Twist(tuple(-x for x in self.cls), self.sign, -self.rot, self.cycle.reverse() if self.cycle else None)


@dataclass(frozen=True)
class LFPresentation:
    """Fiber with an ordered monodromy sequence of signed vanishing cycles."""

    fiber: FiberSurface
    twists: tuple[Twist, ...] = ()

    @property
    def n(self) -> int:
        return len(self.twists)

    @property
    def signs(self) -> list[int]:
        return [t.sign for t in self.twists]

    @property
    def classes(self) -> list[np.ndarray]:
        return [t.vector() for t in self.twists]

    @property
    def vanishing_cycles(self) -> list[tuple[Cycle | None, int]]:
        return [(t.cycle, t.sign) for t in self.twists]

    def rotations(self) -> list[int]:
        return [t.rot for t in self.twists]

    @property
    def allowable(self) -> bool:
        return all(any(x != 0 for x in t.cls) for t in self.twists)

    def cycle_matrix(self) -> np.ndarray:
        """Columns are the vanishing classes."""
        r = self.fiber.rank
        out = np.zeros((r, self.n), dtype=object)
        for k, t in enumerate(self.twists):
            for i in range(r):
                out[i, k] = t.cls[i]
        return out

    def with_twists(self, twists) -> "LFPresentation":
        return LFPresentation(self.fiber, tuple(twists))


def presentation(F: FiberSurface, cycles) -> LFPresentation:
    return LFPresentation(F, tuple(Twist.of_cycle(F, c, s) for c, s in cycles))


def lf_from_linediagram(L) -> LFPresentation:
    from .linediagram import band_arc, check_labels

    if not check_labels(L):
        raise BraidError("label inconsistency")
    F = build_fiber(L.degree, L.labels)
    return presentation(F, [(lift(F, band_arc(b)), b.sign) for b in L.bands])
