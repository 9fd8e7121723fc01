"""Labeled rectangular diagrams of flat ribbon surfaces on an integer grid.

Coordinates are ``(x, y)`` with x growing to the right and y growing
downward, so rows are read top to bottom.  Every occupied cell holds one
local configuration, a kind and a number of counterclockwise quarter turns.
A configuration is a list of strands; each strand joins some of the four
sides N, E, S, W of the cell.  Base forms (no rotation):

    a  straight band                    W-E
    b  corner                           N-E
    c  band end                         W
    d  junction, band hanging below     W-E-S
    e  crossing, N-S band in front      W-E | N-S
    f  N-S band passing through W-E     W-E | N | S
    g  arrival from above, + curl       W-E-N
    h  arrival from above, - curl       W-E-N

``g`` and ``h`` are contractions of a corner and the interior of a
horizontal band: a vertical band ending with a half-curl in the middle of a
horizontal band, counterclockwise for ``g``.

Labels live on regions, the connected pieces of the surface after cutting
vertical bands where they pass through horizontal ones.  Region ids are
1, 2, ... in order of first appearance, scanning rows top to bottom, cells
left to right, and strands in the order listed above.  A horizontal band
keeps one label along its length; the piece of a vertical band below a
pass-through is the piece above conjugated by the horizontal label.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .braidcore import Permutation
from .linediagram import LineDiagram

PORTS = ("N", "E", "S", "W")
STEP = {"N": (0, -1), "E": (1, 0), "S": (0, 1), "W": (-1, 0)}
OPPOSITE = {"N": "S", "S": "N", "E": "W", "W": "E"}
_CCW = {"N": "W", "W": "S", "S": "E", "E": "N"}

BASE = {
    "a": (("W", "E"),),
    "b": (("N", "E"),),
    "c": (("W",),),
    "d": (("W", "E", "S"),),
    "e": (("W", "E"), ("N", "S")),
    "f": (("W", "E"), ("N",), ("S",)),
    "g": (("W", "E", "N"),),
    "h": (("W", "E", "N"),),
}

# rotations that give distinct pictures (the rounded-corner rule)
ALLOWED = {"a": {0, 1}, "b": {0, 1, 2, 3}, "c": {0, 1, 2, 3}, "d": {0, 1, 2, 3}, "e": {0, 1}, "f": {0, 1}, "g": {0, 2}, "h": {0, 2}}
RESTRICTED = {"a": {0, 1}, "b": {0, 1, 2, 3}, "c": {0, 2}, "d": {0}, "e": {0}, "f": {0}, "g": {0}, "h": {0}}

RECT_MOVES = {f"r{i}" for i in range(1, 32)} | {"k1", "k1inv", "k2", "k2inv", "stab", "destab"}
TRANSCRIBED = {"r1", "k1", "k1inv", "k2", "k2inv", "stab", "destab"}


class RectError(ValueError):
    pass


class NotTranscribed(RectError):
    pass


class RectSyntaxError(RectError):
    def __init__(self, line: int, col: int, msg: str):
        super().__init__(f"line {line}, col {col}: {msg}")
        self.line, self.col, self.msg = line, col, msg


def _rot_port(p: str, r: int) -> str:
    for _ in range(r % 4):
        p = _CCW[p]
    return p


@dataclass(frozen=True)
class LocalConfig:
    kind: str
    rotation: int = 0

    def __post_init__(self):
        if self.kind not in BASE:
            raise RectError(f"unknown cell kind {self.kind!r}")
        object.__setattr__(self, "rotation", self.rotation % 4)

    @property
    def strands(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(_rot_port(p, self.rotation) for p in g) for g in BASE[self.kind])

    @property
    def ports(self) -> frozenset:
        return frozenset().union(*self.strands)

    def strand_of(self, port: str) -> int | None:
        for i, s in enumerate(self.strands):
            if port in s:
                return i
        return None

    @property
    def restricted(self) -> bool:
        return self.rotation in RESTRICTED[self.kind]

    def __str__(self) -> str:
        return f"{self.kind} {self.rotation}"


Node = tuple[int, int, int]


class RectDiagram:
    """Cells on the grid, region labels and the covering degree."""

    def __init__(self, degree: int, cells: dict, labels: dict | None = None):
        self.degree = degree
        self.cells: dict[tuple[int, int], LocalConfig] = dict(cells)
        self._regions: dict[Node, int] | None = None
        self.labels: dict[int, Permutation] = dict(labels or {})

    # ---- structure

    def ports(self, x: int, y: int) -> frozenset:
        c = self.cells.get((x, y))
        return c.ports if c else frozenset()

    def nodes(self) -> list[Node]:
        out = []
        for (x, y), c in self.cells.items():
            out.extend((x, y, i) for i in range(len(c.strands)))
        return sorted(out, key=lambda n: (n[1], n[0], n[2]))

    def neighbors(self, n: Node) -> list[Node]:
        x, y, i = n
        out = []
        for p in self.cells[(x, y)].strands[i]:
            dx, dy = STEP[p]
            other = self.cells.get((x + dx, y + dy))
            if other is None:
                continue
            j = other.strand_of(OPPOSITE[p])
            if j is not None:
                out.append((x + dx, y + dy, j))
        return out

    @property
    def regions(self) -> dict[Node, int]:
        if self._regions is None:
            reg: dict[Node, int] = {}
            nxt = 1
            for n in self.nodes():
                if n in reg:
                    continue
                reg[n] = nxt
                queue = deque([n])
                while queue:
                    u = queue.popleft()
                    for v in self.neighbors(u):
                        if v not in reg:
                            reg[v] = nxt
                            queue.append(v)
                nxt += 1
            self._regions = reg
        return self._regions

    @property
    def num_regions(self) -> int:
        return max(self.regions.values(), default=0)

    def label_at(self, x: int, y: int, strand: int = 0) -> Permutation | None:
        return self.labels.get(self.regions.get((x, y, strand)))

    def bbox(self) -> tuple[int, int, int, int]:
        xs = [x for x, _ in self.cells]
        ys = [y for _, y in self.cells]
        return min(xs), min(ys), max(xs), max(ys)

    def horizontal_runs(self) -> list[list[tuple[int, int]]]:
        return _runs(self, "E", "W")

    def vertical_runs(self) -> list[list[tuple[int, int]]]:
        return _runs(self, "S", "N")

    # ---- comparison and text

    def key(self):
        return (self.degree, tuple(sorted((k, str(v)) for k, v in self.cells.items())), tuple(sorted((k, str(v)) for k, v in self.labels.items())))

    def __eq__(self, other):
        return isinstance(other, RectDiagram) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __str__(self) -> str:
        return serialize_rect(self)

    def __repr__(self) -> str:
        return f"RectDiagram(degree={self.degree}, cells={len(self.cells)}, regions={self.num_regions})"


def _runs(D: RectDiagram, fwd: str, back: str) -> list[list[tuple[int, int]]]:
    """Maximal chains of cells joined through the given pair of sides."""
    seen = set()
    out = []
    dx, dy = STEP[fwd]
    for (x, y) in sorted(D.cells, key=lambda k: (k[1], k[0])):
        if (x, y) in seen:
            continue
        ps = D.ports(x, y)
        if fwd not in ps and back not in ps:
            continue
        # walk back to the start of the run
        sx, sy = x, y
        while back in D.ports(sx, sy) and fwd in D.ports(sx - dx, sy - dy):
            sx, sy = sx - dx, sy - dy
        run = [(sx, sy)]
        while fwd in D.ports(*run[-1]) and back in D.ports(run[-1][0] + dx, run[-1][1] + dy):
            run.append((run[-1][0] + dx, run[-1][1] + dy))
        seen.update(run)
        out.append(run)
    return out


# ---------------------------------------------------------------- labels


def _conj(a: Permutation, b: Permutation) -> Permutation:
    return a.conj(b)


def propagate_labels(D: RectDiagram, labels: dict[int, Permutation]) -> dict[int, Permutation]:
    """Fill in region labels forced by pass-throughs, as far as possible."""
    reg = D.regions
    out = dict(labels)
    rels = []
    for (x, y), c in D.cells.items():
        if c.kind == "f":
            rels.append((reg[(x, y, 1)], reg[(x, y, 2)], reg[(x, y, 0)]))
    changed = True
    while changed:
        changed = False
        for p, q, host in rels:
            if host not in out:
                continue
            if p in out and q not in out:
                out[q] = _conj(out[p], out[host])
                changed = True
            elif q in out and p not in out:
                out[p] = _conj(out[q], out[host])
                changed = True
    return out


def remap_labels(old: RectDiagram, new: RectDiagram, node_map: Callable[[Node], Node | None]) -> dict[int, Permutation]:
    """Labels of ``new`` carried from ``old`` along a partial node map."""
    out: dict[int, Permutation] = {}
    reg_new = new.regions
    for n, rid in old.regions.items():
        m = node_map(n)
        if m is None or m not in reg_new or rid not in old.labels:
            continue
        t = old.labels[rid]
        r2 = reg_new[m]
        if r2 in out and out[r2] != t:
            raise RectError(f"regions with labels {out[r2]} and {t} merged")
        out[r2] = t
    out = propagate_labels(new, out)
    missing = [r for r in range(1, new.num_regions + 1) if r not in out]
    if missing:
        raise RectError(f"cannot determine labels of regions {missing}")
    return out


# ---------------------------------------------------------------- validation


@dataclass(frozen=True)
class Issue:
    kind: str
    site: tuple[int, int] | None
    message: str

    def __str__(self) -> str:
        where = f" at {self.site}" if self.site is not None else ""
        return f"{self.kind}{where}: {self.message}"


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def of_kind(self, kind: str) -> list[Issue]:
        return [i for i in self.issues if i.kind == kind]

    def __str__(self) -> str:
        return "valid\n" if self.ok else "".join(f"{i}\n" for i in self.issues)


def validate(D: RectDiagram) -> ValidationReport:
    rep = ValidationReport()
    add = lambda k, s, m: rep.issues.append(Issue(k, s, m))
    for (x, y), c in sorted(D.cells.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        if c.rotation not in ALLOWED[c.kind]:
            add("rotation", (x, y), f"{c.kind} may not be turned {c.rotation} quarter turns")
        for p in sorted(c.ports):
            dx, dy = STEP[p]
            if OPPOSITE[p] not in D.ports(x + dx, y + dy):
                add("continuity", (x, y), f"band leaves through {p} into nothing")
    for name, runs, axis in (("ordinate", D.horizontal_runs(), 1), ("abscissa", D.vertical_runs(), 0)):
        by_line: dict[int, int] = {}
        for run in runs:
            line = run[0][axis]
            if line in by_line:
                add(name, run[0], f"two bands share {name} {line}")
            by_line[line] = 1
    for rid in range(1, D.num_regions + 1):
        t = D.labels.get(rid)
        if t is None:
            add("label", None, f"region {rid} has no label")
        elif t.degree != D.degree or not t.is_transposition():
            add("label", None, f"region {rid} label {t} is not a transposition in degree {D.degree}")
    extra = sorted(set(D.labels) - set(range(1, D.num_regions + 1)))
    if extra:
        add("label", None, f"labels for unknown regions {extra}")
    reg = D.regions
    for (x, y), c in sorted(D.cells.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        if c.kind != "f":
            continue
        a, b, host = (D.labels.get(reg[(x, y, i)]) for i in (1, 2, 0))
        if a is not None and b is not None and host is not None and b != _conj(a, host):
            add("wirtinger", (x, y), f"label {b} should be {a} conjugated by {host}")
    return rep


def require_valid(D: RectDiagram) -> None:
    rep = validate(D)
    if not rep.ok:
        raise RectError("invalid rectangular diagram: " + "; ".join(map(str, rep.issues)))


def is_restricted(D: RectDiagram) -> bool:
    return all(c.restricted for c in D.cells.values())


# ---------------------------------------------------------------- grid surgery


def _shift(D: RectDiagram, fx: Callable[[int], int], fy: Callable[[int], int]) -> dict:
    return {(fx(x), fy(y)): c for (x, y), c in D.cells.items()}


def insert_column(D: RectDiagram, x0: int) -> tuple[RectDiagram, Callable]:
    """Open an empty column at x0, stretching horizontal bands across it."""
    fx = lambda x: x + 1 if x >= x0 else x
    cells = _shift(D, fx, lambda y: y)
    for (x, y), c in D.cells.items():
        if x == x0 - 1 and "E" in c.ports:
            cells[(x0, y)] = LocalConfig("a", 0)
    new = RectDiagram(D.degree, cells)
    nm = lambda n: (fx(n[0]), n[1], n[2])
    new.labels = remap_labels(D, new, nm)
    return new, nm


def insert_row(D: RectDiagram, y0: int) -> tuple[RectDiagram, Callable]:
    fy = lambda y: y + 1 if y >= y0 else y
    cells = _shift(D, lambda x: x, fy)
    for (x, y), c in D.cells.items():
        if y == y0 - 1 and "S" in c.ports:
            cells[(x, y0)] = LocalConfig("a", 1)
    new = RectDiagram(D.degree, cells)
    nm = lambda n: (n[0], fy(n[1]), n[2])
    new.labels = remap_labels(D, new, nm)
    return new, nm


def _rebuild(D: RectDiagram, cells: dict, node_map, degree: int | None = None) -> RectDiagram:
    new = RectDiagram(D.degree if degree is None else degree, cells)
    new.labels = remap_labels(D, new, node_map)
    return new


def translate(D: RectDiagram, dx: int, dy: int) -> RectDiagram:
    return RectDiagram(D.degree, _shift(D, lambda x: x + dx, lambda y: y + dy), dict(D.labels))


# ---------------------------------------------------------------- restricted form


def to_restricted(D: RectDiagram) -> RectDiagram:
    """Replace configurations outside the restricted set, top to bottom, left to right.

    Free ends of vertical bands are bent into new short horizontal bands.
    Other configurations have no replacement here and raise RectError.
    """
    require_valid(D)
    while True:
        bad = sorted((k for k, c in D.cells.items() if not c.restricted), key=lambda k: (k[1], k[0]))
        if not bad:
            return D
        x, y = bad[0]
        c = D.cells[(x, y)]
        if c.kind == "c" and c.rotation == 1:
            # band hangs from a free end: make a short band ending it on the left side
            D, _ = insert_row(D, y)
            D, _ = insert_column(D, x + 1)
            cells = dict(D.cells)
            cells[(x, y)] = LocalConfig("b", 3)
            cells[(x + 1, y)] = LocalConfig("c", 0)
            cells[(x, y + 1)] = LocalConfig("a", 1)
            keep = lambda n: n if n[:2] != (x, y) else None
            D = _rebuild(D, cells, keep)
        elif c.kind == "c" and c.rotation == 3:
            # band ends freely at the bottom: bend it into a short band on the left
            D, _ = insert_row(D, y + 1)
            D, _ = insert_column(D, x)
            cells = dict(D.cells)
            # the old end now sits at (x + 1, y)
            cells[(x + 1, y)] = LocalConfig("a", 1)
            cells[(x + 1, y + 1)] = LocalConfig("b", 1)
            cells[(x, y + 1)] = LocalConfig("c", 2)
            keep = lambda n: n if n[:2] != (x + 1, y) else None
            D = _rebuild(D, cells, keep)
        else:
            raise RectError(f"no restricted replacement for configuration {c} at {(x, y)}")


def count_handles(D: RectDiagram) -> tuple[int, int]:
    """(disks, bands) of the restricted form: horizontal and vertical bands."""
    R = to_restricted(D)
    return len(R.horizontal_runs()), len(R.vertical_runs())


def handle_euler(D: RectDiagram) -> int:
    disks, bands = count_handles(D)
    return D.degree - disks + bands


# ---------------------------------------------------------------- moves


@dataclass(frozen=True)
class MoveInstance:
    move_id: str
    site: tuple[int, ...] = ()
    params: tuple[tuple[str, object], ...] = ()

    @classmethod
    def make(cls, move_id: str, *site: int, **params) -> "MoveInstance":
        if move_id not in RECT_MOVES:
            raise RectError(f"unknown rectangular move {move_id!r}")
        return cls(move_id, tuple(site), tuple(sorted(params.items())))

    def get(self, key, default=None):
        return dict(self.params).get(key, default)


def _swappable_rows(D: RectDiagram, y: int) -> bool:
    a = {x: c for (x, yy), c in D.cells.items() if yy == y}
    b = {x: c for (x, yy), c in D.cells.items() if yy == y + 1}
    for x in set(a) | set(b):
        pa = a[x].ports if x in a else frozenset()
        pb = b[x].ports if x in b else frozenset()
        if ("N" in pa) != ("N" in pb) or ("S" in pa) != ("S" in pb):
            return False
        if "S" in pa and not ({"N", "S"} <= pa and {"N", "S"} <= pb):
            return False
    span = lambda row: [x for x, c in row.items() if c.ports & {"E", "W"}]
    sa, sb = span(a), span(b)
    if sa and sb and not (max(sa) < min(sb) or max(sb) < min(sa)):
        return False
    return True


def swap_rows(D: RectDiagram, y: int) -> RectDiagram:
    if not _swappable_rows(D, y):
        raise RectError(f"rows {y} and {y + 1} cannot be switched")
    fy = lambda v: y + 1 if v == y else y if v == y + 1 else v
    cells = _shift(D, lambda x: x, fy)
    return _rebuild(D, cells, lambda n: (n[0], fy(n[1]), n[2]))


def _swappable_cols(D: RectDiagram, x: int) -> bool:
    a = {y: c for (xx, y), c in D.cells.items() if xx == x}
    b = {y: c for (xx, y), c in D.cells.items() if xx == x + 1}
    for y in set(a) | set(b):
        pa = a[y].ports if y in a else frozenset()
        pb = b[y].ports if y in b else frozenset()
        if ("W" in pa) != ("W" in pb) or ("E" in pa) != ("E" in pb):
            return False
        if "E" in pa and not ({"W", "E"} <= pa and {"W", "E"} <= pb):
            return False
    span = lambda col: [y for y, c in col.items() if c.ports & {"N", "S"}]
    sa, sb = span(a), span(b)
    if sa and sb and not (max(sa) < min(sb) or max(sb) < min(sa)):
        return False
    return True


def swap_cols(D: RectDiagram, x: int) -> RectDiagram:
    if not _swappable_cols(D, x):
        raise RectError(f"columns {x} and {x + 1} cannot be switched")
    fx = lambda v: x + 1 if v == x else x if v == x + 1 else v
    cells = _shift(D, fx, lambda y: y)
    return _rebuild(D, cells, lambda n: (fx(n[0]), n[1], n[2]))


def rect_stabilize(D: RectDiagram, i: int = 1) -> RectDiagram:
    d = D.degree + 1
    if not 1 <= i < d:
        raise RectError(f"stabilization index {i} out of range")
    x0, _, _, y1 = D.bbox() if D.cells else (0, 0, 0, -1)
    cells = dict(D.cells)
    cells[(x0, y1 + 1)] = LocalConfig("c", 2)
    cells[(x0 + 1, y1 + 1)] = LocalConfig("c", 0)
    new = RectDiagram(d, cells)
    labels = {}
    for n, rid in D.regions.items():
        labels[new.regions[n]] = D.labels[rid].extend(d)
    labels[new.regions[(x0, y1 + 1, 0)]] = Permutation.transposition(i, d, d)
    new.labels = labels
    return new


def _isolated_disks(D: RectDiagram) -> list[tuple[int, int]]:
    out = []
    for run in D.horizontal_runs():
        if len(run) != 2:
            continue
        a, b = D.cells[run[0]], D.cells[run[1]]
        if (a.kind, a.rotation, b.kind, b.rotation) == ("c", 2, "c", 0):
            out.append(run[0])
    return out


def rect_destabilize(D: RectDiagram) -> RectDiagram:
    d = D.degree
    for x, y in reversed(_isolated_disks(D)):
        rid = D.regions[(x, y, 0)]
        t = D.labels[rid]
        if d not in t.support():
            continue
        if any(d in s.support() for r, s in D.labels.items() if r != rid):
            continue
        cells = {k: c for k, c in D.cells.items() if k not in ((x, y), (x + 1, y))}
        new = RectDiagram(d - 1, cells)
        new.labels = {
            new.regions[n]: Permutation(D.labels[r].images[: d - 1])
            for n, r in D.regions.items()
            if n[:2] not in ((x, y), (x + 1, y))
        }
        return new
    raise RectError(f"no separate disk labeled with index {d} to remove")


def _payload_diagram(d: int, variant: str, i: int) -> RectDiagram:
    from .braider import flatten
    from .moves import payload_bands, payload_labels

    return flatten(LineDiagram(d + 2, payload_labels(d, i), payload_bands(variant)))


def k2_insert(D: RectDiagram, variant: str = "-", i: int = 1) -> RectDiagram:
    d = D.degree
    P0 = _payload_diagram(d, variant, i)
    px0, py0, px1, py1 = P0.bbox()
    x0, y0, _, _ = D.bbox()
    # the payload goes diagonally above and left of D, which stays in place
    dx, dy = x0 - px1 - 1, y0 - py1 - 1
    P = translate(P0, dx, dy)
    cells = dict(D.cells)
    cells.update(P.cells)
    new = RectDiagram(d + 2, cells)
    labels = {}
    for n, rid in D.regions.items():
        labels[new.regions[n]] = D.labels[rid].extend(d + 2)
    for n, rid in P.regions.items():
        labels[new.regions[n]] = P.labels[rid]
    new.labels = labels
    return new


def k2_delete(D: RectDiagram) -> RectDiagram:
    d = D.degree - 2
    x0, y0, _, _ = D.bbox()
    for variant in "-+":
        for i in range(1, d + 1):
            P0 = _payload_diagram(d, variant, i)
            px0, py0, _, _ = P0.bbox()
            P = translate(P0, x0 - px0, y0 - py0)
            if all(D.cells.get(k) == c for k, c in P.cells.items()) and all(
                D.labels.get(D.regions[n]) == P.labels[r] for n, r in P.regions.items()
            ):
                pset = set(P.cells)
                comp = {n for n, r in D.regions.items() if n[:2] in pset}
                rest_reg = {r for n, r in D.regions.items() if n[:2] not in pset}
                if rest_reg & {D.regions[n] for n in comp}:
                    continue
                cells = {k: c for k, c in D.cells.items() if k not in pset}
                new = RectDiagram(d, cells)
                if any(x > d for n, r in D.regions.items() if n[:2] not in pset for x in D.labels[r].support()):
                    continue
                new.labels = {
                    new.regions[n]: Permutation(D.labels[r].images[:d]) for n, r in D.regions.items() if n[:2] not in pset
                }
                return new
    raise RectError("no separate payload component at the top left corner")


def _column_band(D: RectDiagram, x: int):
    runs = [r for r in D.vertical_runs() if r[0][0] == x]
    if not runs:
        raise RectError(f"no vertical band in column {x}")
    return runs[0]


def k1_insert(D: RectDiagram, x: int, sign: int = 1) -> RectDiagram:
    """Add a parallel pair of copies of the vertical band in column x, right of it,
    ending with opposite half-curls."""
    run = _column_band(D, x)
    top, bottom = D.cells[run[0]], D.cells[run[-1]]
    if (top.kind, top.rotation) != ("d", 0) or bottom.kind not in "gh":
        raise RectError("k1 copies a band hanging from and arriving in the interior of horizontal bands")
    D1, m1 = insert_column(D, x + 1)
    D2, m2 = insert_column(D1, x + 1)
    cells = dict(D2.cells)
    for k, (xx, y) in enumerate(run):
        c = D.cells[(xx, y)]
        for off, s in ((1, sign), (2, -sign)):
            if k == len(run) - 1:
                cells[(x + off, y)] = LocalConfig("g" if s == 1 else "h", 0)
            else:
                cells[(x + off, y)] = c
    new = RectDiagram(D.degree, cells)
    touched = {(x + 1, y) for _, y in run} | {(x + 2, y) for _, y in run}
    new.labels = remap_labels(D2, new, lambda n: None if n[:2] in touched else n)
    return new


def k1_delete(D: RectDiagram, x: int) -> RectDiagram:
    """Remove a parallel pair of vertical bands in columns x, x+1 with opposite curls."""
    ra, rb = _column_band(D, x), _column_band(D, x + 1)
    if [y for _, y in ra] != [y for _, y in rb]:
        raise RectError("columns do not carry a parallel pair")
    for (xa, y), (xb, _) in zip(ra[:-1], rb[:-1]):
        if D.cells[(xa, y)] != D.cells[(xb, y)]:
            raise RectError("columns do not carry a parallel pair")
    ea, eb = D.cells[ra[-1]], D.cells[rb[-1]]
    if {ea.kind, eb.kind} != {"g", "h"} or D.cells[ra[0]] != LocalConfig("d", 0):
        raise RectError("the pair does not end with opposite half-curls")
    cells = {}
    for (xx, y), c in D.cells.items():
        if xx in (x, x + 1):
            if (xx, y) in set(ra) | set(rb):
                continue
            if c != LocalConfig("a", 0):
                raise RectError("the pair columns carry other features")
            continue
        cells[(xx - 2 if xx > x + 1 else xx, y)] = c
    # horizontal bands crossing the removed columns are rejoined
    new = RectDiagram(D.degree, cells)
    fx = lambda v: v - 2 if v > x + 1 else (None if v in (x, x + 1) else v)
    new.labels = remap_labels(D, new, lambda n: None if fx(n[0]) is None else (fx(n[0]), n[1], n[2]))
    return new


def apply_rect_move(D: RectDiagram, m: MoveInstance) -> RectDiagram:
    require_valid(D)
    mid = m.move_id
    if mid not in TRANSCRIBED:
        raise NotTranscribed(f"move {mid} has no executable template")
    if mid == "r1":
        axis = m.get("axis", "rows")
        (k,) = m.site
        out = swap_rows(D, k) if axis == "rows" else swap_cols(D, k)
    elif mid == "stab":
        out = rect_stabilize(D, m.get("i", 1))
    elif mid == "destab":
        out = rect_destabilize(D)
    elif mid == "k2":
        out = k2_insert(D, m.get("variant", "-"), m.get("i", 1))
    elif mid == "k2inv":
        out = k2_delete(D)
    elif mid == "k1":
        (x,) = m.site
        out = k1_insert(D, x, m.get("sign", 1))
    else:
        (x,) = m.site
        out = k1_delete(D, x)
    require_valid(out)
    return out


# ---------------------------------------------------------------- canonical form


def _drop_empty_lines(D: RectDiagram) -> RectDiagram:
    rows = sorted({y for _, y in D.cells})
    cols = sorted({x for x, _ in D.cells})
    keep_r = [y for y in rows if any(not (c.kind == "a" and c.rotation == 1) for (x, yy), c in D.cells.items() if yy == y)]
    keep_c = [x for x in cols if any(not (c.kind == "a" and c.rotation == 0) for (xx, y), c in D.cells.items() if xx == x)]
    ry = {y: i for i, y in enumerate(keep_r)}
    cx = {x: i for i, x in enumerate(keep_c)}
    cells = {(cx[x], ry[y]): c for (x, y), c in D.cells.items() if x in cx and y in ry}
    nm = lambda n: (cx[n[0]], ry[n[1]], n[2]) if n[0] in cx and n[1] in ry else None
    return _rebuild(D, cells, nm)


def _line_key(D: RectDiagram, axis: int, v: int):
    # axis 1: row y = v, keyed by x; axis 0: column x = v, keyed by y
    return tuple(sorted((k[1 - axis], c.kind, c.rotation) for k, c in D.cells.items() if k[axis] == v))


def _sort_lines(D: RectDiagram, axis: int) -> RectDiagram:
    """Smallest line order reachable by switching adjacent independent lines.

    At each position the smallest line that can be carried up to it is
    chosen; lines are compared by their contents.
    """
    can = _swappable_rows if axis == 1 else _swappable_cols
    swap = swap_rows if axis == 1 else swap_cols
    lo, hi = (D.bbox()[1], D.bbox()[3]) if axis == 1 else (D.bbox()[0], D.bbox()[2])
    for target in range(lo, hi + 1):
        best, best_v = None, target
        for v in range(target, hi + 1):
            E, ok = D, True
            for z in range(v - 1, target - 1, -1):
                if not can(E, z):
                    ok = False
                    break
                E = swap(E, z)
            if ok:
                k = _line_key(D, axis, v)
                if best is None or k < best:
                    best, best_v = k, v
        for z in range(best_v - 1, target - 1, -1):
            D = swap(D, z)
    return D


def normalize_isotopy(D: RectDiagram, rounds: int = 8) -> RectDiagram:
    """Canonical representative up to translation, empty lines and band switches."""
    if not D.cells:
        return D
    x0, y0, _, _ = D.bbox()
    D = translate(D, -x0, -y0)
    D = _drop_empty_lines(D)
    for _ in range(rounds):
        before = D.key()
        D = _sort_lines(_sort_lines(D, 1), 0)
        if D.key() == before:
            break
    return D


def region_ids(D: RectDiagram) -> dict[Node, int]:
    return dict(D.regions)


# ---------------------------------------------------------------- text format

_CELL = re.compile(r"^cell\s+(-?\d+)\s+(-?\d+)\s+([a-h])\s+(\d+)\s*$")
_LABEL = re.compile(r"^label\s+(\d+)\s+\(\s*(\d+)\s+(\d+)\s*\)\s*$")


def serialize_rect(D: RectDiagram) -> str:
    lines = ["rect 1", f"degree {D.degree}"]
    for (x, y), c in sorted(D.cells.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        lines.append(f"cell {x} {y} {c.kind} {c.rotation}")
    for rid in sorted(D.labels):
        lines.append(f"label {rid} {D.labels[rid]}")
    return "\n".join(lines) + "\n"


def parse_rect(text: str) -> RectDiagram:
    raw = text.split("\n")
    lines = [(no, ln.strip()) for no, ln in enumerate(raw, start=1) if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or lines[0][1].split() != ["rect", "1"]:
        no = lines[0][0] if lines else 1
        raise RectSyntaxError(no, 1, "expected header 'rect 1'")
    if len(lines) < 2 or not re.fullmatch(r"degree\s+\d+", lines[1][1]):
        no = lines[1][0] if len(lines) > 1 else len(raw)
        raise RectSyntaxError(no, 1, "expected 'degree <d>'")
    d = int(lines[1][1].split()[1])
    cells = {}
    labels = {}
    for no, ln in lines[2:]:
        if ln.startswith("cell"):
            mt = _CELL.match(ln)
            if not mt:
                raise RectSyntaxError(no, 1, "expected 'cell <x> <y> <kind a-h> <rotation>'")
            x, y = int(mt.group(1)), int(mt.group(2))
            if (x, y) in cells:
                raise RectSyntaxError(no, 1, f"cell {(x, y)} given twice")
            cells[(x, y)] = LocalConfig(mt.group(3), int(mt.group(4)))
        elif ln.startswith("label"):
            mt = _LABEL.match(ln)
            if not mt:
                raise RectSyntaxError(no, 1, "expected 'label <region> (a b)'")
            a, b = int(mt.group(2)), int(mt.group(3))
            try:
                labels[int(mt.group(1))] = Permutation.transposition(a, b, d)
            except ValueError as exc:
                raise RectSyntaxError(no, ln.index("(") + 1, str(exc)) from None
        else:
            raise RectSyntaxError(no, 1, f"unknown record '{ln.split()[0]}'")
    return RectDiagram(d, cells, labels)


def single_disk(label: Permutation) -> RectDiagram:
    D = RectDiagram(label.degree, {(0, 0): LocalConfig("c", 2), (1, 0): LocalConfig("c", 0)})
    D.labels = {1: label}
    return D
