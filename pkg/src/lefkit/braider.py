"""Braiding rectangular diagrams into line diagrams, flattening back, and
making bands monotonic by stabilization and sliding."""

from __future__ import annotations

from .arcs import Arc, UPPER, axis_form, extremal_points
from .braidcore import MonotonicBand
from .linediagram import (
    DiagramError,
    LineDiagram,
    band_arc,
    braid_stabilize,
    check_labels,
    slide,
)
from .moves import MoveScript, MoveStep
from .rectdiagram import (
    LocalConfig,
    RectDiagram,
    RectError,
    propagate_labels,
    require_valid,
    to_restricted,
)

def _band_ends(D: RectDiagram, run):
    top, bottom = D.cells[run[0]], D.cells[run[-1]]
    if not ((top.kind == "d" and top.rotation == 0) or (top.kind == "b" and top.rotation in (2, 3))):
        raise RectError(f"vertical band at {run[0]} does not hang from a horizontal band")
    if bottom.kind == "g" or (bottom.kind == "b" and bottom.rotation == 0):
        sign = 1
    elif bottom.kind == "h" or (bottom.kind == "b" and bottom.rotation == 1):
        sign = -1
    else:
        raise RectError(f"vertical band at {run[-1]} does not end on a horizontal band")
    return sign


def braid_up(D: RectDiagram) -> LineDiagram:
    """Braid a rectangular diagram into a line diagram with monotonic bands.

    Horizontal bands become sheets in top to bottom order; vertical bands
    become bands ordered left to right.  A vertical band passing beside a
    horizontal band is read as passing in front of its sheet.
    """
    R = to_restricted(D)
    require_valid(R)
    hruns = sorted(R.horizontal_runs(), key=lambda r: r[0][1])
    row_sheet = {run[0][1]: s for s, run in enumerate(hruns, start=1)}
    labels = []
    for run in hruns:
        x, y = run[0]
        c = R.cells[(x, y)]
        strand = next(i for i, s in enumerate(c.strands) if "E" in s or "W" in s)
        labels.append(R.label_at(x, y, strand))
    bands = []
    for run in sorted(R.vertical_runs(), key=lambda r: r[0][0]):
        sign = _band_ends(R, run)
        x = run[0][0]
        j, k = row_sheet[run[0][1]], row_sheet[run[-1][1]]
        pattern = []
        for h in range(j + 1, k):
            c = R.cells.get((x, hruns[h - 1][0][1]))
            pattern.append(1 if c is not None and c.kind == "f" else -1)
        bands.append(MonotonicBand(j, k, sign, tuple(pattern)))
    L = LineDiagram(R.degree, tuple(labels), tuple(bands))
    if not check_labels(L):
        raise RectError("braided labels are inconsistent")
    return L


def flatten(L: LineDiagram) -> RectDiagram:
    """Restricted rectangular diagram whose braiding gives back L."""
    if not L.is_monotonic():
        raise RectError("flattening needs monotonic bands; stabilize first")
    n = L.n
    cells = {}
    for h in range(1, L.m + 1):
        y = h - 1
        cells[(0, y)] = LocalConfig("c", 2)
        cells[(n + 1, y)] = LocalConfig("c", 0)
        for x, b in enumerate(L.bands, start=1):
            if h == b.j:
                cfg = LocalConfig("d", 0)
            elif h == b.k:
                cfg = LocalConfig("g" if b.sign == 1 else "h", 0)
            elif b.j < h < b.k:
                cfg = LocalConfig("f" if b.pattern[h - b.j - 1] == 1 else "e", 0)
            else:
                cfg = LocalConfig("a", 0)
            cells[(x, y)] = cfg
    D = RectDiagram(L.degree, cells)
    seed = {D.regions[(0, h - 1, 0)]: t for h, t in enumerate(L.labels, start=1)}
    D.labels = propagate_labels(D, seed)
    return D




# ---------------------------------------------------------------- monotonic bands


def _extremals(arc: Arc) -> tuple[int, int]:
    return len(extremal_points(arc)), len(axis_form(arc).crossings)


def _reversed(arc: Arc) -> Arc:
    return Arc(arc.b, tuple((h, -e) for h, e in reversed(arc.u)), arc.a)


def _turn(arc: Arc):
    """Axis points and halves of the core, and the index of its first turn."""
    ax = axis_form(arc)
    return ax.points(), ax.halves(), extremal_points(arc)[0]


def _parallel_pattern(arc: Arc, q: int) -> tuple[int, ...]:
    """Pattern of a band from the start of the core to a new sheet at q.

    Sheets met by the first monotonic portion of the core keep its side;
    the others are passed in front.
    """
    pts, halves, t = _turn(arc)
    a = arc.a
    lo, hi = (a, q) if q > a else (q - 1, a)
    out = []
    for h in range(lo + 1, hi):
        side = -1
        for s in range(t):
            if min(pts[s], pts[s + 1]) < 2 * h < max(pts[s], pts[s + 1]):
                side = 1 if halves[s] == UPPER else -1
                break
        out.append(side)
    return tuple(out)


def _candidates(L: LineDiagram, arc: Arc):
    """(end sheet, new sheet position, pattern) to try, in a fixed order.

    From each end of the core the new sheet is tried first where the core
    first turns, with its band parallel to the core, and then at positions
    further away; patterns other than the parallel one are all-front and
    all-through.
    """
    for end in (arc, _reversed(arc)):
        if not extremal_points(end):
            continue
        pts, _, t = _turn(end)
        q0 = (pts[t] + 1) // 2
        for q in sorted(range(1, L.m + 2), key=lambda q: (abs(q - q0), -q)):
            width = q - end.a - 1 if q > end.a else end.a - q
            seen = []
            for pat in (_parallel_pattern(end, q), (-1,) * width, (1,) * width):
                if pat not in seen:
                    seen.append(pat)
                    yield end.a, q, pat


def _unbend_options(L: LineDiagram, i: int, history: list[MoveStep]):
    """Stabilize-and-slide pairs that simplify band i, simplest result first."""
    arc = band_arc(L.bands[i - 1])
    before = _extremals(arc)
    out = []
    for rank, (a, q, pat) in enumerate(_candidates(L, arc)):
        for index, direction, pos in ((i, "right", i), (i + 1, "left", i + 1)):
            try:
                L1 = braid_stabilize(L, a, 1, q, pat, index)
            except DiagramError:
                continue
            L2 = slide(L1, i, direction)
            after = _extremals(band_arc(L2.bands[pos - 1]))
            if after >= before:
                continue
            steps = [
                MoveStep.make("S", sheet=a, sign=1, q=q, pattern=pat, index=index),
                MoveStep.make("slide", i=i, dir=direction),
            ]
            if _stabilizations_first(history + steps) is None:
                continue
            out.append((after, rank, L2, pos, steps))
    out.sort(key=lambda r: r[:2])
    return [(L2, pos, steps) for _, _, L2, pos, steps in out]


def _unbend(L: LineDiagram, i: int, history: list[MoveStep], budget: list[int], seen=None):
    """Depth-first search for a stabilization sequence making band i monotonic."""
    if isinstance(L.bands[i - 1], MonotonicBand):
        return L, i, history
    seen = set() if seen is None else seen
    for L2, pos, steps in _unbend_options(L, i, history):
        key = (L2.m, band_arc(L2.bands[pos - 1]))
        if key in seen:
            continue
        seen.add(key)
        budget[0] -= 1
        if budget[0] < 0:
            break
        found = _unbend(L2, pos, history + steps, budget, seen)
        if found is not None:
            return found
    return None


def _stabilizations_first(steps: list[MoveStep]) -> list[MoveStep] | None:
    """Move every stabilization ahead of the slides, reindexing the slides."""
    out = list(steps)
    changed = True
    while changed:
        changed = False
        for r in range(len(out) - 1):
            a, b = out[r], out[r + 1]
            if a.name == "slide" and b.name == "S":
                p, idx = a.get("i"), b.get("index")
                if idx == p + 1:
                    return None
                p2 = p + 1 if idx <= p else p
                out[r], out[r + 1] = b, MoveStep.make("slide", i=p2, dir=a.get("dir"))
                changed = True
    return out


def monotonize(L: LineDiagram, budget: int = 400) -> tuple[LineDiagram, MoveScript]:
    """Positive stabilization of L whose bands are all monotonic after sliding.

    Bands are processed in order; along each core the turns are removed from
    the start, one new sheet and one slide per turn.  The new sheet is first
    tried where the core turns, with its band parallel to the core; other
    positions and patterns are tried after it.  The script lists all
    stabilizations first and the slides after them.  Choices are searched
    depth first, simplest result first, within ``budget`` tries per band.
    """
    steps: list[MoveStep] = []
    cur = L
    i = 1
    while i <= cur.n:
        found = _unbend(cur, i, steps, [budget])
        if found is None:
            raise DiagramError(f"no stabilization sequence found making band {i} monotonic")
        cur, i, steps = found
        i += 1
    ordered = _stabilizations_first(steps)
    if ordered is None:
        raise DiagramError("stabilizations could not be moved ahead of the slides")
    script = MoveScript(ordered)
    if script.replay(L)[-1] != cur:
        raise DiagramError("reordered script does not reproduce the monotonic diagram")
    return cur, script
