"""Labeled line diagrams: sheets with transposition labels and signed bands."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from .arcs import (
    Arc,
    act_on_arc,
    arc_to_monotonic,
    canonical_word,
    fg_inverse,
    monotonic_arc,
    word_arc,
)
from .braidcore import BraidError, BraidWord, MonotonicBand, Permutation, band_to_word


class DiagramError(ValueError):
    pass


class LfdSyntaxError(DiagramError):
    def __init__(self, line: int, col: int, msg: str):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class GeneralBand:
    """A half-twisted band whose core is not x-monotone."""

    arc: Arc
    sign: int

    @property
    def j(self) -> int:
        return self.arc.a

    @property
    def k(self) -> int:
        return self.arc.b


Band = Union[MonotonicBand, GeneralBand]


def band_arc(b: Band) -> Arc:
    return monotonic_arc(b) if isinstance(b, MonotonicBand) else b.arc


def band_word(b: Band, m: int) -> BraidWord:
    if isinstance(b, MonotonicBand):
        return band_to_word(b, m)
    return canonical_word(b.arc, b.sign, m)


def make_band(arc: Arc, sign: int) -> Band:
    mono = arc_to_monotonic(arc, sign)
    return mono if mono is not None else GeneralBand(arc, sign)


def band_from_word(w: BraidWord) -> Band:
    arc, sign = word_arc(w)
    return make_band(arc, sign)


def insert_puncture(arc: Arc, q: int) -> Arc:
    """Reindex for a new unlinked puncture at position q."""
    sh = lambda h: h + 1 if h >= q else h
    return Arc.make(sh(arc.a), tuple((sh(h), e) for h, e in arc.u), sh(arc.b))


def delete_puncture(arc: Arc, q: int) -> Arc:
    if q in (arc.a, arc.b) or q in arc.linked():
        raise DiagramError(f"arc {arc} involves puncture {q}")
    sh = lambda h: h - 1 if h > q else h
    return Arc.make(sh(arc.a), tuple((sh(h), e) for h, e in arc.u), sh(arc.b))


@dataclass(frozen=True)
class LineDiagram:
    degree: int
    labels: tuple[Permutation, ...]
    bands: tuple[Band, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "bands", tuple(self.bands))
        if not self.labels:
            raise DiagramError("a line diagram needs at least one sheet")
        for t in self.labels:
            if t.degree != self.degree or not t.is_transposition():
                raise DiagramError(f"label {t} is not a transposition in degree {self.degree}")
        for b in self.bands:
            if not 1 <= b.j < b.k <= self.m:
                raise DiagramError(f"band {b} out of range for {self.m} sheets")
            if isinstance(b, GeneralBand) and arc_to_monotonic(b.arc, b.sign) is not None:
                raise DiagramError("general band with a monotonic core")

    @property
    def m(self) -> int:
        return len(self.labels)

    @property
    def n(self) -> int:
        return len(self.bands)

    def arcs(self) -> list[Arc]:
        return [band_arc(b) for b in self.bands]

    def signs(self) -> list[int]:
        return [b.sign for b in self.bands]

    def words(self) -> list[BraidWord]:
        return [band_word(b, self.m) for b in self.bands]

    def is_monotonic(self) -> bool:
        return all(isinstance(b, MonotonicBand) for b in self.bands)

    def __str__(self) -> str:
        return serialize_lfd(self)


def band_consistent(L: LineDiagram, arc: Arc) -> bool:
    P = arc.transport(list(L.labels))
    return L.labels[arc.b - 1] == L.labels[arc.a - 1].conj(P)


def check_labels(L: LineDiagram) -> bool:
    """Every band satisfies t_k = T^-1 t_j T for its transport T."""
    return all(band_consistent(L, a) for a in L.arcs())


def connected_labels(L: LineDiagram) -> bool:
    seen = {1}
    grew = True
    while grew:
        grew = False
        for t in L.labels:
            a, b = t.support()
            if (a in seen) != (b in seen):
                seen |= {a, b}
                grew = True
    return len(seen) == L.degree


# ---------------------------------------------------------------- covering stabilization


def cover_stabilize(L: LineDiagram, i: int = 1) -> LineDiagram:
    d = L.degree + 1
    if not 1 <= i < d:
        raise DiagramError(f"stabilization index {i} out of range")
    labels = tuple(t.extend(d) for t in L.labels) + (Permutation.transposition(i, d, d),)
    return LineDiagram(d, labels, L.bands)


def cover_destabilize(L: LineDiagram) -> LineDiagram:
    d = L.degree
    holders = [r for r, t in enumerate(L.labels, start=1) if d in t.support()]
    if len(holders) != 1:
        raise DiagramError(f"index {d} appears in {len(holders)} labels")
    r = holders[0]
    blocking = [i for i, a in enumerate(L.arcs(), start=1) if r in (a.a, a.b) or r in a.linked()]
    if blocking:
        raise DiagramError(f"sheet {r} carries or meets bands {blocking}")
    labels = [Permutation(t.images[: d - 1]) for s, t in enumerate(L.labels, start=1) if s != r]
    bands = [make_band(delete_puncture(a, r), b.sign) for a, b in zip(L.arcs(), L.bands)]
    return LineDiagram(d - 1, tuple(labels), tuple(bands))


# ---------------------------------------------------------------- braided stabilization


def braid_stabilize(
    L: LineDiagram,
    j: int,
    sign: int = 1,
    q: int | None = None,
    pattern: tuple[int, ...] | None = None,
    index: int | None = None,
) -> LineDiagram:
    """Add a new sheet at position q and a band joining it to sheet j.

    With q > j the new sheet lies below sheet j; with q <= j it lies above,
    and sheet j moves to j + 1.  The pattern covers the sheets strictly
    between the two ends.  The new sheet is unlinked with every existing
    band.  The new band is inserted at Hurwitz position ``index`` (default:
    last).
    """
    m = L.m
    if not 1 <= j <= m:
        raise DiagramError(f"sheet {j} out of range")
    q = j + 1 if q is None else q
    if not 1 <= q <= m + 1:
        raise DiagramError(f"new sheet position {q} out of range 1..{m + 1}")
    top, bottom = (j, q) if q > j else (q, j + 1)
    if pattern is None:
        pattern = (-1,) * (bottom - top - 1)
    band = MonotonicBand(top, bottom, sign, tuple(pattern))
    arcs = [insert_puncture(a, q) for a in L.arcs()]
    labels = list(L.labels)
    labels.insert(q - 1, L.labels[0])  # placeholder, fixed below
    T = Permutation.identity(L.degree)
    for h in band.through():
        T = T * labels[h - 1]
    if q > j:
        labels[q - 1] = labels[j - 1].conj(T)
    else:
        labels[q - 1] = labels[j].conj(T.inverse())
    bands = [make_band(a, b.sign) for a, b in zip(arcs, L.bands)]
    index = len(bands) + 1 if index is None else index
    if not 1 <= index <= len(bands) + 1:
        raise DiagramError(f"band index {index} out of range")
    bands.insert(index - 1, band)
    return LineDiagram(L.degree, tuple(labels), tuple(bands))


def destabilization_blockers(L: LineDiagram, i: int, sheet: int) -> list[int]:
    arcs = L.arcs()
    out = []
    for r, a in enumerate(arcs, start=1):
        if r == i:
            continue
        if sheet in (a.a, a.b) or sheet in a.linked():
            out.append(r)
    return out


def braid_destabilize(L: LineDiagram, i: int, sheet: int | None = None) -> LineDiagram:
    """Cancel band i together with one of its end sheets (default: the lower one)."""
    if not 1 <= i <= L.n:
        raise DiagramError(f"band index {i} out of range")
    arc = band_arc(L.bands[i - 1])
    sheet = arc.b if sheet is None else sheet
    if sheet not in (arc.a, arc.b):
        raise DiagramError(f"sheet {sheet} is not an end of band {i}")
    if sheet in arc.linked():
        raise DiagramError(f"band {i} is linked with its own end sheet {sheet}")
    blockers = destabilization_blockers(L, i, sheet)
    if blockers:
        raise DiagramError(f"cannot cancel band {i} with sheet {sheet}: blocked by bands {blockers}")
    labels = [t for s, t in enumerate(L.labels, start=1) if s != sheet]
    bands = [
        make_band(delete_puncture(a, sheet), b.sign)
        for r, (a, b) in enumerate(zip(L.arcs(), L.bands), start=1)
        if r != i
    ]
    return LineDiagram(L.degree, tuple(labels), tuple(bands))


# ---------------------------------------------------------------- band sliding


def half_twist_letters(b: Band, m: int):
    return band_word(b, m).letters


def slide(L: LineDiagram, i: int, direction: str = "right") -> LineDiagram:
    n = L.n
    if not 1 <= i < n:
        raise DiagramError(f"slide position {i} out of range 1..{n - 1}")
    A, B = L.bands[i - 1], L.bands[i]
    if direction == "right":
        new_arc = act_on_arc(band_arc(B), fg_inverse(half_twist_letters(A, L.m)), L.m)
        pair = (make_band(new_arc, B.sign), A)
    elif direction == "left":
        new_arc = act_on_arc(band_arc(A), half_twist_letters(B, L.m), L.m)
        pair = (B, make_band(new_arc, A.sign))
    else:
        raise DiagramError(f"bad direction {direction!r}")
    bands = list(L.bands)
    bands[i - 1 : i + 1] = pair
    return LineDiagram(L.degree, L.labels, tuple(bands))


# ---------------------------------------------------------------- .lfd text format


def serialize_lfd(L: LineDiagram) -> str:
    lines = ["lfd 1", f"degree {L.degree}", f"sheets {L.m}"]
    for r, t in enumerate(L.labels, start=1):
        lines.append(f"label {r} {t}")
    for b in L.bands:
        if isinstance(b, MonotonicBand):
            lines.append(f"band {b}")
        else:
            lines.append(f"bandw {band_word(b, L.m)}")
    return "\n".join(lines) + "\n"


_TRANSP = re.compile(r"\(\s*(\d+)\s+(\d+)\s*\)$")


def parse_lfd(text: str) -> LineDiagram:
    raw = text.split("\n")
    lines = [(no, ln) for no, ln in enumerate(raw, start=1) if ln.strip() and not ln.lstrip().startswith("#")]
    pos = 0

    def expect(keyword: str) -> tuple[int, str]:
        nonlocal pos
        if pos >= len(lines):
            last = len(raw)
            raise LfdSyntaxError(last, 1, f"unexpected end of file, expected '{keyword}'")
        no, ln = lines[pos]
        toks = ln.split()
        if toks[0] != keyword:
            raise LfdSyntaxError(no, ln.index(toks[0]) + 1, f"expected '{keyword}', found '{toks[0]}'")
        pos += 1
        return no, ln

    def int_field(no, ln, tok):
        if not re.fullmatch(r"\d+", tok):
            raise LfdSyntaxError(no, ln.index(tok) + 1, f"expected an integer, found '{tok}'")
        return int(tok)

    no, ln = expect("lfd")
    toks = ln.split()
    if len(toks) != 2 or toks[1] != "1":
        raise LfdSyntaxError(no, 1, "unsupported lfd version")
    no, ln = expect("degree")
    toks = ln.split()
    if len(toks) != 2:
        raise LfdSyntaxError(no, 1, "expected 'degree <d>'")
    d = int_field(no, ln, toks[1])
    no, ln = expect("sheets")
    toks = ln.split()
    if len(toks) != 2:
        raise LfdSyntaxError(no, 1, "expected 'sheets <m>'")
    m = int_field(no, ln, toks[1])
    labels = []
    for r in range(1, m + 1):
        no, ln = expect("label")
        toks = ln.split(None, 2)
        if len(toks) != 3 or int_field(no, ln, toks[1]) != r:
            raise LfdSyntaxError(no, 1, f"expected 'label {r} (a b)'")
        mt = _TRANSP.match(toks[2].strip())
        if not mt:
            raise LfdSyntaxError(no, ln.index(toks[2]) + 1, f"bad transposition '{toks[2]}'")
        a, b = int(mt.group(1)), int(mt.group(2))
        try:
            labels.append(Permutation.transposition(a, b, d))
        except BraidError as exc:
            raise LfdSyntaxError(no, ln.index(toks[2]) + 1, str(exc)) from None
    bands: list[Band] = []
    while pos < len(lines):
        no, ln = lines[pos]
        toks = ln.split()
        pos += 1
        if toks[0] == "band":
            if len(toks) not in (4, 5):
                raise LfdSyntaxError(no, 1, "expected 'band j k <+|-> [pattern]'")
            j = int_field(no, ln, toks[1])
            k = int_field(no, ln, toks[2])
            if toks[3] not in "+-" or len(toks[3]) != 1:
                raise LfdSyntaxError(no, ln.index(toks[3], len("band")) + 1, f"bad sign '{toks[3]}'")
            pat = toks[4] if len(toks) == 5 else ""
            for c_off, c in enumerate(pat):
                if c not in "tf":
                    col = ln.rindex(pat) + c_off + 1
                    raise LfdSyntaxError(no, col, f"pattern letter '{c}' is not t or f")
            try:
                bands.append(
                    MonotonicBand(j, k, 1 if toks[3] == "+" else -1, tuple(1 if c == "t" else -1 for c in pat))
                )
            except BraidError as exc:
                raise LfdSyntaxError(no, 1, str(exc)) from None
        elif toks[0] == "bandw":
            try:
                w = BraidWord.parse(" ".join(toks[1:]), m)
                bands.append(band_from_word(w))
            except BraidError as exc:
                raise LfdSyntaxError(no, 1, str(exc)) from None
        else:
            raise LfdSyntaxError(no, ln.index(toks[0]) + 1, f"unknown record '{toks[0]}'")
    try:
        return LineDiagram(d, tuple(labels), tuple(bands))
    except DiagramError as exc:
        raise LfdSyntaxError(lines[-1][0], 1, str(exc)) from None


# ---------------------------------------------------------------- examples


def hopf_diagram(sign: int = 1) -> LineDiagram:
    t = Permutation.transposition(1, 2, 2)
    return LineDiagram(2, (t, t), (MonotonicBand(1, 2, sign, ()),))


def worked_example_words() -> list[BraidWord]:
    texts = ["s1", "S3 S2 s3", "S5 s4 s3 S4 s5", "S3 S2 S2 S3 S4 s3 s2 s2 s3"]
    return [BraidWord.parse(t, 6) for t in texts]


def worked_example(degree: int = 2, labels=None) -> LineDiagram:
    """The six-sheet, four-band example; all sheets labeled (1 2) by default."""
    if labels is None:
        labels = [Permutation.transposition(1, 2, degree)] * 6
    return LineDiagram(degree, tuple(labels), tuple(band_from_word(w) for w in worked_example_words()))
