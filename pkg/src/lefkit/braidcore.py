"""Braid words, permutations and the Hurwitz action on half-twist sequences.

Conventions used everywhere in the package:

* products are read left to right, so ``(p * q)(x) == q(p(x))``;
* ``s<i>`` is the positive (right-handed) standard generator and ``S<i>``
  its inverse, and ``perm_of(s<i>)`` is the transposition ``(i i+1)``;
* strands, sheets and sequence positions are 1-based.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

Letter = tuple[int, int]


class BraidError(ValueError):
    pass


# ---------------------------------------------------------------- permutations


@dataclass(frozen=True)
class Permutation:
    """A bijection of {1..d}, stored as its tuple of images."""

    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(x) for x in self.images)
        if sorted(imgs) != list(range(1, len(imgs) + 1)):
            raise BraidError(f"not a permutation: {imgs}")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, d: int) -> "Permutation":
        return cls(tuple(range(1, d + 1)))

    @classmethod
    def transposition(cls, a: int, b: int, d: int) -> "Permutation":
        if a == b or not (1 <= a <= d and 1 <= b <= d):
            raise BraidError(f"bad transposition ({a} {b}) in degree {d}")
        imgs = list(range(1, d + 1))
        imgs[a - 1], imgs[b - 1] = b, a
        return cls(tuple(imgs))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], d: int) -> "Permutation":
        imgs = list(range(1, d + 1))
        seen = set()
        for cyc in cycles:
            cyc = list(cyc)
            for x in cyc:
                if x in seen or not 1 <= x <= d:
                    raise BraidError(f"bad cycle {cyc} in degree {d}")
                seen.add(x)
            for i, x in enumerate(cyc):
                imgs[x - 1] = cyc[(i + 1) % len(cyc)]
        return cls(tuple(imgs))

    @classmethod
    def parse(cls, text: str, d: int | None = None) -> "Permutation":
        text = text.strip()
        cycles = [[int(t) for t in grp.split()] for grp in re.findall(r"\(([^()]*)\)", text)]
        if re.sub(r"\([^()]*\)", "", text).strip():
            raise BraidError(f"bad cycle notation: {text!r}")
        if d is None:
            d = max([x for c in cycles for x in c], default=1)
        return cls.from_cycles([c for c in cycles if c], d)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        # left to right: apply self first
        if self.degree != other.degree:
            raise BraidError("degree mismatch")
        return Permutation(tuple(other(self(x)) for x in range(1, self.degree + 1)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, y in enumerate(self.images, start=1):
            inv[y - 1] = i
        return Permutation(tuple(inv))

    def conj(self, p: "Permutation") -> "Permutation":
        """Return p^-1 self p."""
        return p.inverse() * self * p

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for start in range(1, self.degree + 1):
            if start in seen or self(start) == start:
                continue
            cyc = [start]
            seen.add(start)
            x = self(start)
            while x != start:
                cyc.append(x)
                seen.add(x)
                x = self(x)
            out.append(tuple(cyc))
        return out

    def support(self) -> tuple[int, ...]:
        return tuple(x for x in range(1, self.degree + 1) if self(x) != x)

    def is_transposition(self) -> bool:
        return len(self.support()) == 2

    def num_cycles(self) -> int:
        """Number of orbits, fixed points included."""
        moved = sum(len(c) for c in self.cycles())
        return len(self.cycles()) + self.degree - moved

    def extend(self, d: int) -> "Permutation":
        return Permutation(self.images + tuple(range(self.degree + 1, d + 1)))

    def __str__(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)


# ---------------------------------------------------------------- braid words


def _check_letters(strands: int, letters) -> tuple[Letter, ...]:
    out = []
    for i, e in letters:
        i, e = int(i), int(e)
        if e not in (1, -1):
            raise BraidError(f"exponent must be +-1, got {e}")
        if not 1 <= i < strands:
            raise BraidError(f"generator index {i} out of range for {strands} strands")
        out.append((i, e))
    return tuple(out)


@dataclass(frozen=True)
class BraidWord:
    strands: int
    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        if self.strands < 1:
            raise BraidError("need at least one strand")
        object.__setattr__(self, "letters", _check_letters(self.strands, self.letters))

    @classmethod
    def parse(cls, text: str, strands: int) -> "BraidWord":
        letters = []
        for tok in text.split():
            m = re.fullmatch(r"([sS])(\d+)(?:\^(-?\d+))?", tok)
            if not m:
                raise BraidError(f"bad braid token {tok!r}")
            e = 1 if m.group(1) == "s" else -1
            power = int(m.group(3)) if m.group(3) else 1
            if power < 0:
                e, power = -e, -power
            letters.extend([(int(m.group(2)), e)] * power)
        return cls(strands, tuple(letters))

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        if self.strands != other.strands:
            raise BraidError("strand count mismatch")
        return BraidWord(self.strands, self.letters + other.letters)

    def inverse(self) -> "BraidWord":
        return BraidWord(self.strands, tuple((i, -e) for i, e in reversed(self.letters)))

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return " ".join(("s" if e > 0 else "S") + str(i) for i, e in self.letters)


def free_reduce(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    stack: list[Letter] = []
    for i, e in letters:
        if stack and stack[-1] == (i, -e):
            stack.pop()
        else:
            stack.append((i, e))
    return tuple(stack)


def word_reduce(w: BraidWord) -> BraidWord:
    """Free reduction only; no braid relations are applied."""
    return BraidWord(w.strands, free_reduce(w.letters))


def perm_of(w: BraidWord) -> Permutation:
    imgs = list(range(1, w.strands + 1))
    # track where each strand position goes, composing left to right
    pos = list(range(1, w.strands + 1))
    for i, _ in w.letters:
        pos = [i + 1 if p == i else i if p == i + 1 else p for p in pos]
    for start, p in zip(range(1, w.strands + 1), pos):
        imgs[start - 1] = p
    return Permutation(tuple(imgs))


# ---------------------------------------------------------------- monotonic bands


@dataclass(frozen=True)
class MonotonicBand:
    """Half-twisted band running monotonically from sheet j down to sheet k.

    pattern[h - j - 1] is +1 when the band passes through sheet h and -1
    when it passes in front of it.
    """

    j: int
    k: int
    sign: int
    pattern: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pattern", tuple(int(x) for x in self.pattern))
        if not 1 <= self.j < self.k:
            raise BraidError(f"band needs 1 <= j < k, got {self.j}, {self.k}")
        if self.sign not in (1, -1):
            raise BraidError("band sign must be +-1")
        if len(self.pattern) != self.k - self.j - 1:
            raise BraidError(
                f"pattern length {len(self.pattern)} does not fit band {self.j}->{self.k}"
            )
        if any(x not in (1, -1) for x in self.pattern):
            raise BraidError("pattern entries must be +-1")

    def eps(self, h: int) -> int:
        return self.pattern[h - self.j - 1]

    def through(self) -> tuple[int, ...]:
        return tuple(h for h in range(self.j + 1, self.k) if self.eps(h) == 1)

    def __str__(self) -> str:
        pat = "".join("t" if e > 0 else "f" for e in self.pattern)
        return f"{self.j} {self.k} {'+' if self.sign > 0 else '-'} {pat}".rstrip()


def band_to_word(b: MonotonicBand, strands: int | None = None) -> BraidWord:
    m = b.k if strands is None else strands
    left = [(h, -b.eps(h)) for h in range(b.k - 1, b.j, -1)]
    right = [(h, b.eps(h)) for h in range(b.j + 1, b.k)]
    return BraidWord(m, tuple(left + [(b.j, b.sign)] + right))


def is_monotonic(w: BraidWord) -> MonotonicBand | None:
    """Syntactic match against the monotonic template."""
    L = w.letters
    if len(L) % 2 == 0:
        return None
    r = len(L) // 2
    j, sign = L[r]
    k = j + r + 1
    if k > w.strands:
        return None
    pattern = []
    for t, h in enumerate(range(j + 1, k)):
        left = L[r - 1 - t]
        right = L[r + 1 + t]
        if left[0] != h or right[0] != h or left[1] != -right[1]:
            return None
        pattern.append(right[1])
    return MonotonicBand(j, k, sign, tuple(pattern))


# ---------------------------------------------------------------- conjugated generators


def split_conjugate(letters: Sequence[Letter]) -> tuple[tuple[Letter, ...], Letter]:
    """Split a freely reduced word w x w^-1 into (w, x)."""
    L = tuple(letters)
    if len(L) % 2 == 0:
        raise BraidError("not a conjugate of a standard generator")
    r = len(L) // 2
    for t in range(r):
        a, b = L[r - 1 - t], L[r + 1 + t]
        if a[0] != b[0] or a[1] != -b[1]:
            raise BraidError("not a conjugate of a standard generator")
    return L[:r], L[r]


def peel_conjugate(letters: Sequence[Letter]) -> tuple[Letter, ...]:
    """Freely reduce a conjugated generator and drop innermost far-commuting letters."""
    w, mid = split_conjugate(free_reduce(letters))
    w = list(w)
    while w and abs(w[-1][0] - mid[0]) >= 2:
        w.pop()
    inv = [(i, -e) for i, e in reversed(w)]
    return tuple(w) + (mid,) + tuple(inv)


Band = Union[BraidWord, MonotonicBand]


def as_word(b: Band, strands: int) -> BraidWord:
    if isinstance(b, MonotonicBand):
        return band_to_word(b, strands)
    if b.strands != strands:
        raise BraidError("strand count mismatch")
    return b


@dataclass(frozen=True)
class HalfTwistSequence:
    """Ordered half-twists.

    Each entry is stored as the canonical word of its arc and sign, so equal
    half-twists are equal words and slides undo each other exactly.
    """

    strands: int
    bands: tuple[BraidWord, ...] = ()

    def __post_init__(self):
        from .arcs import canonical_word, word_arc

        out = []
        for b in self.bands:
            w = as_word(b, self.strands)
            w = BraidWord(self.strands, peel_conjugate(w.letters))
            if not perm_of(w).is_transposition():
                raise BraidError(f"entry {w} is not a half-twist")
            out.append(canonical_word(*word_arc(w), self.strands))
        object.__setattr__(self, "bands", tuple(out))

    def words(self) -> list[BraidWord]:
        return list(self.bands)

    def __len__(self) -> int:
        return len(self.bands)


def _conjugate(a: BraidWord, b: BraidWord) -> BraidWord:
    """a b a^-1 in peeled symmetric form."""
    return BraidWord(a.strands, peel_conjugate(a.letters + b.letters + a.inverse().letters))


def hurwitz_slide(s: HalfTwistSequence, i: int, direction: str = "right") -> HalfTwistSequence:
    n = len(s.bands)
    if not 1 <= i < n:
        raise BraidError(f"slide position {i} out of range 1..{n - 1}")
    a, b = s.bands[i - 1], s.bands[i]
    if direction == "right":
        new = (_conjugate(a, b), a)
    elif direction == "left":
        new = (b, _conjugate(b.inverse(), a))
    else:
        raise BraidError(f"bad direction {direction!r}")
    bands = list(s.bands)
    bands[i - 1 : i + 1] = new
    return HalfTwistSequence(s.strands, tuple(bands))


def total_braid(s: HalfTwistSequence) -> BraidWord:
    letters: tuple[Letter, ...] = ()
    for w in s.words():
        letters += w.letters
    return BraidWord(s.strands, free_reduce(letters))
