"""Bounded search for move scripts relating two line diagrams.

Both ends are expanded breadth first over a move alphabet and the two
trees are joined where they meet.  Steps found from the target side are
turned around with their exact inverses, and every result is replayed and
certified before it is returned.  The search is sound but not complete.
"""

from __future__ import annotations

from dataclasses import dataclass

from .invariants import Certificate, certify
from .linediagram import LineDiagram, band_arc, serialize_lfd
from .moves import MoveError, MoveScript, MoveStep, apply_step, inverse_step

ALPHABET = ("Sinv", "cdestab", "slide", "S", "cstab")
# shrinking moves are tried first at each depth
_ORDER = {"Sinv": 0, "cdestab": 0, "slide": 1, "S": 2, "cstab": 2}


class SearchBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    alphabet: tuple[str, ...] = ALPHABET
    depth: int = 3
    budget: int = 200_000
    canonical: bool = True

    def __post_init__(self):
        if self.depth < 0 or self.budget <= 0:
            raise ValueError("depth and budget must be positive")
        if not self.alphabet:
            raise ValueError("empty move alphabet")
        bad = set(self.alphabet) - set(ALPHABET)
        if bad:
            raise ValueError(f"moves {sorted(bad)} are not searchable")


@dataclass
class SearchResult:
    script: MoveScript | None
    explored: int
    certificate: Certificate | None = None

    @property
    def found(self) -> bool:
        return self.script is not None


def candidate_steps(L: LineDiagram, alphabet=ALPHABET) -> list[MoveStep]:
    """Move instances of the alphabet that name a site of L."""
    out = []
    if "Sinv" in alphabet:
        for i in range(1, L.n + 1):
            arc = band_arc(L.bands[i - 1])
            for sheet in (arc.b, arc.a):
                out.append(MoveStep.make("Sinv", band=i, sheet=sheet))
    if "cdestab" in alphabet:
        out.append(MoveStep.make("cdestab"))
    if "slide" in alphabet:
        for i in range(1, L.n):
            for d in ("right", "left"):
                out.append(MoveStep.make("slide", i=i, dir=d))
    if "S" in alphabet:
        for j in range(1, L.m + 1):
            for s in (1, -1):
                out.append(MoveStep.make("S", sheet=j, sign=s))
    if "cstab" in alphabet:
        for i in range(1, L.degree + 1):
            out.append(MoveStep.make("cstab", i=i))
    return out


def _key(L: LineDiagram, canonical: bool, fallback: int):
    # without canonical keys every generated state is kept apart
    return serialize_lfd(L) if canonical else (serialize_lfd(L), fallback)


def _text(k) -> str:
    return k if isinstance(k, str) else k[0]


def neighbors(L: LineDiagram, alphabet=ALPHABET, reversible: bool = False):
    """(step, result) pairs, shrinking moves first, ties by serialized result.

    With ``reversible`` only steps with an exact line-diagram inverse are kept.
    """
    out = []
    for step in candidate_steps(L, alphabet):
        try:
            R = apply_step(L, step)
        except MoveError:
            continue
        if reversible:
            try:
                back = inverse_step(L, step)
                if apply_step(R, back) != L:
                    continue
            except MoveError:
                continue
        out.append((_ORDER[step.name], serialize_lfd(R), step, R))
    out.sort(key=lambda t: t[:2])
    return [(step, R) for _, _, step, R in out]


def _trace(parents, key) -> list[tuple[LineDiagram, MoveStep]]:
    """(state before, step) pairs from the root to key."""
    path = []
    while parents[key][0] is not None:
        pkey, step, before = parents[key]
        path.append((before, step))
        key = pkey
    return path[::-1]


def search_equivalence(a: LineDiagram, b: LineDiagram, cfg: SearchConfig = SearchConfig()) -> SearchResult:
    """Certified move script from a to b of length at most cfg.depth, if found.

    Raises SearchBudgetExceeded when more than cfg.budget states are generated
    before the search space within the depth is used up.
    """
    counter = [0]

    def key(L):
        counter[0] += 1
        return _key(L, cfg.canonical, counter[0])

    ka, kb = key(a), key(b)
    states = {ka: a, kb: b}
    fwd = {ka: (None, None, None)}
    bwd = {kb: (None, None, None)}
    front_f, front_b = [ka], [kb]
    depth_f = depth_b = 0
    explored = 0

    def meet():
        back = {}
        for k in bwd:
            back.setdefault(_text(k), k)
        pairs = [(k, back[_text(k)]) for k in fwd if _text(k) in back]
        if not pairs:
            return None
        return min(pairs, key=lambda p: (len(_trace(fwd, p[0])) + len(_trace(bwd, p[1])), _text(p[0])))

    hit = (ka, kb) if _text(ka) == _text(kb) else None
    while hit is None and depth_f + depth_b < cfg.depth:
        # grow the smaller frontier
        forward = len(front_f) <= len(front_b)
        tree, front = (fwd, front_f) if forward else (bwd, front_b)
        new_front = []
        for k in front:
            for step, R in neighbors(states[k], cfg.alphabet, reversible=not forward):
                explored += 1
                if explored > cfg.budget:
                    raise SearchBudgetExceeded(f"search budget of {cfg.budget} states exceeded")
                kr = key(R)
                if kr in tree:
                    continue
                tree[kr] = (k, step, states[k])
                states[kr] = R
                new_front.append(kr)
        if forward:
            front_f, depth_f = new_front, depth_f + 1
        else:
            front_b, depth_b = new_front, depth_b + 1
        hit = meet()
        if not new_front and hit is None:
            break
    if hit is None:
        return SearchResult(None, explored)
    steps = [s for _, s in _trace(fwd, hit[0])]
    for before, step in reversed(_trace(bwd, hit[1])):
        steps.append(inverse_step(before, step))
    script = MoveScript(steps)
    if script.replay(a)[-1] != b:
        raise RuntimeError("joined script does not replay to the target")
    cert = certify(a, b, script)
    if not cert.ok:
        raise RuntimeError(f"joined script failed certification: {cert.message}")
    return SearchResult(script, explored, cert)


def hidden_script(a: LineDiagram, length: int, rng, alphabet=ALPHABET) -> MoveScript:
    """Random applicable script of the given length, for recovery tests."""
    steps = []
    cur = a
    for _ in range(length):
        opts = neighbors(cur, alphabet)
        if not opts:
            break
        step, cur = opts[rng.randrange(len(opts))]
        steps.append(step)
    return MoveScript(steps)
