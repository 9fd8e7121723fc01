"""Handlebody and boundary invariants of fibration presentations."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fiber import FiberSurface, LFPresentation, identity_matrix, imat


# ---------------------------------------------------------------- Smith normal form


def _as_rows(A) -> list[list[int]]:
    A = np.asarray(A, dtype=object)
    if A.ndim == 1:
        A = A.reshape(len(A), 1)
    return [[int(x) for x in row] for row in A]


def smith_normal_form(A):
    """Return (D, U, V) with U * A * V = D diagonal, U and V unimodular.

    Pivots are chosen as the entry of least absolute value, first in
    row-major order, so the output is deterministic.
    """
    M = _as_rows(A)
    r = len(M)
    c = len(M[0]) if r else 0
    U = [[int(i == j) for j in range(r)] for i in range(r)]
    V = [[int(i == j) for j in range(c)] for i in range(c)]

    def swap_rows(X, i, j):
        X[i], X[j] = X[j], X[i]

    def swap_cols(X, i, j):
        for row in X:
            row[i], row[j] = row[j], row[i]

    def add_row(X, src, dst, k):
        X[dst] = [a + k * b for a, b in zip(X[dst], X[src])]

    def add_col(X, src, dst, k):
        for row in X:
            row[dst] += k * row[src]

    t = 0
    while t < min(r, c):
        nz = [(abs(M[i][j]), i, j) for i in range(t, r) for j in range(t, c) if M[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        swap_rows(M, t, pi)
        swap_rows(U, t, pi)
        swap_cols(M, t, pj)
        swap_cols(V, t, pj)
        done = False
        while not done:
            done = True
            p = M[t][t]
            for i in range(t + 1, r):
                if M[i][t]:
                    q = M[i][t] // p
                    add_row(M, t, i, -q)
                    add_row(U, t, i, -q)
                    if M[i][t]:
                        swap_rows(M, t, i)
                        swap_rows(U, t, i)
                        done = False
                        break
            if not done:
                continue
            p = M[t][t]
            for j in range(t + 1, c):
                if M[t][j]:
                    q = M[t][j] // p
                    add_col(M, t, j, -q)
                    add_col(V, t, j, -q)
                    if M[t][j]:
                        swap_cols(M, t, j)
                        swap_cols(V, t, j)
                        done = False
                        break
            if not done:
                continue
            # the pivot must divide the rest of the block
            p = M[t][t]
            bad = next(((i, j) for i in range(t + 1, r) for j in range(t + 1, c) if M[i][j] % p), None)
            if bad is not None:
                add_row(M, bad[0], t, 1)
                add_row(U, bad[0], t, 1)
                done = False
        if M[t][t] < 0:
            M[t] = [-x for x in M[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return M, U, V


def invariant_factors(A) -> list[int]:
    D, _, _ = smith_normal_form(A)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i]]


@dataclass(frozen=True)
class AbelianGroup:
    rank: int
    torsion: tuple[int, ...] = ()

    def __str__(self) -> str:
        parts = [f"Z/{t}" for t in self.torsion]
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        return " + ".join(parts) if parts else "0"

    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion


def cokernel(A, rows: int) -> AbelianGroup:
    """Z^rows modulo the column span of A."""
    if rows == 0:
        return AbelianGroup(0)
    A = np.asarray(A, dtype=object).reshape(rows, -1)
    if A.shape[1] == 0:
        return AbelianGroup(rows)
    f = invariant_factors(A)
    return AbelianGroup(rows - len(f), tuple(x for x in f if x > 1))


def in_column_span(v, A) -> bool:
    v = [int(x) for x in v]
    n = len(v)
    if n == 0:
        return True
    A = np.asarray(A, dtype=object).reshape(n, -1)
    if A.shape[1] == 0:
        return not any(v)
    D, U, _ = smith_normal_form(A)
    y = [sum(U[i][j] * v[j] for j in range(n)) for i in range(n)]
    for i in range(n):
        d = D[i][i] if i < len(D[0]) else 0
        if d == 0:
            if y[i]:
                return False
        elif y[i] % d:
            return False
    return True


# ---------------------------------------------------------------- handle counts and H1


def euler_char_W(x) -> int:
    from .linediagram import LineDiagram

    if isinstance(x, LineDiagram):
        return x.degree - x.m + x.n
    return x.fiber.euler_char + x.n


def h1_W(P: LFPresentation) -> AbelianGroup:
    return cokernel(P.cycle_matrix(), P.fiber.rank)


# ---------------------------------------------------------------- Euler class


def coboundary(P: LFPresentation) -> np.ndarray:
    """Transpose of the cycle matrix: images of H^1(F) in the 2-cochains."""
    return P.cycle_matrix().T.reshape(P.n, P.fiber.rank)


@dataclass(frozen=True)
class EulerClass:
    coords: tuple[int, ...]
    moduli: tuple[int, ...]  # 0 marks a free coordinate
    mod2: tuple[int, ...]

    def __str__(self) -> str:
        if not self.coords:
            return "0"
        return " ".join(f"{c}" if m == 0 else f"{c}/{m}" for c, m in zip(self.coords, self.moduli))


def _gf2_reduce(v, gens) -> tuple[int, ...]:
    """Canonical representative of v modulo the GF(2) span of gens."""
    basis: list[tuple[int, list[int]]] = []
    for g in gens:
        g = [x % 2 for x in g]
        for piv, b in basis:
            if g[piv]:
                g = [(x + y) % 2 for x, y in zip(g, b)]
        if any(g):
            piv = g.index(1)
            basis = [(p, [(x + y) % 2 for x, y in zip(b, g)] if b[piv] else b) for p, b in basis]
            basis.append((piv, g))
    v = [x % 2 for x in v]
    for piv, b in basis:
        if v[piv]:
            v = [(x + y) % 2 for x, y in zip(v, b)]
    return tuple(v)


def euler_class(P: LFPresentation) -> EulerClass:
    """The rotation cocycle reduced modulo coboundaries."""
    n = P.n
    eps = P.rotations()
    if n == 0:
        return EulerClass((), (), ())
    B = coboundary(P)
    if P.fiber.rank == 0:
        return EulerClass(tuple(eps), (0,) * n, tuple(x % 2 for x in eps))
    D, U, _ = smith_normal_form(B)
    y = [sum(U[i][j] * eps[j] for j in range(n)) for i in range(n)]
    coords, moduli = [], []
    for i in range(n):
        d = D[i][i] if i < len(D[0]) else 0
        if d == 1:
            continue
        coords.append(y[i] % d if d else y[i])
        moduli.append(d)
    cols = [[B[i][j] for i in range(n)] for j in range(B.shape[1])]
    return EulerClass(tuple(coords), tuple(moduli), _gf2_reduce(eps, cols))


def euler_difference_in(P: LFPresentation, cochain, multiple: int = 1) -> bool:
    """Whether a 2-cochain lies in multiple * H^2(W), i.e. is cohomologous to such."""
    n = P.n
    if n == 0:
        return True
    gens = [list(col) for col in np.asarray(coboundary(P), dtype=object).T] if P.fiber.rank else []
    gens += [[multiple * int(i == j) for i in range(n)] for j in range(n)] if multiple else []
    if not gens:
        return not any(cochain)
    A = imat(gens).T.reshape(n, len(gens))
    return in_column_span(list(cochain), A)


# ---------------------------------------------------------------- boundary open book


@dataclass(frozen=True)
class OpenBook:
    """Page with the homological data of the boundary monodromy.

    ``variation`` has one column per edge co-core arc a_e: the absolute class
    phi(a_e) - a_e, which is what the binding contributes to H_1.
    """

    fiber: FiberSurface
    total_matrix: np.ndarray
    variation: np.ndarray

    def __eq__(self, other):
        return (
            isinstance(other, OpenBook)
            and self.fiber == other.fiber
            and self.total_matrix.shape == other.total_matrix.shape
            and bool((self.total_matrix == other.total_matrix).all())
            and bool((self.variation == other.variation).all())
        )


def basis_chains(F: FiberSurface) -> np.ndarray:
    """m x r matrix of edge chains of the basis cycles."""
    out = np.zeros((F.m, F.rank), dtype=object)
    for j, c in enumerate(F.basis):
        for e, s in c.steps:
            out[e - 1, j] += s
    return out


def total_matrix(P: LFPresentation) -> np.ndarray:
    F = P.fiber
    M = identity_matrix(F.rank)
    for t in P.twists:
        M = M.dot(F.twist_matrix(t.vector(), t.sign))
    return M


def variation_matrix(P: LFPresentation) -> np.ndarray:
    F = P.fiber
    B = basis_chains(F)
    r = F.rank
    var = np.zeros((r, F.m), dtype=object)
    prefix = identity_matrix(r)
    for t in P.twists:
        c = t.vector()
        edge_coef = B.dot(c) if r else np.zeros(F.m, dtype=object)
        pc = prefix.dot(c)
        for e in range(F.m):
            if edge_coef[e]:
                for i in range(r):
                    var[i, e] += t.sign * edge_coef[e] * pc[i]
        prefix = prefix.dot(F.twist_matrix(c, t.sign))
    return var


def boundary_openbook(P: LFPresentation) -> OpenBook:
    return OpenBook(P.fiber, total_matrix(P), variation_matrix(P))


def h1_boundary(ob: OpenBook) -> AbelianGroup:
    return cokernel(ob.variation, ob.fiber.rank)


# ---------------------------------------------------------------- report


@dataclass
class InvariantReport:
    euler_W: int
    h1_W: AbelianGroup
    h1_F: int
    h1_boundary: AbelianGroup
    total_matrix: np.ndarray
    euler_class: EulerClass
    euler_mod2: tuple[int, ...]
    allowable: bool

    def render(self) -> str:
        tm = ";".join(",".join(str(x) for x in row) for row in self.total_matrix.tolist())
        lines = [
            f"euler_W: {self.euler_W}",
            f"h1_W: {self.h1_W}",
            f"h1_F: {self.h1_F}",
            f"h1_boundary: {self.h1_boundary}",
            f"total_matrix: [{tm}]",
            f"euler_class: {self.euler_class}",
            f"euler_mod2: {''.join(map(str, self.euler_mod2)) or '-'}",
            f"allowable: {str(self.allowable).lower()}",
        ]
        return "\n".join(lines) + "\n"


def report(P: LFPresentation) -> InvariantReport:
    ec = euler_class(P)
    return InvariantReport(
        euler_W=euler_char_W(P),
        h1_W=h1_W(P),
        h1_F=P.fiber.rank,
        h1_boundary=h1_boundary(boundary_openbook(P)),
        total_matrix=total_matrix(P),
        euler_class=ec,
        euler_mod2=ec.mod2,
        allowable=P.allowable,
    )


# ---------------------------------------------------------------- certification


@dataclass
class StepCheck:
    step: str
    ok: bool
    checks: dict[str, bool] = field(default_factory=dict)
    chi_delta: int = 0
    message: str = ""

    def render(self) -> str:
        marks = " ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in self.checks.items())
        tail = f" ({self.message})" if self.message else ""
        return f"{'ok  ' if self.ok else 'FAIL'} {self.step} dchi={self.chi_delta:+d} {marks}{tail}"


@dataclass
class Certificate:
    ok: bool
    steps: list[StepCheck]
    chi_delta: int
    final_match: bool
    message: str = ""

    def render(self) -> str:
        lines = [s.render() for s in self.steps]
        lines.append(f"final_match: {str(self.final_match).lower()}")
        lines.append(f"chi_delta: {self.chi_delta:+d}")
        if self.message:
            lines.append(f"message: {self.message}")
        lines.append(f"certified: {str(self.ok).lower()}")
        return "\n".join(lines) + "\n"


# expected change of chi(W) and which invariants each move must keep
_MOVE_RULES = {
    "slide": (0, ("h1_W", "openbook", "euler")),
    "tslide": (0, ("h1_W", "openbook", "euler")),
    "S": (0, ("h1_W", "h1_boundary", "euler", "allowable")),
    "Sinv": (0, ("h1_W", "h1_boundary", "euler", "allowable")),
    "cstab": (0, ("h1_W", "h1_boundary", "euler")),
    "cdestab": (0, ("h1_W", "h1_boundary", "euler")),
    "T": (0, ("h1_W", "h1_boundary", "euler2")),
    "U": (0, ("h1_W", "h1_boundary", "euler2")),
    "Uinv": (0, ("h1_W", "h1_boundary", "euler2")),
    "Q": (2, ("openbook",)),
    "Qinv": (-2, ("openbook",)),
    "P": (1, ("h1_W", "h1_boundary")),
    "Pinv": (-1, ("h1_W", "h1_boundary")),
}


def _insert_map(n_small: int, positions) -> np.ndarray:
    """(n_small + k) x n_small matrix inserting zero coordinates at the positions."""
    positions = sorted(positions)
    n = n_small + len(positions)
    keep = [j for j in range(1, n + 1) if j not in positions]
    out = np.zeros((n, n_small), dtype=object)
    for col, j in enumerate(keep):
        out[j - 1, col] = 1
    return out


def _orientation_signs(P_hat: LFPresentation, P1: LFPresentation) -> list[int] | None:
    """Per twist, +1 or -1 aligning P1 with a predicted presentation."""
    out = []
    for a, b in zip(P_hat.twists, P1.twists):
        if a.cls == b.cls and (any(a.cls) or a.rot == b.rot):
            out.append(1)
        elif a.cls == tuple(-x for x in b.cls) and (any(a.cls) or a.rot == -b.rot):
            out.append(-1)
        else:
            return None
    return out


def _slide_map(n: int, i: int, k: int, direction: str) -> np.ndarray:
    M = identity_matrix(n)
    M[i - 1, :] = 0
    M[i, :] = 0
    if direction == "right":
        M[i - 1, i] = 1
        M[i - 1, i - 1] = k
        M[i, i - 1] = 1
    else:
        M[i - 1, i] = 1
        M[i, i - 1] = 1
        M[i, i] = k
    return M


def euler_compatible(P_to: LFPresentation, P_from: LFPresentation, phi, multiple: int = 0) -> bool:
    """Whether eps(P_to) - phi(eps(P_from)) lies in the coboundaries (+ multiple * Z^n)."""
    e0 = imat(P_from.rotations()).reshape(P_from.n)
    e1 = imat(P_to.rotations()).reshape(P_to.n)
    diff = e1 - np.asarray(phi, dtype=object).reshape(P_to.n, P_from.n).dot(e0) if P_from.n else e1
    return euler_difference_in(P_to, [int(x) for x in diff], multiple)


def _euler_check(step, P0: LFPresentation, P1: LFPresentation, multiple: int) -> tuple[bool, str]:
    from .moves import twist_slide

    g = step.get
    name = step.name
    if name in ("slide", "tslide"):
        i, direction = g("i"), g("dir", "right")
        P_hat = twist_slide(P0, i, direction)
        sig = _orientation_signs(P_hat, P1)
        if sig is None:
            return False, "slid classes differ from the homological prediction"
        A, B = P0.twists[i - 1], P0.twists[i]
        F = P0.fiber
        k = A.sign * F.pairing(B.vector(), A.vector()) if direction == "right" else -B.sign * F.pairing(
            A.vector(), B.vector()
        )
        phi = np.diag(imat(sig).reshape(P0.n)).dot(_slide_map(P0.n, i, k, direction))
        return euler_compatible(P1, P0, phi, multiple), ""
    if name in ("S", "U"):
        idx = g("index") or P0.n + 1
        pos = [idx] if name == "S" else [idx, idx + 1]
        return euler_compatible(P1, P0, _insert_map(P0.n, pos), multiple), ""
    if name in ("Sinv", "Uinv"):
        idx = g("band") if name == "Sinv" else g("index")
        pos = [idx] if name == "Sinv" else [idx, idx + 1]
        return euler_compatible(P0, P1, _insert_map(P1.n, pos), multiple), ""
    return euler_compatible(P1, P0, identity_matrix(P0.n), multiple), ""


def certify(src, dst, script) -> Certificate:
    """Replay a move script from src, checking every step, and compare with dst."""
    from .moves import MoveError, as_presentation, apply_step
    from .braidcore import BraidError

    steps: list[StepCheck] = []
    state = src
    total = 0
    ok = True
    for step in script:
        try:
            nxt = apply_step(state, step)
            P0, P1 = as_presentation(state), as_presentation(nxt)
        except (MoveError, BraidError, ValueError) as exc:
            steps.append(StepCheck(str(step), False, message=str(exc)))
            return Certificate(False, steps, total, False, "replay failed")
        want, keep = _MOVE_RULES[step.name]
        dchi = euler_char_W(P1) - euler_char_W(P0)
        checks = {"chi": dchi == want}
        msg = ""
        if "h1_W" in keep:
            checks["h1_W"] = h1_W(P0) == h1_W(P1)
        if "openbook" in keep:
            checks["openbook"] = boundary_openbook(P0) == boundary_openbook(P1)
        if "h1_boundary" in keep:
            checks["h1_boundary"] = h1_boundary(boundary_openbook(P0)) == h1_boundary(boundary_openbook(P1))
        if "euler" in keep or "euler2" in keep:
            checks["euler"], msg = _euler_check(step, P0, P1, 0 if "euler" in keep else 2)
        if "allowable" in keep:
            checks["allowable"] = P0.allowable == P1.allowable
        good = all(checks.values())
        ok &= good
        total += dchi
        steps.append(StepCheck(str(step), good, checks, dchi, msg))
        state = nxt
    final = _same_state(state, dst)
    return Certificate(ok and final, steps, total, final)


def _same_state(a, b) -> bool:
    from .linediagram import LineDiagram
    from .moves import as_presentation

    if isinstance(a, LineDiagram) and isinstance(b, LineDiagram):
        return a == b
    Pa, Pb = as_presentation(a), as_presentation(b)
    return Pa.fiber == Pb.fiber and [(t.cls, t.sign, t.rot) for t in Pa.twists] == [
        (t.cls, t.sign, t.rot) for t in Pb.twists
    ]
