"""Command line front end.

Exit codes: 0 success, 1 semantic failure, 2 syntax error.
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

import click

from . import gen as genmod
from .braider import braid_up, flatten, monotonize
from .invariants import certify as certify_script
from .invariants import report
from .linediagram import DiagramError, LfdSyntaxError, LineDiagram, check_labels, parse_lfd, serialize_lfd
from .moves import LD_MOVES, LF_MOVES, MoveError, MoveScript, apply_step, parse_script, parse_step
from .rectdiagram import (
    MoveInstance,
    RectDiagram,
    RectError,
    RectSyntaxError,
    apply_rect_move,
    handle_euler,
    parse_rect,
    serialize_rect,
    validate as validate_rect,
)
from .search import SearchBudgetExceeded, SearchConfig, search_equivalence

OK, FAIL, SYNTAX = 0, 1, 2


class Failure(Exception):
    def __init__(self, msg: str, code: int = FAIL):
        super().__init__(msg)
        self.code = code


def _read(path: str):
    """Parse a .rect or .lfd file, by extension or header."""
    text = Path(path).read_text(encoding="utf-8")
    head = text.lstrip().split("\n", 1)[0].strip()
    try:
        if path.endswith(".rect") or head.startswith("rect"):
            return parse_rect(text)
        return parse_lfd(text)
    except (LfdSyntaxError, RectSyntaxError) as exc:
        raise Failure(f"{path}: {exc}", SYNTAX) from None


def _read_lfd(path: str) -> LineDiagram:
    x = _read(path)
    if not isinstance(x, LineDiagram):
        raise Failure(f"{path}: expected a line diagram")
    return x


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _params(tokens) -> dict:
    out = {}
    for tok in tokens:
        key, eq, val = tok.partition("=")
        if not eq:
            raise Failure(f"bad parameter {tok!r}, expected key=value", SYNTAX)
        try:
            out[key] = int(val)
        except ValueError:
            out[key] = val
    return out


def _run(fn):
    """Map library errors onto the exit code contract."""
    try:
        fn()
    except Failure as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(exc.code)
    except (DiagramError, RectError, MoveError, SearchBudgetExceeded) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(FAIL)


@click.group()
def main():
    """Lefschetz fibration presentations: diagrams, moves and invariants."""


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
def validate(path):
    """Check a .rect or .lfd file."""

    def go():
        x = _read(path)
        if isinstance(x, RectDiagram):
            rep = validate_rect(x)
            click.echo(str(rep), nl=False)
            if not rep.ok:
                raise Failure("invalid diagram")
        else:
            if not check_labels(x):
                click.echo("labels inconsistent with bands")
                raise Failure("invalid diagram")
            click.echo("valid")

    _run(go)


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", default=None, help="Write the line diagram here.")
def braid(path, output):
    """Braid a rectangular diagram into a line diagram."""

    def go():
        D = _read(path)
        if not isinstance(D, RectDiagram):
            raise Failure(f"{path}: expected a rectangular diagram")
        _emit(serialize_lfd(braid_up(D)), output)

    _run(go)


@main.command(name="flatten")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", default=None, help="Write the rectangular diagram here.")
def flatten_cmd(path, output):
    """Flatten a line diagram with monotonic bands."""
    _run(lambda: _emit(serialize_rect(flatten(_read_lfd(path))), output))


@main.command(name="monotonize")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
def monotonize_cmd(path):
    """Stabilize and slide until every band is monotonic."""

    def go():
        M, script = monotonize(_read_lfd(path))
        click.echo(serialize_lfd(M), nl=False)
        click.echo("# script")
        if len(script):
            click.echo(str(script))

    _run(go)


# short names with the sign or variant folded in
_MOVE_ALIASES = {"S+": ("S", {"sign": 1}), "S-": ("S", {"sign": -1}), "P+": ("P", {"variant": "+"}), "P-": ("P", {"variant": "-"})}


def _site_tokens(site) -> list[str]:
    return [tok for chunk in site for tok in chunk.split()]


def _comment(text: str) -> str:
    return "".join(f"# {ln}\n" for ln in text.splitlines())


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--move", "name", required=True, help="S+, S-, T, U, P+, P-, Q, slide, or any other move name.")
@click.option("--site", multiple=True, help="Site parameters as key=value; repeatable.")
@click.option("-o", "--output", default=None, help="Write the rewritten file here.")
def move(path, name, site, output):
    """Apply one move and report the invariants it is meant to keep.

    Example: `move x.lfd --move S+ --site sheet=1`.  The report follows the
    rewritten file as comment lines, or goes alone to stdout with -o.
    """

    def go():
        x = _read(path)
        tokens = _site_tokens(site)
        if isinstance(x, RectDiagram):
            pos = tuple(int(t) for t in tokens if "=" not in t)
            kw = _params(t for t in tokens if "=" in t)
            y = apply_rect_move(x, MoveInstance.make(name, *pos, **kw))
            rep = validate_rect(y)
            text = f"valid: {str(rep.ok).lower()}\nhandle_euler: {handle_euler(x)} -> {handle_euler(y)}\n"
            body = serialize_rect(y)
        else:
            base, extra = _MOVE_ALIASES.get(name, (name, {}))
            if base not in LD_MOVES | LF_MOVES:
                raise Failure(f"unknown move {name!r}", SYNTAX)
            bad = [t for t in tokens if "=" not in t]
            if bad:
                raise Failure(f"bad site parameter {bad[0]!r}, expected key=value", SYNTAX)
            step = parse_step(" ".join([base] + [f"{k}={v}" for k, v in extra.items()] + tokens))
            y = apply_step(x, step)
            cert = certify_script(x, y, MoveScript([step]))
            text = cert.steps[0].render() + "\n"
            # presentations have no file format, so their invariants stand in for the file
            body = serialize_lfd(y) if isinstance(y, LineDiagram) else report(y).render()
        if output:
            Path(output).write_text(body, encoding="utf-8")
            click.echo(text, nl=False)
        else:
            click.echo(body + _comment(text), nl=False)

    _run(go)


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
def invariants(path):
    """Print the invariants of the fibration of a line diagram."""
    from .fiber import lf_from_linediagram

    _run(lambda: click.echo(report(lf_from_linediagram(_read_lfd(path))).render(), nl=False))


@main.command()
@click.argument("src", type=click.Path(exists=True, dir_okay=False))
@click.argument("dst", type=click.Path(exists=True, dir_okay=False))
@click.argument("script", type=click.Path(exists=True, dir_okay=False))
def certify(src, dst, script):
    """Replay a move script and check the invariant contract of each step."""

    def go():
        a, b = _read_lfd(src), _read_lfd(dst)
        try:
            sc = parse_script(Path(script).read_text(encoding="utf-8"))
        except MoveError as exc:
            raise Failure(f"{script}: {exc}", SYNTAX) from None
        cert = certify_script(a, b, sc)
        click.echo(cert.render(), nl=False)
        if not cert.ok:
            raise Failure("certification failed")

    _run(go)


@main.command()
@click.argument("a", type=click.Path(exists=True, dir_okay=False))
@click.argument("b", type=click.Path(exists=True, dir_okay=False))
@click.option("--depth", default=3, show_default=True)
@click.option("--budget", default=200_000, show_default=True)
@click.option("--moves", default=",".join(SearchConfig().alphabet), show_default=True)
@click.option("--no-canonical", is_flag=True, help="Do not merge equal states.")
def search(a, b, depth, budget, moves, no_canonical):
    """Look for a certified move script from A to B."""

    def go():
        cfg = SearchConfig(tuple(m for m in moves.split(",") if m), depth, budget, not no_canonical)
        res = search_equivalence(_read_lfd(a), _read_lfd(b), cfg)
        if not res.found:
            raise Failure(f"no script within depth {depth} ({res.explored} states explored)")
        click.echo(f"# length {len(res.script)}, {res.explored} states explored")
        if len(res.script):
            click.echo(str(res.script))

    _run(go)


@main.command()
@click.option("--seed", default=0, show_default=True, help="Overridden by LEFKIT_SEED.")
@click.option("--degree", default=3, show_default=True)
@click.option("--sheets", default=6, show_default=True)
@click.option("--bands", default=6, show_default=True)
@click.option("-o", "--output", default=None)
def gen(seed, degree, sheets, bands, output):
    """Random labeled line diagram with monotonic bands."""
    s = genmod.default_seed(seed)
    L = genmod.gen_random(s, genmod.Bounds(degree, sheets, bands))
    _emit(f"# seed {s}\n" + serialize_lfd(L), output)


@main.command()
@click.option("--cases", default=20, show_default=True)
def selftest(cases):
    """Quick consistency checks on seeded random diagrams."""
    from .fiber import lf_from_linediagram
    from .linediagram import worked_example
    from .search import hidden_script

    seed = genmod.default_seed(0)
    rng = random.Random(seed)
    results = []

    def check(name, ok):
        results.append(ok)
        click.echo(f"{'PASS' if ok else 'FAIL'} {name}")

    Ls = [genmod.gen_random(rng.randrange(1 << 30), genmod.Bounds(4, 8, 10)) for _ in range(cases)]
    check("serialize/parse round trip", all(parse_lfd(serialize_lfd(L)) == L for L in Ls))
    check("braid_up(flatten(L)) == L", all(braid_up(flatten(L)) == L for L in Ls))
    check("flatten output is valid", all(validate_rect(flatten(L)).ok for L in Ls))
    check("labels consistent", all(check_labels(L) for L in Ls))
    W = worked_example()
    check("worked example monotonic pattern", [hasattr(b, "pattern") for b in W.bands] == [True, True, True, False])
    M, sc = monotonize(W)
    check("monotonize worked example", all(hasattr(b, "pattern") for b in M.bands) and certify_script(W, M, sc).ok)
    ok = True
    for _ in range(5):
        small = genmod.gen_random(rng.randrange(1 << 30), genmod.Bounds(3, 4, 3))
        b = hidden_script(small, 2, rng).replay(small)[-1]
        res = search_equivalence(small, b, SearchConfig(depth=2))
        ok &= res.found and res.certificate.ok
    check("search recovers hidden scripts", ok)
    check("fiber euler characteristic", all(lf_from_linediagram(L).fiber.euler_char == L.degree - L.m for L in Ls))
    click.echo(f"seed {seed}")
    sys.exit(OK if all(results) else FAIL)


if __name__ == "__main__":
    main()
