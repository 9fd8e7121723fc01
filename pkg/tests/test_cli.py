import pytest
from click.testing import CliRunner

from lefkit.braider import flatten
from lefkit.cli import main
from lefkit.gen import Bounds, gen_random
from lefkit.linediagram import hopf_diagram, parse_lfd, serialize_lfd, worked_example
from lefkit.rectdiagram import parse_rect, serialize_rect


@pytest.fixture
def run():
    runner = CliRunner()

    def go(*args, env=None):
        return runner.invoke(main, [str(a) for a in args], env=env, catch_exceptions=False)

    return go


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return p

    return write


def test_gen_is_seeded(run):
    a = run("gen", "--seed", 7)
    b = run("gen", "--seed", 7)
    assert a.exit_code == 0 and a.output == b.output
    assert a.output.startswith("# seed 7\n")
    c = run("gen", "--seed", 1, env={"LEFKIT_SEED": "7"})
    assert c.output == a.output
    parse_lfd(a.output)


def test_validate(run, files):
    assert run("validate", files("h.lfd", serialize_lfd(hopf_diagram()))).output == "valid\n"
    D = flatten(hopf_diagram())
    r = run("validate", files("h.rect", serialize_rect(D)))
    assert r.exit_code == 0
    # well formed, but the band from 1 to 3 through 2 needs (1 3) on sheet 3
    bad = "lfd 1\ndegree 3\nsheets 3\nlabel 1 (1 2)\nlabel 2 (2 3)\nlabel 3 (1 2)\nband 1 3 + t\n"
    r = run("validate", files("bad.lfd", bad))
    assert r.exit_code == 1 and "inconsistent" in r.output


def test_syntax_errors_exit_2(run, files):
    r = run("validate", files("t.lfd", "lfd 1\ndegree x\n"))
    assert r.exit_code == 2 and "line 2" in r.output
    assert run("validate", files("t.rect", "rect 1\ndegree 2\ncell 0 0 z 0\n")).exit_code == 2
    text = "lfd 1\ndegree 2\nsheets 3\nlabel 1 (1 2)\nlabel 2 (1 2)\nlabel 3 (1 2)\nband 1 3 + x\n"
    assert run("validate", files("p.lfd", text)).exit_code == 2


def test_braid_and_flatten(run, files, tmp_path):
    L = gen_random(11, Bounds(3, 6, 5))
    src = files("a.lfd", serialize_lfd(L))
    out = tmp_path / "a.rect"
    assert run("flatten", src, "-o", out).exit_code == 0
    r = run("braid", out)
    assert r.exit_code == 0 and parse_lfd(r.output) == L
    # braid wants a rectangular diagram
    assert run("braid", src).exit_code == 1


def test_flatten_refuses_general_bands(run, files):
    assert run("flatten", files("w.lfd", serialize_lfd(worked_example()))).exit_code == 1


def test_monotonize(run, files):
    r = run("monotonize", files("w.lfd", serialize_lfd(worked_example())))
    assert r.exit_code == 0
    body, script = r.output.split("# script\n")
    M = parse_lfd(body)
    assert "bandw" not in body and M.m == 7
    assert [ln.split()[0] for ln in script.splitlines()] == ["S", "slide"]


def test_move_S_writes_file_and_report(run, files):
    r = run("move", files("h.lfd", serialize_lfd(hopf_diagram())), "--move", "S+", "--site", "sheet=1")
    assert r.exit_code == 0
    L = parse_lfd(r.output)
    assert (L.m, L.n) == (3, 2)
    report = [ln for ln in r.output.splitlines() if ln.startswith("# ")]
    assert len(report) == 1 and report[0].startswith("# ok   S ") and "h1_W=ok" in report[0]


def test_move_P_and_output_file(run, files, tmp_path):
    out = tmp_path / "p.lfd"
    r = run("move", files("h.lfd", serialize_lfd(hopf_diagram())), "--move", "P-", "--site", "i=1", "-o", out)
    assert r.exit_code == 0 and "dchi=+1" in r.output
    assert parse_lfd(out.read_text()).n == 4


def test_move_on_presentation_prints_report(run, files):
    r = run("move", files("h.lfd", serialize_lfd(hopf_diagram())), "--move", "U", "--site", "vertex=1")
    assert r.exit_code == 0 and "euler_W: 1" in r.output and "# ok   U" in r.output


def test_move_rect(run, files):
    D = flatten(gen_random(4, Bounds(3, 5, 4)))
    r = run("move", files("d.rect", serialize_rect(D)), "--move", "stab", "--site", "i=1")
    assert r.exit_code == 0
    assert parse_rect(r.output).degree == D.degree + 1
    assert "# valid: true" in r.output


def test_move_errors(run, files):
    h = files("h.lfd", serialize_lfd(hopf_diagram()))
    assert run("move", h, "--move", "jump").exit_code == 2
    assert run("move", h, "--move", "slide", "--site", "i=1").exit_code == 1
    assert run("move", h, "--move", "S+", "--site", "1").exit_code == 2


def test_invariants_golden(run, files):
    r = run("invariants", files("h.lfd", serialize_lfd(hopf_diagram())))
    assert r.exit_code == 0
    assert r.output == (
        "euler_W: 1\nh1_W: 0\nh1_F: 1\nh1_boundary: 0\ntotal_matrix: [1]\n"
        "euler_class: 0\neuler_mod2: 0\nallowable: true\n"
    )


def test_certify(run, files):
    L = gen_random(3, Bounds(3, 6, 4))
    a = files("a.lfd", serialize_lfd(L))
    script = files("s.txt", "slide i=1 dir=right\nslide i=1 dir=left\n")
    r = run("certify", a, a, script)
    assert r.exit_code == 0 and r.output.endswith("certified: true\n")
    wrong = files("w.txt", "S sheet=1 sign=1\n")
    assert run("certify", a, a, wrong).exit_code == 1
    assert run("certify", a, a, files("x.txt", "slide i\n")).exit_code == 2


def test_search(run, files):
    L = gen_random(3, Bounds(3, 5, 4))
    a = files("a.lfd", serialize_lfd(L))
    b = run("move", a, "--move", "S-", "--site", "sheet=2")
    bf = files("b.lfd", b.output)
    r = run("search", a, bf)
    assert r.exit_code == 0 and r.output.startswith("# length 1")
    far = files("f.lfd", serialize_lfd(gen_random(9, Bounds(4, 8, 8), exact=True)))
    assert run("search", a, far, "--depth", 1).exit_code == 1
    assert run("search", a, far, "--budget", 2).exit_code == 1


def test_selftest(run):
    r = run("selftest", "--cases", 5)
    assert r.exit_code == 0
    assert all(ln.startswith(("PASS", "seed")) for ln in r.output.splitlines())
