import io
import json
from dataclasses import replace

import pytest

import mfhrr.cli as cli
from mfhrr.battery import battery_texts, builtin_battery
from mfhrr.chern import ScopeError, VerificationReport, scope_guard
from mfhrr.mf import validate_mf
from mfhrr.problem import ProblemError, parse_problem

D4_TEXT = """
# D4 singularity
name D4
ring x, y
w = x^3 + x*y^2
mf P = koszul(x, x^2 + y^2)
mf Q = shift(P)
endo a of P = [[x, 0], [0, x]]
endo b of P = [[1, 0], [0, 1]]
verify P P
verify P Q
cardy a b
"""


def run(*argv):
    out = io.StringIO()
    code = cli.run(list(argv), out)
    return code, out.getvalue()


@pytest.fixture
def d4_file(tmp_path):
    p = tmp_path / "d4.txt"
    p.write_text(D4_TEXT)
    return str(p)


def write(tmp_path, text, name="p.txt"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_verify_ok(d4_file):
    code, out = run("verify", d4_file)
    assert code == 0
    assert "2/2 equalities hold" in out


def test_verify_json_round_trip(d4_file):
    code, out = run("verify", d4_file, "--json")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 2
    reports = [VerificationReport.from_json(line) for line in lines]
    assert [(r.lhs, r.rhs) for r in reports] == [(2, 2), (-2, -2)]
    for line, r in zip(lines, reports):
        assert json.loads(r.to_json()) == json.loads(line)


def test_cardy_ok(d4_file):
    code, out = run("cardy", d4_file, "--json", "--method", "groebner")
    assert code == 0
    r = VerificationReport.from_json(out.strip())
    assert r.kind == "cardy" and r.equal and r.method == "groebner"


def test_failure_exit_code(d4_file, monkeypatch):
    real = cli.verify_hrr

    def broken(*a, **kw):
        r = real(*a, **kw)
        return replace(r, rhs=r.rhs + 1, equal=False)

    monkeypatch.setattr(cli, "verify_hrr", broken)
    code, out = run("verify", d4_file)
    assert code == 1
    assert "0/2 equalities hold" in out


def test_malformed_file(tmp_path, capsys):
    bad = write(tmp_path, "ring x, y\nw = x^3 + y^3\nmf P = koszul(x +, y)\nverify P P\n")
    code, _ = run("verify", bad)
    assert code == 2
    assert "line 3" in capsys.readouterr().err


@pytest.mark.parametrize("text, needle", [
    ("ring x\nw = x^3\nmf P = koszul(x, x)\nverify P P\n", "factorizes x^2, not w"),
    ("ring x, y\nw = x*y\nmf P = explicit{d1=[[x, 1], [0, x]], d0=[[y, 0], [0, y]]}\nverify P P\n",
     "not a matrix factorization"),
    ("ring x\nw = x^3\nmf P = koszul(x, x^2)\nverify P Q\n", "unknown name"),
    ("w = x^3\n", "before ring"),
    ("ring x\nw = x^3\nmf P = koszul(x, x^2)\nendo a of P = [[1]]\n", "shape"),
    ("ring x\nw = x^3\nfrobnicate\n", "cannot parse"),
])
def test_problem_errors(tmp_path, capsys, text, needle):
    code, _ = run("verify", write(tmp_path, text))
    assert code == 2
    assert needle in capsys.readouterr().err


def test_missing_file(capsys):
    code, _ = run("verify", "/nonexistent/problem.txt")
    assert code == 2
    assert "cannot read" in capsys.readouterr().err


def test_bad_arguments():
    assert run("verify")[0] == 2
    assert run("frobnicate")[0] == 2


def test_out_of_scope_w(tmp_path, capsys):
    f = write(tmp_path, "ring x\nw = x^2 + x^3\nmf P = koszul(x, x + x^2)\nverify P P\n")
    assert run("verify", f)[0] == 2
    assert "quasi-homogeneous" in capsys.readouterr().err


def test_non_closed_endomorphism(tmp_path, capsys):
    f = write(tmp_path, "ring x, y\nw = x*y\nmf K = koszul(x, y)\n"
                        "endo a of K = [[0, 1], [0, 0]]\ncardy a a\n")
    assert run("cardy", f)[0] == 2
    assert "not closed" in capsys.readouterr().err


def test_milnor_subcommand(tmp_path):
    f = write(tmp_path, "ring x, y\nw = x^3 + y^3\n")
    code, out = run("milnor", f, "--json")
    assert code == 0
    info = json.loads(out)
    assert info["mu"] == 4
    assert sorted(info["basis"]) == sorted(["1", "x", "y", "x*y"])
    assert info["hessian_residue"] == "4"
    code, out = run("milnor", f)
    assert "mu = 4" in out


def test_residue_subcommand(tmp_path):
    f = write(tmp_path, "ring x, y\nw = x^3 + y^3\n")
    code, out = run("residue", f, "x*y", "--json")
    assert code == 0
    assert json.loads(out)["residue"] == "1/9"
    assert run("residue", f, "x +")[0] == 2


def test_chern_subcommand(d4_file):
    code, out = run("chern", d4_file, "P", "--json")
    assert code == 0
    assert json.loads(out)["n"] == 2
    assert run("chern", d4_file, "Nope")[0] == 2


def test_ext_subcommand(d4_file):
    code, out = run("ext", d4_file, "P", "Q", "--json")
    assert code == 0
    d = json.loads(out)
    assert d["groebner"] == d["graded"]
    assert d["euler"] == -2


def test_calibration_report(d4_file):
    code, out = run("verify", d4_file, "--calibration-report")
    assert code == 0
    assert out.startswith("involution convention: plain")


def test_jobs_preserve_order(d4_file):
    serial = run("verify", d4_file, "--json")[1].splitlines()
    parallel = run("verify", d4_file, "--json", "--jobs", "2")[1].splitlines()
    strip = [{k: v for k, v in json.loads(s).items() if k != "elapsed_ms"} for s in serial]
    strip2 = [{k: v for k, v in json.loads(s).items() if k != "elapsed_ms"} for s in parallel]
    assert strip == strip2


def test_battery_manifest():
    problems = builtin_battery()
    assert len(problems) == len(battery_texts())
    kinds = [k for pf in problems for k, _, _ in pf.requests]
    assert kinds.count("verify") >= 12
    assert kinds.count("cardy") >= 4
    assert {pf.ring.nvars for pf in problems if any(k == "verify" for k, _, _ in pf.requests)} \
        == {1, 2, 3}


def test_battery_validates():
    for pf in builtin_battery():
        scope_guard(pf.w)
        for m in pf.mfs.values():
            assert validate_mf(m) is None
        for _, (of, a) in pf.endos.items():
            assert a.shape == (pf.mfs[of].rank, pf.mfs[of].rank)


def test_scope_guard_rejects():
    pf = parse_problem("ring x, y\nw = x^2*y^2\n")
    with pytest.raises(ScopeError):
        scope_guard(pf.w)


def test_problem_name_and_comments():
    pf = parse_problem(D4_TEXT)
    assert pf.name == "D4"
    assert pf.requests == [("verify", "P", "P"), ("verify", "P", "Q"), ("cardy", "a", "b")]
    with pytest.raises(ProblemError):
        pf.mf("Z")
