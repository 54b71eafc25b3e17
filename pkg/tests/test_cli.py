import json

import pytest

from dkb import cli
from dkb.cli import EXIT_INVALID, EXIT_OK, EXIT_REFUSED, main

from conftest import DATA, GOLDEN


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check(capsys):
    code, out, _ = run(capsys, "check", DATA / "dept.dkb")
    assert code == EXIT_OK and out.strip() == "exception-safe, chain bound 1"
    code, out, _ = run(capsys, "check", DATA / "supervisor.dkb")
    assert code == EXIT_REFUSED and "SKOLEM" in out and "recursive" in out
    code, out, _ = run(capsys, "check", DATA / "malformed.dkb")
    assert code == EXIT_INVALID and "malformed.dkb:1:" in out
    code, _, _ = run(capsys, "check", DATA / "missing.dkb")
    assert code == EXIT_INVALID


def test_check_verbose(capsys):
    code, out, _ = run(capsys, "check", "-v", DATA / "dept.dkb")
    assert code == EXIT_OK and "=> " in out


def test_compile(capsys, tmp_path):
    target = tmp_path / "dept.lp"
    code, _, _ = run(capsys, "compile", DATA / "dept.dkb", "-o", target)
    assert code == EXIT_OK
    assert target.read_bytes() == (GOLDEN / "dept.lp").read_bytes()
    code, out, _ = run(capsys, "compile", DATA / "empty.dkb")
    assert code == EXIT_OK and ":-" in out
    assert not any(l.startswith("const(") for l in out.splitlines())
    code, _, err = run(capsys, "compile", DATA / "supervisor.dkb")
    assert code == EXIT_REFUSED and "not exception-safe" in err


def test_models(capsys):
    code, out, _ = run(capsys, "models", DATA / "dept.dkb")
    assert code == EXIT_OK
    assert out.startswith("1 model(s)")
    assert "override: DeptMember ⊑ ∃hasCourse @ bob" in out
    code, out, _ = run(capsys, "models", DATA / "nixon.dkb")
    assert out.startswith("2 model(s)")
    code, out, _ = run(capsys, "models", "--limit", "1", DATA / "nixon.dkb")
    assert out.count("model ") == 1
    code, out, _ = run(capsys, "models", DATA / "inconsistent.dkb")
    assert code == EXIT_OK and out.strip() == "UNSATISFIABLE (strict)"


def test_entail(capsys):
    f = DATA / "dept.dkb"
    assert run(capsys, "entail", f, "exists hasCourse(alice)")[1].strip() == "∃hasCourse(alice): yes (cautious)"
    assert run(capsys, "entail", f, "exists hasCourse(bob)")[1].strip() == "∃hasCourse(bob): no (cautious)"
    assert "yes" in run(capsys, "entail", f, "not exists hasCourse(bob)")[1]
    n = DATA / "nixon.dkb"
    assert "no" in run(capsys, "entail", n, "Pacifist(nixon)")[1]
    assert "yes (brave)" in run(capsys, "entail", n, "Pacifist(nixon)", "--mode", "brave")[1]
    assert run(capsys, "entail", f, "Foo(alice)")[0] == EXIT_INVALID
    assert run(capsys, "entail", f, "Foo(")[0] == EXIT_INVALID
    code, out, _ = run(capsys, "entail", DATA / "inconsistent.dkb", "B(a)")
    assert code == EXIT_OK and "UNSATISFIABLE" in out


def test_query(capsys):
    code, out, _ = run(capsys, "query", DATA / "dept.dkb", "?(x) :- DeptMember(x), hasCourse(x,y).")
    assert code == EXIT_OK and out.splitlines() == ["1 answer(s)", "  (alice)"]
    code, out, _ = run(capsys, "query", DATA / "dept.dkb", "?() :- Professor(x).")
    assert out.strip() == "true"
    code, out, _ = run(capsys, "query", "--depth", "0", DATA / "dept.dkb", "?(x) :- hasCourse(x,y).")
    assert "warning:" in out
    assert run(capsys, "query", DATA / "dept.dkb", "nonsense")[0] == EXIT_INVALID


@pytest.mark.parametrize("command", [
    ["models"], ["entail", "Employee(alice)"], ["query", "?(x) :- Employee(x)."], ["compile"],
])
def test_reasoning_commands_refuse_supervisor(capsys, command):
    argv = [command[0], DATA / "supervisor.dkb", *command[1:]]
    code, _, err = run(capsys, *argv)
    assert code == EXIT_REFUSED and "not exception-safe" in err


def test_json(capsys):
    code, out, _ = run(capsys, "--format", "json", "models", DATA / "dept.dkb")
    doc = json.loads(out)
    assert doc["command"] == "models" and doc["exit"] == 0 and doc["count"] == 1
    assert doc["models"][0]["chi"] == [{"axiom": "d1", "args": ["bob"]}]
    code, out, _ = run(capsys, "check", DATA / "supervisor.dkb", "--format", "json")
    doc = json.loads(out)
    assert code == EXIT_REFUSED and doc["exit"] == 1 and doc["witnesses"]
    code, out, _ = run(capsys, "check", DATA / "malformed.dkb", "--format", "json")
    assert json.loads(out)["diagnostics"]


def test_usage_errors(capsys):
    assert main([]) == EXIT_INVALID
    assert main(["frobnicate"]) == EXIT_INVALID
    assert main(["models", str(DATA / "dept.dkb"), "--limit", "x"]) == EXIT_INVALID
    assert main(["fuzz", "--count", "-1"]) == EXIT_INVALID


def test_fuzz(capsys):
    code, out, _ = run(capsys, "fuzz", "--seed", "1", "--count", "100")
    assert code == EXIT_OK and out.strip() == "100 DKBs checked, 0 mismatches"
    code, out, _ = run(capsys, "fuzz", "--count", "0")
    assert code == EXIT_OK


def test_fuzz_injected_bug(capsys, monkeypatch):
    import dkb.fuzz

    real = dkb.fuzz.answer_sets
    monkeypatch.setattr(dkb.fuzz, "answer_sets", lambda gp: real(gp)[1:])
    code, out, _ = run(capsys, "fuzz", "--seed", "1", "--count", "60")
    assert code == EXIT_REFUSED
    assert "minimized counterexample:" in out and "# dkb" in out


def test_deterministic(capsys):
    a = run(capsys, "--format", "json", "models", DATA / "nixon.dkb")
    b = run(capsys, "--format", "json", "models", DATA / "nixon.dkb")
    assert a == b


def test_config():
    args = cli.build_parser().parse_args(["query", "f.dkb", "?(x) :- A(x).", "--depth", "4"])
    c = cli.config_of(args)
    assert c.command == "query" and c.inputs == ("f.dkb",) and c.depth == 4 and c.fmt == "text"
