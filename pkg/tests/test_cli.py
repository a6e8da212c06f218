import json
import subprocess
import sys
from pathlib import Path

import pytest

from infcycle.cli import main, parse_problem, run_problem, InputError
from infcycle.cycles import Deformation, SubvarietyGerm, newton_class
from infcycle.hochcyc import hc, hh
from infcycle.polyalg import PolyContext, truncated

FIXTURES = Path(__file__).parent / "fixtures"


def run(name: str, **kw):
    return run_problem((FIXTURES / name).read_text(), **kw)


def results(report):
    return {r["command"]: r["result"] for r in report["results"]}


def cli(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "infcycle", *args], capture_output=True, text=True, cwd=cwd)


def write(tmp_path, text: str) -> str:
    p = tmp_path / "p.problem"
    p.write_text(text)
    return str(p)


@pytest.mark.parametrize("name", sorted(p.name for p in FIXTURES.glob("*.problem")))
def test_fixtures_succeed(name):
    report, status = run(name)
    assert report["status"] == "ok"
    # status 1 flags a 'not a cycle' verdict; the CLI only reports it under --strict
    assert status == (1 if name == "denominator.problem" else 0)
    assert report["schema"] == 1


def test_bloch_fixture_values():
    r = results(run("bloch.problem")[0])
    assert r["bloch-k2 S"]["dim"] == 1 and r["bloch-k2 S"]["basis"] == ["eps*dx"]
    assert r["goodwillie-k S 2"]["dim"] == r["goodwillie-k S 2"]["bloch_dim"] == 1
    assert r["kaehler A 1"]["dim"] == 1


def test_homology_fixture_matches_library():
    r = results(run("homology.problem")[0])
    D = truncated("eps", 2)
    assert r["hh D 2"]["dim"] == hh(D, 2).dim
    assert r["hc D 2"]["dim"] == hc(D, 2).dim
    for k, v in r.items():
        if k.startswith("sbi-check"):
            assert v["exact"]
        if k.startswith("hodge"):
            assert all(v["checks"].values())
            assert sum(v["pieces"].values()) == v["total"]


def test_cycles_fixture_values():
    r = results(run("cycles.problem")[0])
    assert r["koszul F"]["ranks"] == [1, 2, 1]
    assert r["koszul F"]["differentials"] == {"1": [["x", "y"]], "2": [["-y"], ["x"]]}
    assert r["fundamental-class F"]["top"] == "-dx∧dy"
    assert r["newton-class D2"]["zero"] is True
    assert r["newton-class D2"]["certificate"]["verified"]
    assert r["newton-class D"]["zero"] is False
    assert r['obstruction D extensions="y + z, x + z"']["verdict"] == "cycle"
    assert r['tangent F normal="1, 0"']["zero"] is False
    assert r['tangent F normal="y, 0"']["zero"] is True


def test_cli_class_agrees_with_library():
    r = results(run("denominator.problem")[0])
    P = PolyContext(("x", "y", "z"), [])
    c = newton_class(Deformation(SubvarietyGerm(P, ["x", "y"]), truncated("eps", 2), ["x + eps/z", "y"], denominator="z"))
    assert r["newton-class Dz"]["numerator"] == c.fmt()
    assert r["newton-class Dz"]["denominator_power"] == c.denominator_power == 2
    assert r["obstruction Dz"]["verdict"] == "not a cycle"
    cert = r["obstruction Dz"]["boundaries"][0]["certificate"]
    assert cert["kind"] == "normal_forms" and cert["verified"]


def test_naturality_fixture():
    r = results(run("naturality.problem")[0])
    assert all(v["commutes"] and v["boundaries_agree"] for v in r.values())


def test_reports_are_byte_identical(tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        proc = cli("run", str(FIXTURES / "cycles.problem"), "--json", str(out))
        assert proc.returncode == 0, proc.stderr
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_timing_is_opt_in():
    report, _ = run("bloch.problem")
    assert all("seconds" not in r for r in report["results"])
    report, _ = run("bloch.problem", timing=True)
    assert all(r["seconds"] >= 0 for r in report["results"])


def test_bounds_are_echoed():
    report, _ = run("empty.problem", degree_bound=5, bar_depth=3)
    assert report["bounds"] == {"degree_bound": 5, "bar_depth": 3}
    assert report["results"] == []


@pytest.mark.parametrize(
    "text, line, column, fragment",
    [
        ("[ring P]\nvariables = x, y\nrelations = x^^2\n", 3, 15, "exponent"),
        ("[commands]\nfrobnicate 3\n", 2, 1, "unknown command"),
        ("[ring P]\nvariables = x\n[commands]\nkoszul F\n", 4, None, "undefined reference"),
        ("[ring P]\nvariables = x\n[commands]\nkoszul P\n", 4, None, "is a ring"),
        ("[ring P\nvariables = x\n", 1, None, None),
        ("variables = x\n", 1, None, None),
    ],
)
def test_input_errors(text, line, column, fragment):
    report, status = run_problem(text)
    assert status == 2
    err = report["error"]
    assert err["kind"] == "input" and err["line"] == line
    if column is not None:
        assert err["column"] == column
    if fragment:
        assert fragment in err["message"]


def test_parse_problem_raises_with_position():
    with pytest.raises(InputError) as exc:
        parse_problem("[ring P]\nvariables = x\nbogus line\n")
    assert exc.value.line == 3


def test_truncation_exit_code(tmp_path):
    p = write(tmp_path, "[algebra A]\nvariables = e\nrelations = e^2\n[commands]\nhh A 9\n")
    proc = cli("run", p, "--json", "-")
    assert proc.returncode == 3
    err = json.loads(proc.stdout)["error"]
    assert err["kind"] == "truncation" and err["required"] == 9
    assert cli("run", p, "--bar-depth", "9").returncode == 0


def test_strict_mode(tmp_path):
    p = str(FIXTURES / "denominator.problem")
    assert cli("run", p).returncode == 0
    assert cli("run", p, "--strict").returncode == 1
    assert cli("run", str(FIXTURES / "cycles.problem"), "--strict").returncode == 0


def test_missing_file():
    proc = cli("run", "/nonexistent/p.problem")
    assert proc.returncode == 2
    assert "cannot read" in proc.stderr


def test_human_table_lists_each_command():
    proc = cli("run", str(FIXTURES / "bloch.problem"))
    assert proc.returncode == 0
    assert proc.stdout.count("== ") == 3
    assert "eps*dx" in proc.stdout


def test_main_in_process(capsys):
    assert main(["run", str(FIXTURES / "empty.problem"), "--json", "-"]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "ok"


def test_selftest_quick():
    proc = cli("selftest")
    assert proc.returncode == 0, proc.stdout
    assert "selftest quick: pass" in proc.stdout


def test_selftest_detects_injected_fault():
    proc = cli("selftest", "--inject-fault", "koszul-sign")
    assert proc.returncode == 1
    assert "fundamental-class" in proc.stdout.split("selftest quick:")[1]


def test_version():
    proc = cli("--version")
    assert proc.returncode == 0 and "0.1.0" in proc.stdout
