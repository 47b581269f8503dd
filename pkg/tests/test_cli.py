import json
import subprocess
import sys

import pytest

from varrestrict import __version__
from varrestrict._jsonio import fingerprint
from varrestrict.cli import run

from cli_cases import CASES, run_case


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, tmp_path):
    a, b, report, direct = run_case(name, tmp_path)
    assert a == b
    assert report["tool"] == "varrestrict" and report["version"] == __version__
    assert report["result"] == direct
    assert report["config_fingerprint"] == fingerprint({"command": report["command"], **report["config"]})


def test_every_subcommand_covered():
    commands = {"variation", "muhat", "ring-check", "decay", "verify-theorem1", "maximal",
                "condition-a", "condition-c", "tomas-stein", "gauss-dom", "search"}
    assert commands <= set(CASES)


def test_variation_example(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"params": [1, 2, 3, 4], "values": [0, 1, 0, 1]}))
    assert run(["variation", "--input", str(path), "--rho", "2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["result"]["value"] == pytest.approx(3 ** 0.5, rel=1e-15)
    assert out["result"]["witness"] == [0, 1, 2, 3]


def test_gauss_dom_sphere_flag(capsys):
    assert run(["gauss-dom", "--measure", "sphere", "--delta", "0.5", "--samples", "200"]) == 0
    assert json.loads(capsys.readouterr().out)["result"]["diverging_tail"] is True


def test_profile_and_trace_csv(tmp_path):
    prof = tmp_path / "prof.csv"
    assert run(["gauss-dom", "--samples", "50", "--profile-csv", str(prof),
                "--output", str(tmp_path / "r.json")]) == 0
    assert prof.read_text().splitlines()[0] == "r,vartheta,Psi,ratio"
    cfg = tmp_path / "s.json"
    cfg.write_text(json.dumps({"budget": 2, "grid_level": 2,
                               "ladder": {"eps_min": 0.1, "eps_max": 1, "count": 3}}))
    trace = tmp_path / "trace.csv"
    assert run(["search", "--config", str(cfg), "--trace-csv", str(trace),
                "--output", str(tmp_path / "s-out.json")]) == 0
    assert len(trace.read_text().splitlines()) == 4
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".tmp-")]


def test_warnings_in_report(tmp_path, capsys):
    cfg = tmp_path / "t.json"
    cfg.write_text(json.dumps({"grid_level": 2, "ladder": {"eps_min": 50, "eps_max": 100, "count": 2},
                               "measure": {"kind": "sphere"},
                               "grid3d": {"nodes": 8, "max_nodes": 8}}))
    assert run(["verify-theorem1", "--config", str(cfg)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["warnings"] and "quadrature_accuracy" in out["result"]["flags"]


def _error(capsys):
    err = capsys.readouterr().err
    return json.loads(err)


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["variation", "--rho", "2"],
                                  ["muhat", "--measure", "cube"], ["gauss-dom", "--delta", "x"]])
def test_usage_errors(argv, capsys):
    assert run(argv) == 2
    assert _error(capsys)["error"] == "usage"


def test_unreadable_config(tmp_path, capsys):
    assert run(["verify-theorem1", "--config", str(tmp_path / "missing.json")]) == 2
    assert "cannot read" in _error(capsys)["message"]
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["maximal", "--config", str(bad)]) == 2
    assert _error(capsys)["error"] == "usage"


@pytest.mark.parametrize("cfg", [{"grid_levle": 4}, {"ladder": {"eps_min": 0}},
                                 {"measure": {"kind": "cube"}}, {"rho": 0.5}])
def test_validation_errors(cfg, tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    assert run(["verify-theorem1", "--config", str(path)]) == 2
    assert _error(capsys)["error"] in ("usage", "validation")


def test_search_unknown_key(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"budget": 1, "population": 4}))
    assert run(["search", "--config", str(path)]) == 2
    assert _error(capsys)["error"] == "validation"


def test_gauss_dom_bad_delta(capsys):
    assert run(["gauss-dom", "--delta", "-1", "--samples", "10"]) == 2
    assert _error(capsys)["error"] == "validation"


def test_alpha_only_for_gaussian(capsys):
    assert run(["muhat", "--measure", "ball", "--alpha", "2"]) == 2


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "varrestrict", "--version"], capture_output=True,
                         text=True, check=True)
    assert out.stdout.strip() == f"varrestrict {__version__}"
    res = subprocess.run([sys.executable, "-m", "varrestrict", "nope"], capture_output=True, text=True)
    assert res.returncode == 2 and json.loads(res.stderr)["error"] == "usage"
