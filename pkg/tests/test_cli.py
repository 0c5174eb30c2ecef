import json
import subprocess
import sys

import pytest

from shiftq.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    doc = json.loads(out)
    assert doc["schema"] == 1
    return code, doc


def test_dynkin(capsys):
    code, doc = run_json(capsys, "dynkin", "B2")
    assert code == 0 and doc["command"] == "dynkin"
    assert doc["result"]["cartan"] == [[2, -1], [-2, 2]] or doc["result"]["cartan"] == [[2, -2], [-1, 2]]
    assert doc["result"]["dual_coxeter"] == 3


def test_lweight(capsys):
    code, doc = run_json(capsys, "lweight", "Psi[1,0]^-1 * Psi[2,1]", "--type", "A2")
    assert code == 0
    assert doc["result"]["lweight"] == "Psi[1,0]^-1 * Psi[2,1]"
    assert doc["result"]["degree"] == {"1": -1, "2": 1}


def test_lweight_text(capsys):
    code, out, _ = run(capsys, "lweight", "A[1,0]^-1", "--type", "A1")
    assert code == 0 and "Y-form" in out


@pytest.mark.parametrize("family,extra,count", [
    ("neg-prefund", [], 7),
    ("kr", ["--length", "3"], 4),
    ("sl3-pair", ["--nodes", "1,2"], 16),
    ("psi-tilde", [], 7),
    ("psi-star", ["--node", "2"], 2),
])
def test_qchar(capsys, family, extra, count):
    code, doc = run_json(capsys, "qchar", family, "--type", "A2", "--depth", "6", *extra)
    assert code == 0 and len(doc["result"]["terms"]) == count


def test_module_verify_and_qchar(capsys):
    code, doc = run_json(capsys, "module", "verify", "sl2-neg-prefund", "--basis", "3", "--modes", "1", "--h", "1")
    assert code == 0 and doc["result"]["ok"] and doc["result"]["attempted"] > 0
    code, doc = run_json(capsys, "module", "qchar", "prefund-tilde-inflation", "--type", "A2", "--node", "1",
                         "--depth", "4")
    assert code == 0 and len(doc["result"]["terms"]) == 5


def test_identity(capsys):
    code, doc = run_json(capsys, "identity", "qq-tilde", "--type", "A2", "--node", "2", "--depth", "4")
    assert code == 0 and doc["result"]["passed"]
    code, out, _ = run(capsys, "identity", "t_system", "--type", "A1", "--length", "2")
    assert code == 0 and "PASS" in out


def test_rmatrix(capsys):
    code, doc = run_json(capsys, "rmatrix", "--a", "4", "--basis", "2", "--modes", "1")
    assert code == 0 and doc["result"]["ok"]
    code, doc = run_json(capsys, "rmatrix", "--a", "-1", "--basis", "2", "--modes", "1")
    assert code == 0 and doc["result"]["indeterminate"]


def test_suite_subset(capsys):
    code, doc = run_json(capsys, "suite", "--only", "7")
    assert code == 0 and doc["result"]["passed"]
    assert doc["result"]["criteria"][0]["criterion"] == 7


@pytest.mark.parametrize("argv", [
    ["dynkin", "X9"],
    ["lweight", "Psi[1]"],
    ["identity", "qq-tilde", "--type", "A1"],
    ["identity", "t-system", "--type", "A1"],
    ["module", "verify", "nope"],
    ["qchar", "sl3-pair", "--type", "A3", "--nodes", "1,3"],
    ["suite", "--only", "9"],
    ["qchar", "kr"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "usage" in err


def test_verification_failure_exits_1(monkeypatch, capsys):
    import shiftq.cli as cli
    from shiftq.identities import IdentityReport

    monkeypatch.setattr(cli, "check_identity", lambda *a: IdentityReport("wronskian", {}, False, mismatch={"x": 1}))
    code, out, _ = run(capsys, "identity", "wronskian", "--type", "A1")
    assert code == 1 and "FAIL" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "shiftq", "dynkin", "A2", "--format", "json"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["result"]["type"] == "A2"
