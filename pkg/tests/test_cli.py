import json
import shutil

import jsonschema
import pytest

from modml import cli, equality
from conftest import CORPUS, ROOT


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, command, *argv):
    code, out, _ = run(capsys, command, *argv, "--json")
    payload = json.loads(out)
    jsonschema.validate(payload, cli.SCHEMAS[command])
    return code, payload


def test_check_ok(capsys):
    code, out, _ = run(capsys, "check", CORPUS / "exists.mml")
    assert code == 0 and "ok:" in out


def test_check_static_error_exit_code(capsys):
    code, payload = run_json(capsys, "check", CORPUS / "paradox.mml")
    assert code == 1 and payload["error"]["code"] == "E-UNIVERSE"


def test_check_json_with_normal_forms(capsys):
    code, payload = run_json(capsys, "check", CORPUS / "forall.mml", "--normal-forms")
    rows = {r["name"]: r for r in payload["decls"]}
    assert code == 0 and rows["five"]["normal_form"] == "5"


def test_trace_equality(capsys):
    code, payload = run_json(capsys, "check", CORPUS / "sharing.mml", "--trace-equality")
    assert code == 0 and any(e["equal"] for e in payload["equalities"])
    assert {"lhs": "X.1", "rhs": "X.1", "equal": True} in payload["equalities"]
    assert equality.TRACE is None


def test_elab_outputs(capsys):
    code, payload = run_json(capsys, "elab", CORPUS / "exists.mml", "--emit-kernel", "--emit-ast")
    assert code == 0 and all("kernel" in r for r in payload["decls"])
    assert all("node" in d for d in payload["ast"])


def test_run_with_flags(capsys):
    code, payload = run_json(capsys, "run", CORPUS / "main.mml", "--flag", "USE_MOCK_DB=true")
    assert code == 0 and payload["transcript"][0] == {"op": "mock.openDb", "args": "mydb.sql"}
    code, out, _ = run(capsys, "run", CORPUS / "symbol_table.mml")
    assert code == 0 and '{"op": "fresh", "args": 0}' in out.splitlines()


def test_run_stuck_exit_code(capsys):
    code, payload = run_json(capsys, "run", CORPUS / "exists.mml", "--fuel", "3")
    assert code == 2 and payload["error"]["code"] == "E-FUEL"


def test_bad_flag_is_a_usage_error(capsys):
    code, _, err = run(capsys, "run", CORPUS / "main.mml", "--flag", "USE_MOCK_DB")
    assert code == 64 and "error" in err


def test_unknown_subcommand_and_missing_file(capsys):
    assert run(capsys, "frobnicate")[0] == 64
    assert run(capsys, "check", CORPUS / "nope.mml")[0] == 64


def test_model_fixture(capsys):
    code, payload = run_json(capsys, "model", CORPUS / "model" / "basic.fixture.json",
                             "--check", "valid", "--check", "reflection")
    assert code == 0 and [c["check"] for c in payload["checks"]] == ["valid", "reflection"]


def test_model_failure_exit_code(capsys, tmp_path):
    fx = {"name": "bad", "k": 3, "pers": [{"name": "P", "carrier": ["#0/3", "#1/3"], "pairs": [["#0/3", "#1/3"]]}],
          "checks": ["valid"]}
    path = tmp_path / "bad.fixture.json"
    path.write_text(json.dumps(fx))
    code, payload = run_json(capsys, "model", path)
    assert code == 3 and not payload["ok"]


def test_malformed_fixture_is_a_usage_error(capsys, tmp_path):
    path = tmp_path / "broken.fixture.json"
    path.write_text("{}")
    assert run(capsys, "model", path)[0] == 64


def test_corpus_passes(capsys):
    code, payload = run_json(capsys, "test-corpus", CORPUS)
    assert code == 0 and payload["failed"] == 0 and len(payload["files"]) >= 11


def test_empty_corpus(capsys, tmp_path):
    code, out, _ = run(capsys, "test-corpus", tmp_path)
    assert code == 0 and "0 files, 0 failed" in out


def test_missing_sidecar_is_reported(capsys, tmp_path):
    shutil.copy(CORPUS / "packaged.mml", tmp_path)
    code, payload = run_json(capsys, "test-corpus", tmp_path)
    assert code == 1 and "sidecar" in " ".join(payload["files"][0]["problems"])


def test_wrong_expectation_is_reported(capsys, tmp_path):
    shutil.copy(CORPUS / "sharing.mml", tmp_path)
    expect = json.loads((CORPUS / "sharing.expect").read_text())
    expect["runs"][0]["value"] = 6
    (tmp_path / "sharing.expect").write_text(json.dumps(expect))
    code, payload = run_json(capsys, "test-corpus", tmp_path)
    assert code == 1 and payload["failed"] == 1


def test_corpus_detects_a_broken_package_computation_rule(capsys, tmp_path, monkeypatch):
    # mutation: bind on an introduced package no longer computes
    original = equality.vbind

    def broken(u, motive, k):
        if isinstance(u, equality.VEta):
            return equality.VNeu(equality.NBind(equality.NConst("stuck"), motive, equality.PyClo(k, "z")))
        return original(u, motive, k)

    monkeypatch.setattr(equality, "vbind", broken)
    for name in ("exists.mml", "exists.expect"):
        shutil.copy(CORPUS / name, tmp_path)
    code, out, _ = run(capsys, "test-corpus", tmp_path)
    assert code == 1 and "1 failed" in out


def test_internal_errors_are_isolated_per_file(capsys, tmp_path, monkeypatch):
    def crash(u, motive, k):
        raise TypeError("boom")

    monkeypatch.setattr(equality, "vbind", crash)
    for name in ("exists.mml", "exists.expect", "sharing.mml", "sharing.expect"):
        shutil.copy(CORPUS / name, tmp_path)
    code, payload = run_json(capsys, "test-corpus", tmp_path)
    assert code == 1 and len(payload["files"]) == 2
    assert "internal error" in payload["files"][0]["problems"][0]


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "modml", "check", str(CORPUS / "packaged.mml")],
                          capture_output=True, text=True, cwd=ROOT)
    assert proc.returncode == 0
