from __future__ import annotations

import json
import subprocess
import sys

import pytest

from mrdcodes import __version__
from mrdcodes.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_code(capsys, tmp_path, name, *construct):
    code, out, _ = run(capsys, "construct", *construct)
    assert code == 0
    path = tmp_path / name
    path.write_text(out)
    return path


def test_version_via_module():
    res = subprocess.run([sys.executable, "-m", "mrdcodes", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == __version__


def test_construct_and_verify(capsys, tmp_path):
    p = write_code(capsys, tmp_path, "s.json", "singer", "--q", "2", "--n", "4")
    code, out, _ = run(capsys, "verify", "mrd", str(p))
    v = json.loads(out)
    assert code == 0 and (v["is_mrd"], v["k"], v["d"]) == (True, 1, 4)
    code, out, _ = run(capsys, "verify", "linear", str(p))
    assert code == 0 and json.loads(out) == {"linear": True}


def test_failed_verdict_exits_1(capsys, tmp_path):
    p = write_code(capsys, tmp_path, "n.json", "exceptional-11")
    code, out, _ = run(capsys, "verify", "additive", str(p))
    assert code == 1 and json.loads(out) == {"additive": False}


def test_input_errors_exit_2(capsys, tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text("")
    code, out, err = run(capsys, "verify", "mrd", str(empty))
    assert code == 2 and out == ""
    e = json.loads(err)
    assert e["error"] == "ParseError" and e["line"] == 1 and e["column"] == 1
    code, _, err = run(capsys, "verify", "mrd", str(tmp_path / "missing.json"))
    assert code == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"field": {"p": 2, "e": 1, "modulus": [0, 1]}, "m": 2, "n": 2, "elements": [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]}))
    code, _, err = run(capsys, "verify", "mrd", str(bad))
    assert code == 2 and json.loads(err)["error"] == "ValidationError"


def test_usage_errors_exit_2(capsys):
    code, _, err = run(capsys, "construct", "gabidulin", "--q", "2")
    assert code == 2 and json.loads(err)["error"] == "UsageError"
    code, _, _ = run(capsys, "frobnicate")
    assert code == 2
    code, _, err = run(capsys, "construct", "semifield", "--p", "2", "--n", "2", "--index", "5")
    assert code == 2


def test_library_error_exits_1(capsys):
    code, _, err = run(capsys, "construct", "dickson", "--q", "3", "--n", "4")
    assert code == 1 and json.loads(err)["error"] == "ConditionsViolated"


def test_invariants_of_code_and_table(capsys, tmp_path, code2):
    from mrdcodes import io as mio

    p = tmp_path / "c2.json"
    mio.export_code(code2, p)
    code, out, _ = run(capsys, "invariants", str(p))
    inv = json.loads(out)
    assert code == 0 and inv["min_distance"] == 4 and inv["rank_distribution"] == {"0": 1, "4": 15}
    code, out, _ = run(capsys, "construct", "dickson", "--q", "3", "--n", "2")
    t = tmp_path / "n.json"
    t.write_text(out)
    code, out, _ = run(capsys, "invariants", str(t))
    inv = json.loads(out)
    assert inv["nearfield"] and not inv["semifield"] and inv["center"] == 3


def test_equiv_and_dual(capsys, tmp_path):
    a = write_code(capsys, tmp_path, "a.json", "gabidulin", "--q", "2", "--m", "3", "--n", "3", "--k", "1")
    b = write_code(capsys, tmp_path, "b.json", "singer", "--q", "2", "--n", "3")
    code, out, _ = run(capsys, "equiv", str(a), str(b))
    res = json.loads(out)
    assert code == 0 and res["equivalent"] and res["witness"]["verified"]
    code, out, _ = run(capsys, "dual", str(a))
    d = json.loads(out)
    assert d["linear"] and len(d["basis"]) == 6


def test_algebra_roundtrip(capsys, tmp_path):
    t = tmp_path / "t.json"
    code, out, _ = run(capsys, "construct", "semifield", "--p", "2", "--n", "3")
    t.write_text(out)
    code, out, _ = run(capsys, "algebra", "check", str(t))
    assert code == 0 and json.loads(out)["ok"]
    code, out, _ = run(capsys, "algebra", "to-code", str(t))
    c = tmp_path / "c.json"
    c.write_text(out)
    code, out, _ = run(capsys, "algebra", "from-code", str(c))
    assert json.loads(out)["table"] == json.loads(t.read_text())["table"]
    broken = json.loads(t.read_text())
    broken["table"][9] = broken["table"][10]
    t.write_text(json.dumps(broken))
    code, out, _ = run(capsys, "algebra", "check", str(t))
    assert code == 1 and not json.loads(out)["ok"]


def test_reproduce_rankdist(capsys):
    code, out, _ = run(capsys, "reproduce", "sec6-rankdist")
    res = json.loads(out)
    assert code == 0 and res["result"] == "PASS"
    assert res["values"]["C"] == {"0": 1, "2": 338, "3": 390}


def test_classify_budget_and_resume(capsys, tmp_path):
    manifest = tmp_path / "m.json"
    code, out, _ = run(capsys, "--manifest", str(manifest), "classify", "semifields", "--p", "3", "--n", "3", "--budget", "40")
    part = json.loads(out)
    assert code == 0 and part["complete"] is False and part["resume_token"]
    m = json.loads(manifest.read_text())
    assert m["state"]["p"] == 3 and m["result_digest"] and m["workers"] == 1
    code, out, _ = run(capsys, "classify", "semifields", "--p", "3", "--n", "3", "--resume", str(manifest))
    resumed = json.loads(out)
    code, out, _ = run(capsys, "classify", "semifields", "--p", "3", "--n", "3")
    assert resumed == json.loads(out)
    assert resumed["isomorphism_classes"] == 6 and resumed["proper_isotopy_classes"] == 1


def test_resume_state_for_other_parameters_is_rejected(capsys, tmp_path):
    manifest = tmp_path / "m.json"
    run(capsys, "--manifest", str(manifest), "classify", "semifields", "--p", "3", "--n", "3", "--budget", "10")
    code, _, err = run(capsys, "classify", "semifields", "--p", "2", "--n", "3", "--resume", str(manifest))
    assert code == 2 and json.loads(err)["error"] == "ValidationError"


def test_manifest_records_inputs(capsys, tmp_path, monkeypatch):
    p = write_code(capsys, tmp_path, "s.json", "singer", "--q", "3", "--n", "2")
    manifest = tmp_path / "run.json"
    monkeypatch.setenv("MRD_WORKERS", "3")
    code, out, _ = run(capsys, "--manifest", str(manifest), "verify", "mrd", str(p))
    m = json.loads(manifest.read_text())
    assert m["workers"] == 3 and str(p) in m["inputs"] and len(m["inputs"][str(p)]) == 64
    assert m["library_version"] == __version__
    assert list(m["moduli"].values()) == [[0, 1]]


@pytest.mark.parametrize("q,n", [(2, 4), (3, 3)])
def test_symmetric_build_is_mrd(capsys, tmp_path, q, n):
    code, out, _ = run(capsys, "symmetric", "build", "--field", str(q), str(n))
    p = tmp_path / "s.json"
    p.write_text(out)
    code, out, _ = run(capsys, "verify", "mrd", str(p))
    assert code == 0 and json.loads(out)["d"] == n
