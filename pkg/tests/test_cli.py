from __future__ import annotations

import json
import subprocess
import sys

import pytest

from rota.cli import main
from rota.decompose import Decomposition, verify
from rota.field import FieldSpec
from rota.sample import BasisFamily


@pytest.fixture
def identity2(tmp_path):
    path = tmp_path / "fam.json"
    path.write_text(BasisFamily.identity(FieldSpec.prime(2), 2).dumps())
    return path


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_constants_half(capsys):
    code, out, _ = run(capsys, "constants", "--c", "0.5")
    assert code == 0
    rep = json.loads(out)
    assert (rep["L"], rep["K"], rep["n0"]) == (751, 23, 46)
    lo, hi = float(rep["c_prime"]["lower"]), float(rep["c_prime"]["upper"])
    assert lo <= 0.2887880951 and 0.2887880950 <= hi


def test_decompose_identity(capsys, identity2):
    code, out, _ = run(capsys, "decompose", str(identity2))
    assert code == 0
    d = Decomposition.from_json(json.loads(out))
    assert verify(BasisFamily.loads(identity2.read_text()), d).ok


def test_verify_corrupted(capsys, identity2, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"classes": [[[1, 1], [2, 1]], [[1, 2], [2, 2]]]}))
    code, out, _ = run(capsys, "verify", str(identity2), str(bad))
    assert code == 1
    assert json.loads(out)["violations"]


def test_sample_decompose_verify_roundtrip(capsys, tmp_path):
    fam_path, dec_path = tmp_path / "f.json", tmp_path / "d.json"
    assert main(["sample", "-n", "12", "--seed", "5", "--out", str(fam_path)]) == 0
    assert main(["decompose", str(fam_path), "--out", str(dec_path)]) == 0
    code, out, _ = run(capsys, "verify", str(fam_path), str(dec_path))
    assert code == 0 and json.loads(out)["ok"]


def test_sample_hex_and_seed_reproducible(capsys):
    _, a, _ = run(capsys, "sample", "-n", "9", "--seed", "0x10", "--hex")
    _, b, _ = run(capsys, "sample", "-n", "9", "--seed", "16", "--hex")
    assert a == b and "rows_hex" in json.loads(a)


def test_decompose_failure_diagnostics(capsys, tmp_path):
    # repeated standard bases: X_h and Y_j share vectors, so no perfect matching exists
    path = tmp_path / "f.json"
    path.write_text(BasisFamily.identity(FieldSpec.prime(2), 3).dumps())
    code, out, _ = run(capsys, "decompose", str(path), "--retries", "0")
    res = json.loads(out)
    assert code == 1 and res["success"] is False
    assert len(res["diagnostics"]) == 1
    assert all(d["deficient_set"] for d in res["diagnostics"])


def test_malformed_family(capsys, tmp_path):
    path = tmp_path / "f.json"
    path.write_text(json.dumps({"field": "gf:2", "n": 2, "rows": [[[1, 0], [0, 1]]] * 3}))
    code, _, err = run(capsys, "decompose", str(path))
    assert code == 2 and "error" in err
    path.write_text("{not json")
    assert run(capsys, "decompose", str(path))[0] == 2
    assert run(capsys, "decompose", str(tmp_path / "missing.json"))[0] == 2


def test_usage_errors(capsys):
    assert run(capsys, "constants")[0] == 2
    assert run(capsys, "sample")[0] == 2
    assert run(capsys, "sample", "-n", "3", "--field", "gf:4")[0] == 2
    assert run(capsys, "sample", "-n", "3", "--seed", "-1")[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "experiment")[0] == 2


def test_oracle_exit_codes(capsys):
    code, out, _ = run(capsys, "oracle", "-n", "3", "--seed", "2")
    assert code == 0 and json.loads(out)["status"] == "found"
    code, out, _ = run(capsys, "oracle", "-n", "4", "--node-limit", "2")
    assert code == 3 and json.loads(out)["status"] == "indeterminate"


def test_dispersed(capsys, tmp_path):
    code, out, _ = run(capsys, "dispersed", "--field", "gf:5", "--t", "entries:0,1", "-n", "2")
    assert code == 0 and json.loads(out)["dispersed"]
    line = tmp_path / "line.json"
    line.write_text(json.dumps({"vectors": [[i, 0] for i in range(1, 5)]}))
    code, out, _ = run(capsys, "dispersed", "--field", "gf:5", "--vectors", str(line), "--c", "1/5")
    assert code == 1 and json.loads(out)["witness"] is not None
    assert run(capsys, "dispersed", "--t", "graphic:4")[0] == 2


def test_experiment_csv_and_summary(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("ROTA_WORKERS", "1")
    summary = tmp_path / "s.json"
    code, out, _ = run(
        capsys, "experiment", "--ns", "2-4,8", "--trials", "5", "--seed", "7", "--summary", str(summary)
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "# schema: v1" and len(lines) == 2 + 4 * 5
    assert [r["n"] for r in json.loads(summary.read_text())["results"]] == [2, 3, 4, 8]
    monkeypatch.setenv("ROTA_WORKERS", "2")
    _, again, _ = run(capsys, "experiment", "--ns", "2-4,8", "--trials", "5", "--seed", "7", "--summary", str(summary))
    assert again == out


def test_module_entry_point(identity2):
    proc = subprocess.run(
        [sys.executable, "-m", "rota", "decompose", str(identity2)], capture_output=True, text=True
    )
    assert proc.returncode == 0 and "classes" in json.loads(proc.stdout)
