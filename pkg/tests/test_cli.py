import csv
import json
import math

import pytest

from gdms import cli
from gdms.verify import CheckResult, VerifyReport

LOG2_LOG3 = math.log(2) / math.log(3)


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "cantor.json").write_text(json.dumps({"system": {"kind": "cantor"}}))
    (tmp_path / "golden.json").write_text(json.dumps({"system": {"kind": "golden"}}))
    (tmp_path / "g0.json").write_text(json.dumps({"k": 1, "table": {"0": "1", "1": "0"}}))
    return tmp_path


def _run(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_dim_cantor_prints_value_and_writes_manifest(work, capsys):
    code, out, _ = _run(capsys, "dim", "--config", "cantor.json")
    assert code == 0
    rec = json.loads(out)
    assert rec["result"]["value"] == pytest.approx(LOG2_LOG3, abs=1e-9)
    assert "0.630929753" in out
    manifest = json.loads((work / "gdms-manifest.json").read_text())
    assert manifest["command"] == "dim" and manifest["system"]["kind"] == "cantor"
    assert rec["certification"] == "certified"


def test_verify_golden_exit_zero(work, capsys):
    code, out, _ = _run(capsys, "verify", "--config", "golden.json", "--out", "v.csv")
    assert code == 0
    rows = _csv(work / "v.csv")
    assert rows[0] == ["check", "passed", "detail"]
    assert all(r[1] == "True" for r in rows[1:])


def test_spectrum_peaks_at_similarity_dimension(work, capsys):
    code, _, _ = _run(capsys, "spectrum", "--config", "cantor.json", "--g", "g0.json", "--grid", "50", "--out", "s.csv")
    assert code == 0
    rows = _csv(work / "s.csv")
    assert rows[0] == ["p", "dim"]
    pairs = [(float(p), float(d)) for p, d in rows[1:]]
    p_max, d_max = max(pairs, key=lambda x: x[1])
    assert d_max == pytest.approx(LOG2_LOG3, abs=1e-9)
    assert p_max == pytest.approx(0.5)


@pytest.mark.parametrize(
    "argv",
    [
        ["pressure", "--config", "golden.json", "--s", "0.4,0.5", "--n", "4-6"],
        ["netmeasure", "--config", "cantor.json", "--t", "0.5", "--root", "0"],
        ["diophantine", "--alpha", "2", "--t", "0.3", "--n", "3,4", "--cyl", "0,2"],
    ],
)
def test_rerun_gives_identical_csv(work, capsys, argv):
    assert _run(capsys, *argv, "--out", "a.csv")[0] == 0
    assert _run(capsys, *argv, "--out", "b.csv")[0] == 0
    assert (work / "a.csv").read_bytes() == (work / "b.csv").read_bytes()


def test_manifest_replay_round_trip(work, capsys):
    argv = ["pressure", "--config", "golden.json", "--s", "0.44", "--n", "5", "--method", "both"]
    assert _run(capsys, *argv, "--out", "a.csv", "--manifest", "m1.json")[0] == 0
    code, _, _ = _run(capsys, "replay", "m1.json", "--out", "b.csv", "--manifest", "m2.json")
    assert code == 0
    assert (work / "a.csv").read_bytes() == (work / "b.csv").read_bytes()
    assert json.loads((work / "m1.json").read_text()) == json.loads((work / "m2.json").read_text())


def test_diophantine_csv_columns(work, capsys):
    code, _, _ = _run(capsys, "diophantine", "--alpha", "2", "--t", "0.3", "--n", "3", "--cyl", "0,2", "--out", "d.csv")
    assert code == 0
    rows = _csv(work / "d.csv")
    assert rows[0] == ["alpha", "n", "t", "cylinder", "dp_value", "bound", "pass"]
    assert rows[1][-1] == "pass"


def test_exit_code_validation(work, capsys):
    (work / "bad.json").write_text(json.dumps({"system": {"kind": "cantor", "extra": 1}}))
    assert _run(capsys, "dim", "--config", "bad.json")[0] == 1
    assert _run(capsys, "dim", "--config", "missing.json")[0] == 1
    assert _run(capsys, "nosuch")[0] == 1


def test_exit_code_resource_limit(work, capsys):
    code, _, err = _run(capsys, "pressure", "--config", "cantor.json", "--s", "0.5", "--n", "13")
    assert code == 2
    assert "max_generation" in err


def test_exit_code_invariant_failure(work, capsys, monkeypatch):
    def failing(system):
        return VerifyReport("stub", True, (CheckResult("stub", False, "forced", 0.0),))

    monkeypatch.setattr(cli, "run_invariant_suite", failing)
    assert _run(capsys, "verify", "--config", "cantor.json")[0] == 3
