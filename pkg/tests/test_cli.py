from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from dsgpotts.cli import (
    CONFIG_ENV,
    EXIT_CAP,
    EXIT_CONFIG,
    EXIT_FAIL,
    EXIT_OK,
    EXIT_USAGE,
    SCHEMA,
    fmt_complex,
    fmt_real,
    main,
)

FAST = {
    "verify str": ["--N", "3", "--trials", "5"],
    "verify str-matrix": ["--N", "2", "--trials", "3"],
    "verify twisted-ybe": ["--N", "3", "--trials", "3"],
    "verify correspondence": ["--N", "2", "--trials", "2"],
    "verify dilog12": ["--trials", "20"],
    "verify six-vertex": ["--N", "2", "--trials", "2"],
    "verify f-identity": ["--N", "5", "--trials", "20"],
    "evolve": ["--L", "3", "--steps", "5", "--trials", "2"],
    "partition": ["--N", "2", "--L", "2", "--M", "2", "--trials", "2"],
    "curve sample": ["--N", "3", "--count", "4", "--trials", "2"],
}


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("command", sorted(FAST))
def test_subcommand_passes_and_is_deterministic(capsys, command):
    argv = command.split() + FAST[command] + ["--seed", "7", "--no-timestamp"]
    code1, out1, _ = _run(capsys, argv)
    code2, out2, _ = _run(capsys, argv)
    assert code1 == code2 == EXIT_OK
    assert out1 == out2
    report = json.loads(out1)
    assert report["schema"] == SCHEMA
    assert report["passed"] is True
    assert "timestamp" not in report
    assert len(report["trials"]) == report["config"]["trials"]
    assert [t["trial"] for t in report["trials"]] == list(range(len(report["trials"])))


def test_timestamp_present_by_default(capsys):
    code, out, _ = _run(capsys, ["verify", "f-identity", "--trials", "2"])
    assert code == EXIT_OK and "timestamp" in json.loads(out)


def test_seed_changes_report(capsys):
    base = ["verify", "str", "--N", "2", "--trials", "2", "--no-timestamp"]
    _, a, _ = _run(capsys, base + ["--seed", "1"])
    _, b, _ = _run(capsys, base + ["--seed", "2"])
    assert a != b


def test_csv_output(capsys):
    code, out, _ = _run(capsys, ["verify", "str", "--N", "2", "--trials", "3", "--format", "csv", "--no-timestamp"])
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["command", "trial", "spawn_key", "residual", "pass", "details"]
    assert len(rows) == 4
    assert all(r[4] == "1" for r in rows[1:])


def test_tight_tolerance_fails(capsys):
    code, out, _ = _run(capsys, ["verify", "str", "--N", "3", "--trials", "2", "--tol", "1e-30", "--no-timestamp"])
    assert code == EXIT_FAIL
    assert json.loads(out)["passed"] is False


def test_usage_errors(capsys):
    assert _run(capsys, ["verify", "nonsense"])[0] == EXIT_USAGE
    assert _run(capsys, [])[0] == EXIT_USAGE
    assert _run(capsys, ["verify", "str", "--N", "abc"])[0] == EXIT_USAGE


def test_invalid_config_values(capsys):
    assert _run(capsys, ["verify", "str", "--trials", "0"])[0] == EXIT_CONFIG
    assert _run(capsys, ["verify", "str", "--tol", "-1"])[0] == EXIT_CONFIG


def test_cap_violation(capsys):
    code, _, err = _run(capsys, ["partition", "--N", "2", "--L", "13", "--M", "1", "--trials", "1"])
    assert code == EXIT_CAP and "cap" in err


def test_config_file_and_override(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"N": 2, "trials": 3, "seed": 4}))
    _, out, _ = _run(capsys, ["verify", "str", "--config", str(cfg), "--no-timestamp"])
    rep = json.loads(out)
    assert rep["config"]["N"] == 2 and rep["config"]["trials"] == 3 and rep["config"]["seed"] == 4
    _, out, _ = _run(capsys, ["verify", "str", "--config", str(cfg), "--trials", "1", "--no-timestamp"])
    assert json.loads(out)["config"]["trials"] == 1
    monkeypatch.setenv(CONFIG_ENV, str(cfg))
    _, out, _ = _run(capsys, ["verify", "str", "--no-timestamp"])
    assert json.loads(out)["config"]["trials"] == 3


def test_bad_config_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": 1}))
    assert _run(capsys, ["verify", "str", "--config", str(bad)])[0] == EXIT_CONFIG
    assert _run(capsys, ["verify", "str", "--config", str(tmp_path / "missing.json")])[0] == EXIT_CONFIG


def test_output_file(tmp_path, capsys):
    path = tmp_path / "r.json"
    code, out, _ = _run(capsys, ["verify", "f-identity", "--trials", "2", "--output", str(path), "--no-timestamp"])
    assert code == EXIT_OK and out == ""
    assert json.loads(path.read_text())["command"] == "verify f-identity"


def test_serialisation_format():
    assert fmt_real(0.1) == "0.10000000000000001"
    assert fmt_complex(1 + 2j) == {"re": "1", "im": "2"}
    assert float(fmt_real(1 / 3)) == 1 / 3


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "dsgpotts", "verify", "f-identity", "--trials", "1", "--no-timestamp"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == EXIT_OK
    assert json.loads(proc.stdout)["passed"] is True
