import csv
import json
import os
import subprocess
import sys

import pytest

from besov_lab import littlewood_paley as lp
from besov_lab.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, run
from besov_lab.errors import QuadratureError


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def no_temp_files(directory):
    return not [f for f in os.listdir(directory) if f.startswith(".tmp")]


@pytest.fixture(autouse=True)
def _no_env_override(monkeypatch):
    monkeypatch.delenv("BESOV_LAB_OUT", raising=False)


def test_exit_codes_are_distinct():
    assert len({EXIT_OK, EXIT_FAIL, EXIT_USAGE}) == 3
    assert (EXIT_OK, EXIT_FAIL, EXIT_USAGE) == (0, 1, 2)


def test_thm1_example(tmp_path, capsys):
    code = run(["thm1", "--s", "2", "--p", "2", "--d", "2", "--n", "6..12", "--out", str(tmp_path)])
    assert code == EXIT_OK
    rows = read_csv(tmp_path / "thm1.csv")
    assert [int(r["n"]) for r in rows] == list(range(6, 13))
    assert all(r["pass"] == "true" for r in rows)
    assert (tmp_path / "thm1_plot.csv").exists()
    assert "PASS" in capsys.readouterr().out
    assert no_temp_files(tmp_path)


@pytest.mark.parametrize("cmd", ["thm2", "thm3", "thm4"])
def test_other_theorems(tmp_path, cmd):
    argv = [cmd, "--n", "6..9", "--J", "12", "--out", str(tmp_path)]
    assert run(argv) == EXIT_OK
    assert len(read_csv(tmp_path / f"{cmd}.csv")) == 4


def test_json_format(tmp_path):
    assert run(["thm4", "--n", "6..7", "--J", "10", "--format", "json", "--out", str(tmp_path)]) == EXIT_OK
    data = json.loads((tmp_path / "thm4.json").read_text())
    assert set(data) == {"summary", "records"}
    assert data["summary"][0]["fail_count"] == 0
    assert [r["n"] for r in data["records"]] == ["6", "7"]


@pytest.mark.parametrize("argv", [
    ["thm1", "--p", "7"],
    ["thm1", "--p", "0.5"],
    ["thm1", "--n", "9..6"],
    ["thm1", "--bogus"],
    ["thm2", "--s", "1.5"],
    ["thm2", "--alpha", "1.0"],
    ["thm2", "--r", "inf"],
    ["thm1", "--p-num", "3"],
    ["thm1", "--p-num", "1", "--p-den", "2"],
    ["besov", "--profile", "{not json"],
    ["besov", "--profile", '{"s": 1, "colour": 3}'],
    ["solve-ns2d", "--config", '{"N": 48}'],
    [],
])
def test_usage_errors(tmp_path, argv, capsys):
    assert run(argv + ["--out", str(tmp_path)] if argv else argv) == EXIT_USAGE
    assert no_temp_files(tmp_path)


def test_p_error_names_admissible_values(capsys):
    assert run(["thm1", "--p", "7"]) == EXIT_USAGE
    err = capsys.readouterr().err
    assert "1" in err and "2" in err and "inf" in err


def test_rational_p(tmp_path):
    argv = ["thm1", "--p-num", "3", "--p-den", "2", "--n", "6", "--J", "9", "--out", str(tmp_path)]
    assert run(argv) == EXIT_OK
    assert float(read_csv(tmp_path / "thm1.csv")[0]["p"]) == 1.5


def test_quadrature_failure_is_check_failure(tmp_path, monkeypatch):
    def stalled(u, p):
        raise QuadratureError("stalled", last_two=(1.0, 2.0))

    monkeypatch.setattr(lp, "_power_integral", stalled)
    code = run(["thm1", "--p", "1", "--n", "6", "--J", "9", "--out", str(tmp_path)])
    assert code == EXIT_FAIL


def test_env_overrides_out(tmp_path, monkeypatch):
    target = tmp_path / "env"
    monkeypatch.setenv("BESOV_LAB_OUT", str(target))
    assert run(["partition-check", "--jmax", "10", "--out", str(tmp_path / "ignored")]) == EXIT_OK
    assert (target / "partition_check.csv").exists()
    assert not (tmp_path / "ignored").exists()


def test_partition_check(tmp_path):
    assert run(["partition-check", "--jmax", "12", "--format", "json", "--out", str(tmp_path)]) == EXIT_OK
    data = json.loads((tmp_path / "partition_check.json").read_text())
    assert data["k_max"] == 5462
    assert data["max_unity_defect"] <= 1e-12


def test_besov_and_profile(tmp_path, capsys):
    desc = json.dumps({"s": 1.5, "J": 10, "rule": "uniform"})
    assert run(["besov", "--profile", desc, "--p", "inf", "--out", str(tmp_path)]) == EXIT_OK
    assert "= 1.0" in capsys.readouterr().out
    rows = read_csv(tmp_path / "besov.csv")
    assert float(rows[4]["weighted_block_norm"]) == pytest.approx(1.0)
    path = tmp_path / "desc.json"
    path.write_text(desc)
    assert run(["profile", "--profile", str(path), "--out", str(tmp_path)]) == EXIT_OK
    assert len(read_csv(tmp_path / "profile.csv")) >= 12


def test_solve_ad1d(tmp_path):
    assert run(["solve-ad1d", "--s", "1", "--J", "8", "--eps", "0.02", "--T", "0.3",
                "--out", str(tmp_path)]) == EXIT_OK
    # the j = 8 mode is damped by e^{-743} and underflows to zero
    assert [int(r["k"]) for r in read_csv(tmp_path / "solve_ad1d.csv")] == [11, 22, 44, 88, 176]


def test_solve_ns2d(tmp_path):
    cfg = json.dumps({"N": 32, "dt": 0.01, "eps": 0.05, "T": 0.03})
    assert run(["solve-ns2d", "--config", cfg, "--snapshot", "field", "--out", str(tmp_path)]) == EXIT_OK
    assert len(read_csv(tmp_path / "ns2d_summary.csv")) == 2
    assert (tmp_path / "ns2d_field_001.csv").exists()
    assert no_temp_files(tmp_path)


def test_solve_ns2d_rejects_unresolved_shear(tmp_path):
    cfg = json.dumps({"N": 32, "dt": 0.01, "T": 0.02})
    assert run(["solve-ns2d", "--config", cfg, "--initial", "shear", "--out", str(tmp_path)]) == EXIT_USAGE


def test_validate_skip_solver(tmp_path, capsys):
    assert run(["validate", "--skip-solver", "--out", str(tmp_path)]) == EXIT_OK
    rows = read_csv(tmp_path / "validate.csv")
    assert rows[0]["check"] == "residual_max" and rows[0]["pass"] == "true"


def test_outputs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run(["thm3", "--n", "6..8", "--J", "11", "--out", str(out)]) == EXIT_OK
    for name in ("thm3.csv", "thm3_plot.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "besov_lab", "thm1", "--p", "7"],
                          capture_output=True, text=True, cwd=tmp_path)
    assert proc.returncode == EXIT_USAGE
    proc = subprocess.run([sys.executable, "-m", "besov_lab", "--help"], capture_output=True, text=True)
    assert proc.returncode == EXIT_OK
    assert "thm1" in proc.stdout
