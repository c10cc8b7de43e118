import csv
import json

import pytest

from confal import harness
from confal.cli import main
from confal.fitness import Verdict, WitnessCheck
from confal.suite import bundled_text


def run_args(out, *extra):
    return ["run", "--model", "at_surrogate", "--spec", "at1.stl", "--constraint", "at_con1_tol.stl",
            "--method", "lm", "--base", "10", "--reps", "3", "--seed", "42", "--max-sims", "300",
            "--out", str(out), *extra]


def test_run_writes_csv_and_json(tmp_path, capsys):
    out = tmp_path / "results.csv"
    assert main(run_args(out)) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 3 and [r["seed"] for r in rows] == ["42", "43", "44"]
    agg = json.loads((tmp_path / "results.json").read_text())
    assert json.loads(capsys.readouterr().out) == agg
    assert agg["reps"] == 3


def test_witness_recheck_through_cli(tmp_path, capsys):
    out = tmp_path / "results.csv"
    main(run_args(out))
    capsys.readouterr()
    witnesses = [r["witness_path"] for r in csv.DictReader(out.open()) if r["falsified"] == "1"]
    assert witnesses
    for w in witnesses:
        assert main(["check", "--signal", str(tmp_path / w), "--formula", "at_con1_tol"]) == 0
        assert float(capsys.readouterr().out) > 0
        assert main(["check", "--signal", str(tmp_path / w), "--formula", bundled_text("at1")]) == 0
        assert float(capsys.readouterr().out) < 0


def test_formula_file_argument(tmp_path, capsys):
    spec = tmp_path / "phi.stl"
    spec.write_text("G[0,20](Pos < 10)\n")
    space = tmp_path / "space.txt"
    space.write_text("Ref, 1, 3, 4\n")
    code = main(["run", "--model", "tracker_surrogate", "--spec", str(spec), "--horizon", "20",
                 "--space", str(space), "--method", "ba", "--reps", "2", "--max-sims", "20"])
    assert code == 0
    assert json.loads(capsys.readouterr().out)["fr"] == 0


def test_missing_spec_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--model", "at_surrogate"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["run", "--model", "nope", "--spec", "at1"],
    ["run", "--model", "at_surrogate", "--spec", "G[0,30](speed <"],
    ["run", "--model", "at_surrogate", "--spec", "at1", "--constraint", "G[0,30](speed < 1)"],
    ["run", "--model", "at_surrogate", "--spec", "at1", "--k", "7"],
    ["check", "--signal", "/nonexistent.csv", "--formula", "x > 0"],
])
def test_config_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_soundness_violation_exits_3(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(harness, "verify_witness",
                        lambda *a, **k: WitnessCheck(Verdict.NOT_FALSIFYING, 1.0, 1.0))
    assert main(run_args(tmp_path / "r.csv")) == 3
    assert "soundness" in capsys.readouterr().err


def test_bench_subset(tmp_path, capsys):
    assert main(["bench", "--methods", "ba", "lmsf", "--reps", "2", "--max-sims", "50",
                 "--out", str(tmp_path)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 10
    assert len(list(tmp_path.glob("*.json"))) == 10
