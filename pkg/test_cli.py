"""
Tests for the command-line front end.
"""

import csv
import json

import pytest

from app.closed_form import DEFAULT_THEORY_PARAMS, RESULT_HEADER
from app.main import EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, main


@pytest.fixture
def params_file(tmp_path):
    path = tmp_path / "params.json"
    path.write_text(DEFAULT_THEORY_PARAMS.to_json())
    return path


@pytest.fixture
def experiment_file(tmp_path):
    path = tmp_path / "experiment.json"
    path.write_text(
        json.dumps(
            {
                "sessions": 3,
                "q": 0.46,
                "lambda_women": 250.0,
                "ability_women": {"mean": 14, "sd": 0},
                "ability_men": {"mean": 12, "sd": 2},
                "c_f": 450.0,
                "theta_f": 1450.0,
                "theta_m": -500.0,
                "reference_pool_size": 40,
                "win_prob_draws": 10000,
                "seed": 4,
            }
        )
    )
    return path


def read_rows(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


# ============================================================================
# solve / sweep
# ============================================================================

def test_solve_prosocial(tmp_path, params_file):
    output = tmp_path / "solve.csv"
    status = main(["solve", "--treatment", "prosocial", "--params", str(params_file), "--lambda", "0.5",
                   "--output", str(output)])
    assert status == EXIT_OK
    rows = read_rows(output)
    assert len(rows) == 1
    assert [rows[0][key] for key in ("r", "rho", "r_T", "rho_T")] == ["1.000000", "1.000000", "1.000000", "0.000000"]


def test_solve_writes_to_stdout(capsys, params_file):
    assert main(["solve", "--treatment", "preferential", "--params", str(params_file), "--lambda", "0.3"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ",".join(RESULT_HEADER)
    assert len(lines) == 4


def test_baseline_sweep_is_monotone(tmp_path, params_file):
    output = tmp_path / "sweep.csv"
    status = main(["sweep", "--param", "lambda", "--from", "0", "--to", "3", "--steps", "301",
                   "--treatment", "baseline", "--params", str(params_file), "--output", str(output)])
    assert status == EXIT_OK

    rows = read_rows(output)
    assert len(rows) == 301
    rho = [float(row["rho"]) for row in rows]
    assert all(b <= a for a, b in zip(rho, rho[1:]))

    assert len(read_rows(f"{output}.selected.csv")) == 301
    meta = json.loads(open(f"{output}.meta.json").read())
    assert meta["selection"].startswith("max-participation stable")


def test_sweep_from_spec_document(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "param": "lambda", "from": 0.0, "to": 1.0, "steps": 5,
        "params": json.loads(DEFAULT_THEORY_PARAMS.to_json()), "treatments": ["preferential"],
    }))
    output = tmp_path / "sweep.csv"
    assert main(["sweep", "--spec", str(spec), "--output", str(output)]) == EXIT_OK
    assert len(read_rows(f"{output}.selected.csv")) == 5


# ============================================================================
# verify / simulate / winprob / report
# ============================================================================

def test_verify_is_deterministic_across_workers(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["verify", "--draws", "2", "--seed", "7", "--output", str(first)]) == EXIT_OK
    assert main(["verify", "--draws", "2", "--seed", "7", "--workers", "2", "--output", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_verify_reports_mismatch(monkeypatch, tmp_path):
    from app import oracle

    monkeypatch.setattr(oracle, "_matches", lambda a, b: False)
    assert main(["verify", "--draws", "1", "--seed", "1", "--output", str(tmp_path / "v.csv")]) == EXIT_MISMATCH


def test_simulate_is_byte_identical(tmp_path, experiment_file):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", "--config", str(experiment_file), "--seed", "9", "--output", str(first)]) == EXIT_OK
    assert main(["simulate", "--config", str(experiment_file), "--seed", "9", "--workers", "2",
                 "--output", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    assert json.loads(open(f"{first}.meta.json").read())["seed"] == 9


def test_winprob_from_pools(capsys):
    status = main(["winprob", "--score", "10", "--gender", "female", "--men-pool", "10",
                   "--women-pool", "10", "--draws", "100000"])
    assert status == EXIT_OK
    row = capsys.readouterr().out.splitlines()[1].split(",")
    assert float(row[-1]) == pytest.approx(1.0 / 3.0, abs=0.01)


def test_report(tmp_path, experiment_file):
    dataset = tmp_path / "data.csv"
    assert main(["simulate", "--config", str(experiment_file), "--output", str(dataset)]) == EXIT_OK
    rates, tests = tmp_path / "rates.csv", tmp_path / "tests.csv"
    assert main(["report", "--dataset", str(dataset), "--rates", str(rates), "--tests", str(tests)]) == EXIT_OK
    assert rates.read_text().startswith("gender,treatment,condition,n,entrants,rate\n")


# ============================================================================
# Errors
# ============================================================================

def test_bad_arguments_exit_2(tmp_path, params_file):
    assert main(["dance"]) == EXIT_USAGE
    assert main(["solve", "--treatment", "baseline", "--params", str(tmp_path / "missing.json")]) == EXIT_USAGE

    invalid = tmp_path / "invalid.json"
    invalid.write_text(DEFAULT_THEORY_PARAMS.model_copy(update={"theta_f": 0.5}).to_json())
    assert main(["solve", "--treatment", "prosocial", "--params", str(invalid)]) == EXIT_USAGE

    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({**json.loads(DEFAULT_THEORY_PARAMS.to_json()), "colour": 1}))
    assert main(["solve", "--treatment", "baseline", "--params", str(unknown)]) == EXIT_USAGE

    assert main(["sweep", "--from", "2", "--to", "1", "--steps", "5", "--params", str(params_file)]) == EXIT_USAGE


def test_directories_in_place_of_files_exit_2(tmp_path, params_file):
    assert main(["solve", "--treatment", "baseline", "--params", str(tmp_path)]) == EXIT_USAGE
    assert main(["solve", "--treatment", "baseline", "--params", str(params_file),
                 "--output", str(tmp_path)]) == EXIT_USAGE


@pytest.mark.slow
def test_full_verify_exits_zero(tmp_path):
    assert main(["verify", "--draws", "200", "--seed", "7", "--output", str(tmp_path / "verify.csv")]) == EXIT_OK
