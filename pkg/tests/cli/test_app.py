from __future__ import annotations

import json

import polars as pl
import pytest

from lumaca.cli import execute, main, parse_settings
from lumaca.cli.app import EXIT_CONFIG, EXIT_FAILED, EXIT_OK
from lumaca.cli.commands import ito_function, step_fixture_residuals
from lumaca.exceptions import ConfigurationError

# E_{1/2}(-1) = erfcx(1)
ML_HALF_AT_MINUS_ONE = 0.42758357615580705


def _out(tmp_path, name="out"):
    return f"output_dir={(tmp_path / name).as_posix()}"


def _manifest(root):
    return json.loads((root / "manifest.json").read_text())


# ------- exit codes

def test_special_passes(tmp_path):
    code = main([
        "special",
        "--override", f"special.expected={ML_HALF_AT_MINUS_ONE!r}",
        "--override", _out(tmp_path),
    ])
    assert code == EXIT_OK
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["passed"] is True
    assert report["branch"] == "series"
    assert [a["path"] for a in _manifest(tmp_path / "out")["artifacts"]] == ["report.json"]


def test_special_fails_on_a_wrong_value(tmp_path):
    code = main(["special", "--override", "special.expected=0.5", "--override", _out(tmp_path)])
    assert code == EXIT_FAILED


def test_configuration_errors_exit_with_two(tmp_path):
    config = tmp_path / "run.ini"
    config.write_text("[run]\ncommand = special\nsed = 1\n", encoding="utf-8")
    assert main(["run", "--config", str(config)]) == EXIT_CONFIG
    assert main(["run", "--config", str(tmp_path / "missing.ini")]) == EXIT_CONFIG
    # moments defaults need an inverse-stable clock
    assert main(["moments", "--override", _out(tmp_path)]) == EXIT_CONFIG


def test_thread_count_is_validated():
    with pytest.raises(SystemExit):
        main(["special", "--threads", "0"])


def test_bad_threads_environment_exits_with_two(tmp_path, monkeypatch):
    monkeypatch.setenv("THREADS", "many")
    code = main([
        "simulate",
        "--override", "n_paths=2",
        "--override", "clock.step=0.0625",
        "--override", _out(tmp_path),
    ])
    assert code == EXIT_CONFIG


def test_simulate_report_does_not_depend_on_threads(tmp_path):
    reports = []
    for threads in ("1", "3"):
        name = f"out{threads}"
        code = main([
            "simulate",
            "--override", "n_paths=6",
            "--override", "clock.step=0.015625",
            "--override", "clock.kind=inverse_stable",
            "--override", "clock.beta=0.7",
            "--override", _out(tmp_path, name),
            "--threads", threads,
        ])
        assert code == EXIT_OK
        reports.append((tmp_path / name / "report.json").read_text())
    assert reports[0] == reports[1]


# ------- commands

def test_simulate_writes_paths(tmp_path):
    code = main([
        "simulate",
        "--override", "n_paths=4",
        "--override", "clock.step=0.015625",
        "--override", "simulate.save_paths=2",
        "--override", _out(tmp_path),
        "--threads", "2",
    ])
    assert code == EXIT_OK
    root = tmp_path / "out"
    frame = pl.read_csv(root / "paths" / "path_00001.csv")
    assert frame.columns == ["t", "value"]
    assert frame["t"][-1] == 1.0
    report = json.loads((root / "report.json").read_text())
    assert report["terminal"]["n"] == 4
    assert report["saved_paths"] == 2


def test_step_fixture_is_a_negative_check(tmp_path):
    settings = parse_settings(
        "[run]\ncommand = verify\nn_paths = 100\nseed = 3\n"
        "[clock]\nstep = 0.01\n"
        "[verify]\nchecks = step_fixture\nnegative_fraction = 0.85\n",
        [_out(tmp_path)],
    )
    result = execute(settings)
    assert result.passed
    (row,) = result.rows
    assert row.name == "step_fixture"
    assert row.value >= 0.85

    residuals = pl.read_csv(tmp_path / "out" / "residuals.csv")
    assert residuals.height == 100
    assert residuals.columns == ["index", "step_fixture"]


def test_step_fixture_residuals_do_not_vanish():
    res = step_fixture_residuals(1.0, 0.01, 20, seed=0)
    assert res.shape == (20,)
    assert res.max() > 0.1


def test_reruns_give_identical_reports(tmp_path):
    args = ["special", "--override", "special.z=-3.0", "--override", "special.beta=0.8"]
    assert main([*args, "--override", _out(tmp_path, "a")]) == EXIT_OK
    assert main([*args, "--override", _out(tmp_path, "b")]) == EXIT_OK
    a = (tmp_path / "a" / "report.json").read_bytes()
    b = (tmp_path / "b" / "report.json").read_bytes()
    assert a == b
    assert _manifest(tmp_path / "a")["digest"] == _manifest(tmp_path / "b")["digest"]


def test_verify_rejects_unknown_checks(tmp_path):
    settings = parse_settings("[verify]\nchecks = magic\n", [_out(tmp_path)], "verify")
    with pytest.raises(ConfigurationError):
        execute(settings)


def test_ito_functions():
    f, df, d2f = ito_function("sin")
    assert f(0.0) == 0.0
    assert df(0.0) == 1.0
    with pytest.raises(ConfigurationError):
        ito_function("tan")
