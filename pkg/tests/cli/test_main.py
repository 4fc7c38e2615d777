"""Tests for the command-line surface."""

import json

import numpy as np
import pytest

from deposit_auction.main import create_parser, main


def _last_json(text):
    return json.loads(text.strip().splitlines()[-1])


@pytest.mark.cli
def test_solve_pooling_prints_curve_and_summary(capsys):
    assert main(["solve", "--regime", "pooling", "--cost", "0.22"]) == 0

    captured = capsys.readouterr()
    lines = captured.out.splitlines()
    assert lines[0] == "v,deposit,bid"
    assert len(lines) == 1002

    summary = json.loads(captured.err)
    assert summary["regime"] == "pooling"
    assert summary["parameters"]["u"] == pytest.approx(0.290790334, abs=1e-6)
    assert summary["parameters"]["v"] == pytest.approx(0.869803913, abs=1e-6)
    assert summary["inequality_check"]["value"] == pytest.approx(0.125857643, abs=1e-6)
    assert summary["inequality_check"]["holds"] is True
    assert summary["consistent"] is True


@pytest.mark.cli
def test_solve_summary_file(tmp_path, capsys):
    path = tmp_path / "summary.json"
    assert main(["solve", "--regime", "sequential-sqrt", "--cost", "0.15", "--summary", str(path)]) == 0

    captured = capsys.readouterr()
    assert captured.out.splitlines()[0] == "v,deposit,bid"
    assert captured.err == ""
    summary = json.loads(path.read_text())
    assert summary["parameters"]["top_deposit"] == pytest.approx(1.958454106, abs=1e-8)


@pytest.mark.cli
def test_solve_pooling_at_published_marginal_type(capsys):
    assert main(["solve", "--regime", "pooling", "--cost", "0.22", "--u", "0.382981"]) == 0

    summary = json.loads(capsys.readouterr().err)
    assert summary["parameters"]["v"] == pytest.approx(0.757919, abs=1e-6)
    assert summary["residuals"]["zero_profit"] < -0.05
    assert summary["consistent"] is False


@pytest.mark.cli
def test_solve_writes_curve(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    assert main(["solve", "--regime", "sequential-uniform", "--cost", "0.15", "--out", str(out)]) == 0

    lines = out.read_text().splitlines()
    assert lines[0] == "v,deposit,bid"
    assert len(lines) == 1002

    data = np.loadtxt(out, delimiter=",", skiprows=1)
    assert np.all(np.diff(data[:, 0]) > 0)
    below = data[:, 0] < 0.15 / 1.15
    assert np.all(data[below, 1] == 0.0)
    assert np.all(data[~below, 1] > 0.0)

    summary = json.loads(capsys.readouterr().out)
    assert summary["parameters"]["entry"] == pytest.approx(0.130435, abs=1e-6)


@pytest.mark.cli
def test_solve_simultaneous_curve(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    assert main(["solve", "--regime", "simultaneous", "--dist", "quadratic", "--cost", "0.15", "--out", str(out)]) == 0

    summary = json.loads(capsys.readouterr().out)
    assert summary["residuals"]["ode_max"] < 1e-6
    data = np.loadtxt(out, delimiter=",", skiprows=1)
    np.testing.assert_array_equal(data[:, 1], data[:, 2])


@pytest.mark.cli
def test_solve_response_curve(capsys):
    assert main(["solve", "--regime", "sequential-uniform", "--cost", "0.15", "--response", "d1=0.1"]) == 0

    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "v2,deposit"
    rows = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    assert rows.shape == (1001, 2)
    assert set(np.unique(rows[:, 1])) == {0.0, 0.1}


@pytest.mark.cli
def test_global_flags_before_command(capsys):
    assert main(["--cost", "0.22", "solve", "--regime", "pooling"]) == 0
    assert json.loads(capsys.readouterr().err)["c"] == 0.22


@pytest.mark.cli
@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--regime", "pooling", "--dist", "sqrt", "--cost", "0.22"],
        ["solve", "--cost", "0.22"],
        ["solve", "--regime", "pooling", "--cost", "0"],
        ["simulate", "--regime", "pooling", "--cost", "0.22", "--n", "0"],
        ["verify", "--regime", "pooling", "--cost", "0.22", "--mutate", "factor=2"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    error = _last_json(capsys.readouterr().err)
    assert "error" in error


@pytest.mark.cli
def test_unknown_command_exits_2():
    assert main(["plot"]) == 2


@pytest.mark.cli
def test_help_exits_0(capsys):
    assert main(["--help"]) == 0
    assert "solve" in capsys.readouterr().out


@pytest.mark.cli
def test_simulate_is_deterministic(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["simulate", "--regime", "pooling", "--cost", "0.22", "--n", "5000", "--seed", "9"]
    assert main(argv + ["--out", str(first)]) == 0
    assert main(argv + ["--out", str(second)]) == 0

    assert first.read_bytes() == second.read_bytes()
    metrics = json.loads(first.read_text())
    assert metrics["n"] == 5000
    assert metrics["misallocation_prob"] > 0


@pytest.mark.cli
def test_config_file_and_flag_override(tmp_path, capsys):
    config = tmp_path / "run.env"
    config.write_text("regime=pooling\ncost=0.5\nlog-level=ERROR\n")

    assert main(["solve", "--config", str(config), "--cost", "0.22"]) == 0
    summary = json.loads(capsys.readouterr().err)
    assert summary["c"] == 0.22
    assert summary["parameters"]["u"] == pytest.approx(0.290790334, abs=1e-6)


@pytest.mark.cli
def test_config_file_unknown_key(tmp_path, capsys):
    config = tmp_path / "run.env"
    config.write_text("regime=pooling\ncost=0.22\ncolour=blue\n")

    assert main(["solve", "--config", str(config)]) == 2
    assert _last_json(capsys.readouterr().err)["details"]["keys"] == ["colour"]


@pytest.mark.cli
def test_missing_config_file(tmp_path, capsys):
    assert main(["solve", "--config", str(tmp_path / "absent.env")]) == 2


@pytest.mark.cli
def test_deviation_scan(tmp_path):
    out = tmp_path / "scan.csv"
    argv = ["deviation-scan", "--regime", "pooling", "--cost", "0.22", "--v1", "1.0", "--points", "10"]
    assert main(argv + ["--out", str(out)]) == 0

    lines = out.read_text().splitlines()
    assert lines[0] == "d1,profit"
    assert len(lines) == 11


@pytest.mark.cli
def test_solve_deviation_scan_flag(capsys):
    argv = ["solve", "--regime", "pooling", "--cost", "0.22", "--deviation-scan", "v1=0.5", "--points", "5"]
    assert main(argv) == 0
    assert capsys.readouterr().out.splitlines()[0] == "d1,profit"


@pytest.mark.cli
def test_deviation_scan_needs_type(capsys):
    assert main(["deviation-scan", "--regime", "pooling", "--cost", "0.22"]) == 2


@pytest.mark.cli
@pytest.mark.slow
def test_verify_exit_codes(tmp_path):
    grids = ["--type-grid", "20", "--dev-grid", "100", "--deposit-grid", "8"]
    report = tmp_path / "report.json"
    assert main(["verify", "--regime", "pooling", "--cost", "0.22", "--out", str(report)] + grids) == 0
    assert json.loads(report.read_text())["passed"] is True

    mutated = ["verify", "--regime", "sequential-sqrt", "--cost", "0.15", "--mutate", "scale=1.5"]
    assert main(mutated + ["--out", str(tmp_path / "mutated.json")] + grids) == 1


@pytest.mark.cli
def test_parser_lists_commands():
    parser = create_parser()
    args = parser.parse_args(["simulate", "--regime", "pooling", "--cost", "0.22", "--n", "10"])
    assert args.command == "simulate"
    assert args.n == 10
    assert not hasattr(args, "seed")
