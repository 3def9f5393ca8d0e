"""The command-line front end: subcommands, config layering, exit codes."""

import csv
import io

import pytest
from click.testing import CliRunner

from pirpsi.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def test_demo_452(runner):
    result = runner.invoke(main, ["demo", "--params", "4,5,2,3,2", "--seed", "7"])
    assert result.exit_code == 0, result.output
    assert "decode matches stored demand message: yes" in result.output
    # only possible download costs for this tuple
    assert ("downloaded sub-packets: 3" in result.output
            or "downloaded sub-packets: 4" in result.output)


def test_demo_231_many_seeds(runner):
    for seed in range(5):
        result = runner.invoke(main, ["demo", "--params", "2,3,1,1,2", "--seed", str(seed)])
        assert result.exit_code == 0, result.output


def test_demo_invalid_params_names_constraint(runner):
    result = runner.invoke(main, ["demo", "--params", "4,5,2,4,2"])
    assert result.exit_code == 2
    assert "(N-1) | L" in result.output


def test_demo_malformed_params(runner):
    result = runner.invoke(main, ["demo", "--params", "4,5"])
    assert result.exit_code == 2
    assert "five integers" in result.output


def test_check_lemmas_default_grid(runner):
    result = runner.invoke(main, ["check-lemmas"])
    assert result.exit_code == 0, result.output
    assert "85 parameter tuples" in result.output
    assert "result: pass" in result.output


def test_check_lemmas_negative_control(runner):
    result = runner.invoke(main, ["check-lemmas", "--params", "4,5,2,3,2", "--corrupt-m-coeff", "1"])
    assert result.exit_code == 1
    assert "result: FAIL" in result.output


def test_check_lemmas_tabular(runner):
    result = runner.invoke(main, ["check-lemmas", "--params", "4,5,2,3,2", "--format", "tabular"])
    assert result.exit_code == 0
    rows = list(csv.reader(io.StringIO(result.output)))
    assert rows[0] == ["check", "where", "status"]
    assert all(row[2] == "pass" for row in rows[1:])


def test_audit_small_tuple(runner):
    result = runner.invoke(main, ["audit", "--params", "2,3,1,1,2"])
    assert result.exit_code == 0, result.output
    assert "exact rate: 2/3" in result.output
    assert "capacity: 2/3" in result.output
    assert "all checks passed" in result.output


def test_audit_budget_refusal(runner):
    result = runner.invoke(main, ["audit", "--params", "6,8,5,5,2"])
    assert result.exit_code == 3
    assert "budget refusal" in result.output


def test_audit_grid_file_and_privacy_sharing(runner, tmp_path):
    grid = tmp_path / "grid.txt"
    grid.write_text("2,3,1,1,2\n2,3,1,1,3  # same N,K,M again\n")
    result = runner.invoke(main, ["audit", "--grid", str(grid)])
    assert result.exit_code == 0, result.output
    assert "shared with the first N=2 K=3 M=1 entry" in result.output


def test_audit_tabular(runner):
    result = runner.invoke(main, ["audit", "--params", "2,3,1,1,2", "--format", "tabular"])
    assert result.exit_code == 0
    rows = list(csv.reader(io.StringIO(result.output)))
    assert rows[0] == ["params", "check", "value", "status"]
    by_check = {row[1]: row for row in rows[1:]}
    assert by_check["rate"][2] == "2/3"


def test_census_452_matches_golden(runner):
    result = runner.invoke(main, ["census", "--params", "4,5,2,3,2"])
    assert result.exit_code == 0, result.output
    assert "types: 11" in result.output
    assert "golden fixture v1 comparison: match" in result.output
    assert "informational" in result.output
    assert "13/1296" in result.output
    assert "census result: pass" in result.output


def test_census_231(runner):
    result = runner.invoke(main, ["census", "--params", "2,3,1,1,2"])
    assert result.exit_code == 0, result.output
    assert "types: 3" in result.output
    assert "total probability: 1" in result.output
    assert "not applicable" in result.output


def test_census_tabular(runner):
    result = runner.invoke(main, ["census", "--params", "4,5,2,3,2", "--format", "tabular"])
    assert result.exit_code == 0
    rows = list(csv.reader(io.StringIO(result.output)))
    assert rows[0][0] == "type"
    assert len(rows) == 12  # header + 11 types


def test_simulate_small(runner):
    result = runner.invoke(main, ["simulate", "--params", "2,3,1,1,2", "--trials", "400", "--seed", "1"])
    assert result.exit_code == 0, result.output
    assert "decode successes: 400/400" in result.output


def test_simulate_single_trial(runner):
    result = runner.invoke(main, ["simulate", "--params", "4,5,2,3,2", "--trials", "1"])
    assert result.exit_code == 0, result.output
    assert "trials: 1" in result.output


def test_simulate_rejects_bad_trials(runner):
    result = runner.invoke(main, ["simulate", "--params", "2,3,1,1,2", "--trials", "0"])
    assert result.exit_code == 2


def test_config_file_layering(runner, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("params = 2,3,1,1,2\nseed = 9\ntrials = 300\nformat = tabular\n")
    result = runner.invoke(main, ["simulate", "--config", str(cfg)])
    assert result.exit_code == 0, result.output
    rows = dict(r[:2] for r in csv.reader(io.StringIO(result.output)))
    assert rows["trials"] == "300"
    assert rows["seed"] == "9"
    # command-line flags win over the file
    result = runner.invoke(main, ["simulate", "--config", str(cfg), "--trials", "100", "--format", "text"])
    assert result.exit_code == 0
    assert "trials: 100" in result.output


def test_config_file_rejects_unknown_key(runner, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("bogus = 1\n")
    result = runner.invoke(main, ["demo", "--config", str(cfg)])
    assert result.exit_code == 2
    assert "unknown key" in result.output


def test_config_file_rejects_bad_int(runner, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed = pi\n")
    result = runner.invoke(main, ["demo", "--config", str(cfg)])
    assert result.exit_code == 2
    assert "seed must be an integer" in result.output


def test_grid_file_errors(runner, tmp_path):
    missing = runner.invoke(main, ["audit", "--grid", str(tmp_path / "nope.txt")])
    assert missing.exit_code == 2
    empty = tmp_path / "empty.txt"
    empty.write_text("# nothing\n")
    result = runner.invoke(main, ["audit", "--grid", str(empty)])
    assert result.exit_code == 2
    assert "no parameter tuples" in result.output
    bad = tmp_path / "bad.txt"
    bad.write_text("2,3,1,1\n")
    result = runner.invoke(main, ["audit", "--grid", str(bad)])
    assert result.exit_code == 2
    assert "line 1" in result.output


def test_out_file_matches_stdout(runner, tmp_path):
    out = tmp_path / "report.txt"
    result = runner.invoke(main, ["census", "--params", "2,3,1,1,2", "--out", str(out)])
    assert result.exit_code == 0
    assert out.read_text() == result.output


def test_seed_out_of_range(runner):
    result = runner.invoke(main, ["demo", "--params", "2,3,1,1,2", "--seed", str(2 ** 64)])
    assert result.exit_code == 2
    assert "64-bit" in result.output
