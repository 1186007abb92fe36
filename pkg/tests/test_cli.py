import json

import pytest
from click.testing import CliRunner

from pvdyn.cli import main
from pvdyn.bench import CSV_HEADER


@pytest.fixture
def runner():
    return CliRunner()


class TestInfo:
    def test_humanoid(self, runner):
        result = runner.invoke(main, ["info", "--model", "humanoid"])
        assert result.exit_code == 0
        assert "dofs (n): 38" in result.output
        assert "base: floating" in result.output

    def test_chain(self, runner):
        result = runner.invoke(main, ["info", "--model", "chain:12"])
        assert result.exit_code == 0
        assert "dofs (n): 12" in result.output
        assert "depth (d): 12" in result.output

    def test_urdf_file(self, runner, tmp_path):
        from pvdyn import generate_tree, serialize_urdf
        path = tmp_path / "robot.urdf"
        path.write_text(serialize_urdf(generate_tree(6, 2, seed=1)))
        result = runner.invoke(main, ["info", "--model", str(path)])
        assert result.exit_code == 0
        assert "dofs (n): 6" in result.output

    def test_bad_model_is_usage_error(self, runner):
        result = runner.invoke(main, ["info", "--model", "bogus:7"])
        assert result.exit_code == 2


class TestCheck:
    def test_quick_check_passes(self, runner, tmp_path):
        out = tmp_path / "report.json"
        result = runner.invoke(main, ["check", "--sizes", "8", "--instances", "3",
                                      "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert "PASS" in result.output
        report = json.loads(out.read_text())
        assert all(r["passed"] for r in report)


class TestCheckFailureExit:
    def test_failing_report_exits_one(self, runner, monkeypatch):
        from pvdyn.checks import CheckReport, CheckResult
        import pvdyn.cli as cli_mod

        def fake_suite(seed=0, sizes=(), instance_count=0):
            return CheckReport([CheckResult("broken", False, 1.0, 1e-8)])

        monkeypatch.setattr(cli_mod.checks, "run_check_suite", fake_suite)
        result = runner.invoke(main, ["check"])
        assert result.exit_code == 1
        assert "FAIL" in result.output


class TestBench:
    def test_csv_output(self, runner, tmp_path):
        out = tmp_path / "bench.csv"
        result = runner.invoke(main, [
            "bench", "--model", "chain:6,chain:10", "--solver", "pv,caba",
            "--m", "3", "--reps", "30", "--out", str(out)])
        assert result.exit_code == 0, result.output
        lines = out.read_text().strip().split("\n")
        assert lines[0] == CSV_HEADER
        assert len(lines) == 5

    def test_json_output(self, runner, tmp_path):
        out = tmp_path / "bench.json"
        result = runner.invoke(main, [
            "bench", "--model", "chain:4", "--solver", "aba", "--m", "0",
            "--out", str(out)])
        assert result.exit_code == 0, result.output
        rows = json.loads(out.read_text())
        assert rows[0]["algorithm"] == "aba"

    def test_unknown_solver_usage_error(self, runner):
        result = runner.invoke(main, ["bench", "--model", "chain:4",
                                      "--solver", "sorcery"])
        assert result.exit_code == 2

    def test_low_reps_usage_error(self, runner):
        result = runner.invoke(main, ["bench", "--model", "chain:4",
                                      "--solver", "pv", "--reps", "3"])
        assert result.exit_code == 2


class TestRollout:
    def test_free_fall_summary(self, runner, tmp_path):
        out = tmp_path / "roll.json"
        result = runner.invoke(main, [
            "rollout", "--model", "tree:4:2", "--solver", "aba", "--dt", "1e-3",
            "--steps", "50", "--out", str(out)])
        assert result.exit_code == 0, result.output
        summary = json.loads(out.read_text())
        assert summary["steps"] == 50

    def test_constrained_rollout(self, runner):
        result = runner.invoke(main, [
            "rollout", "--model", "chain:8", "--solver", "caba", "--m", "3",
            "--steps", "20", "--seed", "5", "--baumgarte", "10,100"])
        assert result.exit_code == 0, result.output

    def test_unknown_solver(self, runner):
        result = runner.invoke(main, ["rollout", "--model", "chain:4",
                                      "--solver", "nope"])
        assert result.exit_code == 2

    def test_missing_model_usage_error(self, runner):
        result = runner.invoke(main, ["rollout"])
        assert result.exit_code == 2
