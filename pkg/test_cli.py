"""Tests for the command line entry point."""

import pytest

from config import get_settings
from src.harness.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, build_parser, cli_main
from src.planner import PlannerMode, read_plan_file
from src.search_map import read_pgm
from src.simulator import read_trajectory_log


class TestParser:
    def test_mode_aliases(self):
        args = build_parser().parse_args(["run", "--scenario", "s.json", "--mode", "visual", "--seed", "4"])
        assert args.mode is PlannerMode.VISUAL_CPP
        assert args.seed == 4

    @pytest.mark.parametrize("argv", [
        [],
        ["run"],
        ["run", "--scenario", "s.json", "--mode", "sonar"],
        ["launch"],
        ["client", "--scenario", "s.json", "--connect", "127.0.0.1:9000"],
    ])
    def test_usage_errors(self, argv):
        assert cli_main(argv) == EXIT_USAGE

    def test_invalid_log_environment_is_usage_error(self, monkeypatch, capsys):
        monkeypatch.setenv("LIVE_LOG", "verbose")
        get_settings.cache_clear()
        try:
            assert cli_main(["plan", "--scenario", "s.json"]) == EXIT_USAGE
        finally:
            get_settings.cache_clear()
        assert "log_level must be one of" in capsys.readouterr().err


class TestCommands:
    def test_plan(self, small_scenario_file, tmp_path):
        out = tmp_path / "out"
        assert cli_main(["plan", "--scenario", str(small_scenario_file), "--out", str(out)]) == EXIT_OK
        routes = read_plan_file(out / "plan.txt", n_robots=2)
        assert sum(len(r) for r in routes) > 0

    def test_run_writes_outputs(self, small_scenario_file, tmp_path):
        out = tmp_path / "out"
        argv = ["--log-level", "error", "run", "--scenario", str(small_scenario_file),
                "--mode", "lidar", "--seed", "2", "--out", str(out)]
        assert cli_main(argv) == EXIT_OK
        assert read_trajectory_log(out / "trajectory.csv")
        assert read_pgm(out / "search_map.pgm").shape == (16, 16)
        header, row = (out / "results.csv").read_text().splitlines()
        assert header.startswith("mode,ic,layout,seed,success")
        assert row.startswith("LidarCPP,,,2,")

    def test_plot(self, small_scenario_file, tmp_path):
        out = tmp_path / "out"
        assert cli_main(["run", "--scenario", str(small_scenario_file), "--out", str(out)]) == EXIT_OK
        png = tmp_path / "trial.png"
        argv = ["plot", "--scenario", str(small_scenario_file), "--log", str(out / "trajectory.csv"), "--out", str(png)]
        assert cli_main(argv) == EXIT_OK
        assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_missing_scenario_file(self, tmp_path):
        assert cli_main(["run", "--scenario", str(tmp_path / "absent.json")]) == EXIT_FAILURE

    def test_unknown_robot_for_client(self, small_scenario_file):
        argv = ["client", "--scenario", str(small_scenario_file), "--connect", "127.0.0.1:1", "--robot", "ghost"]
        assert cli_main(argv) == EXIT_FAILURE

    def test_bad_listen_address(self, small_scenario_file, tmp_path):
        argv = ["serve", "--scenario", str(small_scenario_file), "--listen", "nowhere:port", "--out", str(tmp_path)]
        assert cli_main(argv) == EXIT_FAILURE
