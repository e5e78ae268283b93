"""Tests for experiment matrices, batch runs and the aggregate report."""

import csv
import json

import pytest

from src.harness import (
    RESULT_COLUMNS,
    AggregateReport,
    BatchCell,
    ExperimentMatrix,
    ScenarioFactory,
    TrialRecord,
    load_experiment_matrix,
    run_batch,
)
from src.planner import PlannerMode
from src.simulator import Difficulty, FailureMode, TrialResult, run_trial


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


@pytest.fixture
def matrix_file(tmp_path, small_scenario_file):
    path = tmp_path / "matrix.json"
    path.write_text(json.dumps({
        "name": "small",
        "template": small_scenario_file.name,
        "layouts": [["T1"], ["T1", "T2"]],
        "modes": ["LidarCPP", "LidarCPPLive"],
        "seeds": [0],
    }), encoding="utf-8")
    return path


def _result(mode: PlannerMode, detected, lengths, failure: FailureMode) -> TrialResult:
    return TrialResult(
        scenario="s", mode=mode, seed=0,
        detected=detected,
        detection_time={t: (10.0 if hit else None) for t, hit in detected.items()},
        difficulty={t: Difficulty.EASY for t in detected},
        path_length=lengths, planned_length=lengths, failure_mode=failure,
        entropy_trace=((0.0, 1.0),), priority_waypoints_taken=(0, 0),
        skipped_waypoints=(0, 0), ticks=5,
    )


class TestExperimentMatrix:
    def test_reference_defaults(self):
        matrix = ExperimentMatrix()
        assert matrix.cell_count == 3 * 5 * 3
        first = next(matrix.cells())
        assert first == BatchCell(0, 0, PlannerMode.LIDAR_CPP, 0)
        assert first.label == "lidar_ic0_layout0_seed0"

    def test_shipped_matrix_file(self):
        matrix = load_experiment_matrix("data/matrices/apartment_matrix.json")
        assert matrix.seeds == [0, 1, 2]
        assert matrix.cell_count == 135
        assert matrix.map_path.endswith("apartment.vmap")

    def test_validation(self):
        with pytest.raises(ValueError):
            ExperimentMatrix(seeds=[-1])
        with pytest.raises(ValueError):
            ExperimentMatrix(initial_conditions=[])
        with pytest.raises(ValueError):
            ExperimentMatrix(layouts=[[]])

    def test_plan_key_ignores_layout_and_live(self):
        a = BatchCell(1, 0, PlannerMode.LIDAR_CPP, 2)
        b = BatchCell(1, 4, PlannerMode.LIDAR_CPP_LIVE, 2)
        assert a.plan_key == b.plan_key
        assert BatchCell(1, 0, PlannerMode.VISUAL_CPP, 2).plan_key != a.plan_key

    def test_factory_builds_reference_cells(self):
        factory = ScenarioFactory(ExperimentMatrix())
        scenario = factory.scenario(BatchCell(1, 2, PlannerMode.VISUAL_CPP, 4))
        assert scenario.robots[0].start == (4.0, 5.0, 0.0)
        assert [o.id for o in scenario.objects] == ["M2", "H2"]
        assert (scenario.mode, scenario.seed) == (PlannerMode.VISUAL_CPP, 4)

    def test_factory_rejects_unknown_objects(self):
        with pytest.raises(ValueError):
            ScenarioFactory(ExperimentMatrix(layouts=[["Z9"]]))


class TestAggregateReport:
    def test_rates_and_histogram(self):
        mode = PlannerMode.LIDAR_CPP_LIVE
        records = [
            TrialRecord(BatchCell(0, 0, mode, 0), {"A": Difficulty.EASY, "B": Difficulty.HARD},
                        _result(mode, {"A": True, "B": False}, (4.0, 6.0), FailureMode.PATH)),
            TrialRecord(BatchCell(1, 0, mode, 0), {"A": Difficulty.EASY},
                        _result(mode, {"A": True}, (2.0, 2.0), FailureMode.NONE)),
            TrialRecord(BatchCell(1, 1, mode, 0), {"A": Difficulty.EASY}, error="ValueError: boom"),
        ]
        report = AggregateReport.from_records(records)
        key = mode.value
        assert report.trials[key] == 3
        assert report.success_rate[key] == pytest.approx(2 / 4)
        assert report.trial_success_rate[key] == pytest.approx(1 / 3)
        assert report.difficulty_success[key] == {"Easy": pytest.approx(2 / 3), "Hard": 0.0}
        assert report.path_length[key][0] == (3.0, 1.0)
        assert report.combined_path_length[key] == (7.0, 3.0)
        assert report.failure_histogram[key]["Error"] == 1
        assert report.failure_histogram[key]["TransportFailure"] == 0
        assert report.mean_detection_time[key] == 10.0
        rows = report.to_rows()
        assert {"mode": key, "metric": "trials", "key": "", "value": "3"} in rows

    def test_error_row(self):
        record = TrialRecord(BatchCell(2, 3, PlannerMode.VISUAL_CPP, 1), {}, error="boom")
        row = record.to_row()
        assert list(row) == RESULT_COLUMNS
        assert (row["failure_mode"], row["success"], row["len_total"]) == ("Error", "false", "")


class TestRunBatch:
    def test_small_matrix(self, matrix_file, tmp_path):
        matrix = load_experiment_matrix(matrix_file)
        out = tmp_path / "out"
        report = run_batch(matrix, out)

        rows = read_rows(out / "results.csv")
        assert len(rows) == matrix.cell_count == 4
        assert [(r["layout"], r["mode"]) for r in rows] == [
            ("0", "LidarCPP"), ("0", "LidarCPPLive"), ("1", "LidarCPP"), ("1", "LidarCPPLive"),
        ]
        assert all(r["failure_mode"] != "Error" for r in rows)
        assert report.modes == ["LidarCPP", "LidarCPPLive"]
        assert len(list((out / "trajectories").glob("*.csv"))) == 4
        assert read_rows(out / "report.csv")[0]["metric"] == "trials"

    def test_shared_plan_matches_standalone_trial(self, matrix_file, tmp_path):
        matrix = load_experiment_matrix(matrix_file)
        run_batch(matrix, tmp_path / "out")
        cell = BatchCell(0, 1, PlannerMode.LIDAR_CPP_LIVE, 0)
        standalone = run_trial(ScenarioFactory(matrix).scenario(cell))
        row = read_rows(tmp_path / "out" / "results.csv")[3]
        assert row == standalone.to_row(0, 1)

    def test_batch_is_repeatable(self, matrix_file, tmp_path):
        matrix = load_experiment_matrix(matrix_file)
        run_batch(matrix, tmp_path / "a")
        run_batch(matrix, tmp_path / "b")
        assert (tmp_path / "a" / "results.csv").read_bytes() == (tmp_path / "b" / "results.csv").read_bytes()
        assert (tmp_path / "a" / "report.csv").read_bytes() == (tmp_path / "b" / "report.csv").read_bytes()

    def test_failing_cell_becomes_error_row(self, tmp_path, small_scenario_file):
        path = tmp_path / "broken.json"
        path.write_text(json.dumps({
            "template": small_scenario_file.name,
            "sites": [{"id": "T1", "center": [2.0, 6.0]}, {"id": "W", "center": [4.0, 2.9]}],
            "layouts": [["W"], ["T1"]],
            "modes": ["LidarCPP"],
        }), encoding="utf-8")
        report = run_batch(load_experiment_matrix(path), tmp_path / "out")
        rows = read_rows(tmp_path / "out" / "results.csv")
        assert [r["failure_mode"] == "Error" for r in rows] == [True, False]
        assert report.failure_histogram["LidarCPP"]["Error"] == 1
