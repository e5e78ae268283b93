"""
Batch experiments over (initial condition, layout, mode, seed) cells.

Every cell is a full deterministic trial. Cells sharing an initial condition,
base planner mode and seed share one coverage plan, since objects never
enter planning. Results land in ``results.csv`` (one row per cell, failed
cells included) and ``report.csv`` (aggregates).
"""

import csv
import json
import logging
import time
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import psutil
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..geometry import VectorMap
from ..observability import trace_operation
from ..planner import CoveragePlan, PlannerMode
from ..simulator import (
    Difficulty,
    FailureMode,
    Scenario,
    TrialResult,
    WorldObject,
    build_reference_apartment,
    load_scenario,
    plan_for,
    reference_scenario,
    run_trial,
)

logger = logging.getLogger(__name__)

RESULT_COLUMNS = [
    "mode", "ic", "layout", "seed", "success", "objects_found", "failure_mode",
    "len_robot0", "len_robot1", "len_total", "detect_t0", "detect_t1", "priority_count",
]

REPORT_COLUMNS = ["mode", "metric", "key", "value"]

PoseTuple = Tuple[float, float, float]


class ExperimentMatrix(BaseModel):
    """
    Cross product of initial conditions, object layouts, planner modes and seeds.

    Without a ``template`` the reference apartment supplies the team, the
    object sites, the three initial conditions and the five layouts.
    """

    model_config = ConfigDict(frozen=True)

    name: str = Field(default="apartment", description="Label used in logs")
    template: Optional[str] = Field(
        default=None,
        description="Scenario file providing map, team and settings; the reference apartment when absent",
    )
    map_path: str = Field(
        default="data/maps/apartment.vmap",
        description="Vector map of the reference apartment (ignored with a template)",
    )
    sites: Optional[List[WorldObject]] = Field(
        default=None,
        description="Object pool the layouts draw from; template objects or apartment sites when absent",
    )
    initial_conditions: Optional[List[List[PoseTuple]]] = Field(
        default=None,
        description="Per-robot start poses for each initial condition",
    )
    layouts: Optional[List[List[str]]] = Field(
        default=None,
        description="Object ids placed in each layout",
    )
    modes: List[PlannerMode] = Field(
        default_factory=lambda: [PlannerMode.LIDAR_CPP, PlannerMode.VISUAL_CPP, PlannerMode.LIDAR_CPP_LIVE],
        min_length=1,
    )
    seeds: List[int] = Field(default_factory=lambda: [0], min_length=1)

    @field_validator("seeds")
    @classmethod
    def validate_seeds(cls, v: List[int]) -> List[int]:
        if any(s < 0 for s in v):
            raise ValueError("seeds must be non-negative")
        return v

    @model_validator(mode="after")
    def validate_shape(self) -> "ExperimentMatrix":
        if self.initial_conditions is not None and not self.initial_conditions:
            raise ValueError("initial_conditions must not be empty")
        if self.layouts is not None and not all(self.layouts):
            raise ValueError("every layout needs at least one object")
        return self

    @property
    def cell_count(self) -> int:
        return len(self.resolved_initial_conditions()) * len(self.resolved_layouts()) * len(self.modes) * len(self.seeds)

    def resolved_initial_conditions(self) -> List[List[PoseTuple]]:
        if self.initial_conditions is not None:
            return self.initial_conditions
        if self.template is not None:
            return [[]]
        return [list(ic) for ic in build_reference_apartment().initial_conditions]

    def resolved_layouts(self) -> List[List[str]]:
        if self.layouts is not None:
            return self.layouts
        if self.template is not None:
            return [[]]
        return [list(layout) for layout in build_reference_apartment().layouts]

    def cells(self) -> Iterator["BatchCell"]:
        """Cells in IC, layout, mode, seed order."""
        for ic in range(len(self.resolved_initial_conditions())):
            for layout in range(len(self.resolved_layouts())):
                for mode in self.modes:
                    for seed in self.seeds:
                        yield BatchCell(ic, layout, mode, seed)


@dataclass(frozen=True)
class BatchCell:
    ic: int
    layout: int
    mode: PlannerMode
    seed: int

    @property
    def plan_key(self) -> Tuple[int, PlannerMode, int]:
        return self.ic, self.mode.base_mode, self.seed

    @property
    def label(self) -> str:
        return f"{self.mode.cli_name}_ic{self.ic}_layout{self.layout}_seed{self.seed}"


def load_experiment_matrix(path: Union[str, Path]) -> ExperimentMatrix:
    """Read a matrix JSON file; relative template and map paths resolve against its directory."""
    path = Path(path)
    matrix = ExperimentMatrix.model_validate(json.loads(path.read_text(encoding="utf-8")))
    update = {}
    if matrix.template is not None and not Path(matrix.template).is_absolute():
        update["template"] = str(path.parent / matrix.template)
    if not Path(matrix.map_path).is_absolute():
        update["map_path"] = str(path.parent / matrix.map_path)
    return matrix.model_copy(update=update)


class ScenarioFactory:
    """Builds the scenario of each matrix cell from the base scenario and object pool."""

    def __init__(self, matrix: ExperimentMatrix):
        if matrix.template is not None:
            self.base = load_scenario(matrix.template)
            pool = matrix.sites or self.base.objects
        else:
            self.base = reference_scenario(0, 0, map_path=matrix.map_path)
            pool = matrix.sites or list(build_reference_apartment().sites.values())
        self.sites: Dict[str, WorldObject] = {o.id: o for o in pool}
        self.initial_conditions = matrix.resolved_initial_conditions()
        self.layouts = matrix.resolved_layouts()
        for ic in self.initial_conditions:
            if ic and len(ic) != len(self.base.robots):
                raise ValueError(f"initial condition {ic} has {len(ic)} poses for {len(self.base.robots)} robots")
        for layout in self.layouts:
            missing = [name for name in layout if name not in self.sites]
            if missing:
                raise ValueError(f"layout references unknown objects {missing}")
        self.name = matrix.name

    def scenario(self, cell: BatchCell) -> Scenario:
        starts = self.initial_conditions[cell.ic]
        layout = self.layouts[cell.layout]
        robots = self.base.robots
        if starts:
            robots = [r.model_copy(update={"start": tuple(s)}) for r, s in zip(robots, starts)]
        objects = [self.sites[name] for name in layout] if layout else self.base.objects
        return Scenario.model_validate({
            **self.base.model_dump(),
            "name": f"{self.name}-ic{cell.ic}-layout{cell.layout}",
            "robots": [r.model_dump() for r in robots],
            "objects": [o.model_dump() for o in objects],
            "mode": cell.mode,
            "seed": cell.seed,
        })


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one cell; ``result`` is absent when the trial raised."""

    cell: BatchCell
    targets: Dict[str, Difficulty]
    result: Optional[TrialResult] = None
    error: Optional[str] = None

    @property
    def failure_mode(self) -> FailureMode:
        return FailureMode.ERROR if self.result is None else self.result.failure_mode

    def to_row(self) -> Dict[str, str]:
        if self.result is not None:
            return self.result.to_row(self.cell.ic, self.cell.layout)
        row = {column: "" for column in RESULT_COLUMNS}
        row.update({
            "mode": self.cell.mode.value,
            "ic": str(self.cell.ic),
            "layout": str(self.cell.layout),
            "seed": str(self.cell.seed),
            "success": "false",
            "objects_found": "0",
            "failure_mode": FailureMode.ERROR.value,
        })
        return row


def _run_cells(factory: ScenarioFactory, cells: Sequence[BatchCell], out_dir: Path) -> List[TrialRecord]:
    """Run cells that share one plan key; the plan is computed once."""
    records = []
    vector_map: Optional[VectorMap] = None
    plan: Optional[CoveragePlan] = None
    for cell in cells:
        scenario = factory.scenario(cell)
        targets = {o.id: o.difficulty for o in scenario.objects if o.is_target}
        try:
            if vector_map is None:
                vector_map = scenario.load_map()
            if plan is None:
                plan = plan_for(scenario.with_run(mode=cell.mode.base_mode), vector_map)
            log_path = out_dir / "trajectories" / f"{cell.label}.csv"
            result = run_trial(scenario, vector_map, plan.with_mode(cell.mode), log_path)
            records.append(TrialRecord(cell, targets, result))
        except Exception as e:
            logger.error(f"Cell {cell.label} failed: {type(e).__name__}: {e}")
            records.append(TrialRecord(cell, targets, error=f"{type(e).__name__}: {e}"))
    return records


def _run_group(args: Tuple[ExperimentMatrix, List[BatchCell], str]) -> List[TrialRecord]:
    matrix, cells, out_dir = args
    return _run_cells(ScenarioFactory(matrix), cells, Path(out_dir))


def _mean_std(values: Sequence[float]) -> Tuple[float, float]:
    if not values:
        return 0.0, 0.0
    array = np.asarray(values, dtype=float)
    return float(array.mean()), float(array.std())


@dataclass
class AggregateReport:
    """
    Per-mode aggregates of a batch.

    ``success_rate`` is found targets over all targets; ``trial_success_rate``
    counts trials where every target was found. Errored cells count as trials
    with no object found and are left out of the path-length statistics.
    """

    modes: List[str]
    trials: Dict[str, int] = field(default_factory=dict)
    success_rate: Dict[str, float] = field(default_factory=dict)
    trial_success_rate: Dict[str, float] = field(default_factory=dict)
    difficulty_success: Dict[str, Dict[str, float]] = field(default_factory=dict)
    path_length: Dict[str, List[Tuple[float, float]]] = field(default_factory=dict)
    combined_path_length: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    ic_path_length: Dict[str, Dict[int, List[float]]] = field(default_factory=dict)
    failure_histogram: Dict[str, Dict[str, int]] = field(default_factory=dict)
    mean_detection_time: Dict[str, Optional[float]] = field(default_factory=dict)

    @classmethod
    def from_records(cls, records: Sequence[TrialRecord]) -> "AggregateReport":
        modes = list(dict.fromkeys(r.cell.mode.value for r in records))
        report = cls(modes=modes)
        for mode in modes:
            subset = [r for r in records if r.cell.mode.value == mode]
            completed = [r.result for r in subset if r.result is not None]
            report.trials[mode] = len(subset)

            found = total = 0
            by_difficulty: Dict[str, List[int]] = defaultdict(lambda: [0, 0])
            for record in subset:
                for target, difficulty in record.targets.items():
                    hit = record.result is not None and record.result.detected.get(target, False)
                    found += hit
                    total += 1
                    by_difficulty[difficulty.value][0] += hit
                    by_difficulty[difficulty.value][1] += 1
            report.success_rate[mode] = found / total if total else 0.0
            report.trial_success_rate[mode] = sum(r.success for r in completed) / len(subset)
            report.difficulty_success[mode] = {
                d.value: by_difficulty[d.value][0] / by_difficulty[d.value][1]
                for d in Difficulty if by_difficulty[d.value][1]
            }

            n_robots = max((len(r.path_length) for r in completed), default=0)
            report.path_length[mode] = [
                _mean_std([r.path_length[i] for r in completed if i < len(r.path_length)])
                for i in range(n_robots)
            ]
            report.combined_path_length[mode] = _mean_std([r.total_path_length for r in completed])

            per_ic: Dict[int, List[TrialResult]] = defaultdict(list)
            for record in subset:
                if record.result is not None:
                    per_ic[record.cell.ic].append(record.result)
            report.ic_path_length[mode] = {
                ic: [_mean_std([r.path_length[i] for r in results])[0] for i in range(len(results[0].path_length))]
                for ic, results in sorted(per_ic.items())
            }

            histogram = Counter(r.failure_mode.value for r in subset)
            report.failure_histogram[mode] = {f.value: histogram.get(f.value, 0) for f in FailureMode}

            times = [t for r in completed for t in r.detection_time.values() if t is not None]
            report.mean_detection_time[mode] = float(np.mean(times)) if times else None
        return report

    def to_rows(self) -> List[Dict[str, str]]:
        """Long-format rows for ``report.csv``."""
        rows = []

        def add(mode: str, metric: str, key: str, value) -> None:
            text = "" if value is None else (f"{value:.6f}" if isinstance(value, float) else str(value))
            rows.append({"mode": mode, "metric": metric, "key": key, "value": text})

        for mode in self.modes:
            add(mode, "trials", "", self.trials[mode])
            add(mode, "success_rate", "", self.success_rate[mode])
            add(mode, "trial_success_rate", "", self.trial_success_rate[mode])
            for difficulty, rate in self.difficulty_success[mode].items():
                add(mode, "difficulty_success", difficulty, rate)
            for i, (mean, std) in enumerate(self.path_length[mode]):
                add(mode, "path_length_mean", f"robot{i}", mean)
                add(mode, "path_length_std", f"robot{i}", std)
            mean, std = self.combined_path_length[mode]
            add(mode, "path_length_mean", "combined", mean)
            add(mode, "path_length_std", "combined", std)
            for ic, lengths in self.ic_path_length[mode].items():
                for i, length in enumerate(lengths):
                    add(mode, "ic_path_length_mean", f"ic{ic}_robot{i}", length)
            for failure, count in self.failure_histogram[mode].items():
                add(mode, "failure_mode", failure, count)
            add(mode, "mean_detection_time", "", self.mean_detection_time[mode])
        return rows


def write_csv(path: Path, columns: Sequence[str], rows: Sequence[Dict[str, str]]) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def write_results_csv(path: Union[str, Path], records: Sequence[TrialRecord]) -> None:
    write_csv(Path(path), RESULT_COLUMNS, [r.to_row() for r in records])


def _log_resources(started: float, cells: int) -> None:
    process = psutil.Process()
    rss_mb = process.memory_info().rss / (1024 * 1024)
    cpu_s = sum(process.cpu_times()[:2])
    logger.info(
        f"Batch resources: {cells} cells in {time.perf_counter() - started:.1f}s wall, "
        f"{cpu_s:.1f}s cpu, {rss_mb:.0f} MiB rss"
    )


def run_batch(matrix: ExperimentMatrix, out_dir: Union[str, Path], workers: int = 1) -> AggregateReport:
    """
    Run every matrix cell and write ``results.csv``, ``report.csv`` and one trajectory log per trial.

    Args:
        matrix: The experiment matrix.
        out_dir: Output directory, created if needed.
        workers: Worker processes; groups of cells sharing a plan run together.

    Returns:
        AggregateReport over all cells.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    factory = ScenarioFactory(matrix)
    cells = list(matrix.cells())

    groups: Dict[Tuple, List[BatchCell]] = defaultdict(list)
    for cell in cells:
        groups[cell.plan_key].append(cell)

    with trace_operation("harness", "run_batch", {"live.matrix": matrix.name, "live.cells": len(cells)}):
        logger.info(f"Batch {matrix.name}: {len(cells)} cells, {len(groups)} plans, {workers} worker(s)")
        by_cell: Dict[BatchCell, TrialRecord] = {}
        if workers > 1:
            jobs = [(matrix, group, str(out)) for group in groups.values()]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for records in pool.map(_run_group, jobs):
                    by_cell.update((r.cell, r) for r in records)
        else:
            for done, group in enumerate(groups.values(), start=1):
                by_cell.update((r.cell, r) for r in _run_cells(factory, group, out))
                logger.info(f"Batch {matrix.name}: plan group {done}/{len(groups)} finished")

        records = [by_cell[cell] for cell in cells]
        write_results_csv(out / "results.csv", records)
        report = AggregateReport.from_records(records)
        write_csv(out / "report.csv", REPORT_COLUMNS, report.to_rows())

    _log_resources(started, len(cells))
    for mode in report.modes:
        logger.info(
            f"{mode}: success {report.success_rate[mode]:.0%}, "
            f"combined path {report.combined_path_length[mode][0]:.1f} m, "
            f"failures {report.failure_histogram[mode]}"
        )
    return report
