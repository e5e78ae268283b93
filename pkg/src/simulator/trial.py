"""
Trial execution: per-robot runtimes, the shared-map coordinator, and results.

A tick runs every robot in index order (move, drift, lidar, LIVE pipeline,
waypoint manager, camera) against the search map as it stood at the end of
the previous tick; the coordinator then applies all footprints in robot
index order and samples the entropy. The same two halves run in one process
(:func:`run_trial`) or split across the coordination server and its robot
clients, which is why both produce identical results.
"""

import logging
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..geometry import Pose2, VectorMap
from ..inspection import detect_inspection_regions, region_to_priority_waypoint, select_nearest
from ..observability import trace_operation
from ..perception import classify_scan, create_scan_history
from ..planner import CoveragePlan, PlannerMode, plan_coverage
from ..search_map import SearchMap, entropy, export_pgm, init_search_map, observe_footprint
from ..utils import robot_streams
from ..waypoint_manager import Waypoint, WaypointKind, WaypointManager, WmEvent
from .drift import DriftModel
from .navigation import NavigationGrid, build_navigation_grid, step_robot
from .scenario import Scenario
from .sensors import camera_candidates, camera_detect, lidar_sweep
from .trajectory import TrajectoryLogWriter
from .world import Difficulty, target_ids

logger = logging.getLogger(__name__)

STALL_TICKS = 6
DWELL_TICKS = 4
APPROACH_TRIES = 4
VIEW_MARGIN = 0.5


class FailureMode(str, Enum):
    NONE = "None"
    PATH = "PathFailure"
    DETECTION = "DetectionFailure"
    TRANSPORT = "TransportFailure"
    ERROR = "Error"


@dataclass(frozen=True)
class RobotUpdate:
    """What one robot reports after its part of a tick."""

    robot: int
    tick: int
    true_pose: Pose2
    believed_pose: Pose2
    lidar_footprint_pose: Pose2
    camera_footprint_pose: Pose2
    travelled: float
    detections: Tuple[str, ...]
    candidates: Tuple[str, ...]
    wm_state: str
    events: Tuple[str, ...]
    done: bool
    priority_count: int
    skipped: int


@dataclass(frozen=True)
class RoundOutcome:
    tick: int
    stop: bool
    observed_cells: Tuple[int, ...]


@dataclass(frozen=True)
class TrialResult:
    """Outcome of one trial; equality is field-by-field."""

    scenario: str
    mode: PlannerMode
    seed: int
    detected: Dict[str, bool]
    detection_time: Dict[str, Optional[float]]
    difficulty: Dict[str, Difficulty]
    path_length: Tuple[float, ...]
    planned_length: Tuple[float, ...]
    failure_mode: FailureMode
    entropy_trace: Tuple[Tuple[float, float], ...]
    priority_waypoints_taken: Tuple[int, ...]
    skipped_waypoints: Tuple[int, ...]
    ticks: int
    error: Optional[str] = None

    @property
    def objects_found(self) -> int:
        return sum(self.detected.values())

    @property
    def success(self) -> bool:
        return bool(self.detected) and all(self.detected.values())

    @property
    def total_path_length(self) -> float:
        return float(sum(self.path_length))

    def to_row(self, ic: Union[int, str] = "", layout: Union[int, str] = "") -> Dict[str, str]:
        """One ``results.csv`` row; lengths and times use fixed 6-decimal text."""
        lengths = list(self.path_length) + [0.0] * max(0, 2 - len(self.path_length))
        times = [self.detection_time[t] for t in self.detected] + [None, None]
        return {
            "mode": self.mode.value,
            "ic": str(ic),
            "layout": str(layout),
            "seed": str(self.seed),
            "success": str(self.success).lower(),
            "objects_found": str(self.objects_found),
            "failure_mode": self.failure_mode.value,
            "len_robot0": f"{lengths[0]:.6f}",
            "len_robot1": f"{lengths[1]:.6f}",
            "len_total": f"{self.total_path_length:.6f}",
            "detect_t0": "" if times[0] is None else f"{times[0]:.6f}",
            "detect_t1": "" if times[1] is None else f"{times[1]:.6f}",
            "priority_count": str(sum(self.priority_waypoints_taken)),
        }

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["mode"] = self.mode.value
        data["failure_mode"] = self.failure_mode.value
        data["difficulty"] = {k: v.value for k, v in self.difficulty.items()}
        data["entropy_trace"] = [list(sample) for sample in self.entropy_trace]
        return data


class RobotRuntime:
    """
    One robot's side of a trial: true pose, drift, scan history and waypoint manager.

    Runs unchanged in-process and inside a networked robot client.
    """

    def __init__(
        self,
        index: int,
        scenario: Scenario,
        vector_map: VectorMap,
        global_path: Sequence[Pose2],
        rng: np.random.Generator,
        nav: Optional[NavigationGrid] = None,
    ):
        self.index = index
        self.scenario = scenario
        self.spec = scenario.robots[index]
        self.vector_map = vector_map
        self.rng = rng
        self.true_pose = self.spec.start_pose
        self.drift = DriftModel(scenario.drift, rng)
        self.history = create_scan_history(scenario.perception)
        self.nav = nav or build_navigation_grid(vector_map, scenario.objects, self.spec.radius)

        wm_cfg = scenario.waypoints
        if scenario.mode is PlannerMode.VISUAL_CPP:
            wm_cfg = wm_cfg.model_copy(update={"global_heading_tol": wm_cfg.heading_tol})
        self.wm = WaypointManager(global_path, wm_cfg)
        self.waypoint: Optional[Waypoint] = self.wm.tick(self.drift.believe(self.true_pose), 0.0)
        self._pending_events: List[str] = [e.value for e in self.wm.events]
        self._route = None
        self._route_for: Optional[Waypoint] = None
        self._approach: Optional[Pose2] = None
        self._dwell = 0
        self._stall = 0
        self._logger = logging.getLogger(f"{__name__}.RobotRuntime")

    @property
    def name(self) -> str:
        return self.spec.name

    def _face_heading(self, waypoint: Waypoint) -> bool:
        return waypoint.kind is WaypointKind.PRIORITY or self.scenario.mode is PlannerMode.VISUAL_CPP

    def _skip(self, events: List[str]) -> None:
        self.wm.skip()
        events.append(WmEvent.WAYPOINT_SKIPPED.value)
        self.waypoint = self.wm.current_waypoint()
        self._route = None
        self._approach = None
        self._stall = 0
        self._dwell = 0

    def _inspected_point(self) -> Tuple[float, float]:
        """True-frame point an inspection waypoint looks at, one standoff ahead of it."""
        target = self.drift.to_true(self.waypoint.target)
        standoff = self.scenario.inspection.standoff
        return (target.x + standoff * np.cos(target.theta), target.y + standoff * np.sin(target.theta))

    def _fall_back(self) -> bool:
        """
        Swap an inspection pose that cannot be reached for a free spot in
        camera range with a clear view of the inspected point.
        """
        if self.waypoint.kind is not WaypointKind.PRIORITY or self._approach is not None:
            return False
        px, py = self._inspected_point()
        start = (self.true_pose.x, self.true_pose.y)
        spots = self.nav.viewing_spots((px, py), self.spec.camera_fp.range - VIEW_MARGIN, near=start)
        for spot in spots[:APPROACH_TRIES]:
            route = self.nav.plan_route(start, spot)
            if route is not None:
                self._approach = Pose2(spot[0], spot[1], float(np.arctan2(py - spot[1], px - spot[0])))
                self._route = route
                self._stall = 0
                self._logger.debug(f"{self.name} inspecting ({px:.2f}, {py:.2f}) from {self._approach.as_tuple()}")
                return True
        return False

    def _at_approach(self) -> bool:
        return (self.true_pose.distance_to(self._approach) <= self.scenario.waypoints.arrival_tol
                and abs(self.true_pose.heading_error(self._approach.theta)) <= self.scenario.waypoints.heading_tol)

    def _move(self, events: List[str]) -> float:
        if self.waypoint is None:
            return 0.0
        if self.waypoint != self._route_for:
            self._route = None
            self._route_for = self.waypoint
            self._approach = None
            self._dwell = 0
        goal = self._approach if self._approach is not None else self.drift.to_true(self.waypoint.target)
        outcome = step_robot(
            self.spec,
            self.true_pose,
            goal,
            self.vector_map,
            self.scenario.tick_dt,
            nav=self.nav,
            route=self._route,
            face_heading=self._face_heading(self.waypoint),
            goal_tolerance=self.scenario.waypoints.arrival_tol,
        )
        if outcome.skipped:
            if not self._fall_back():
                self._skip(events)
            return 0.0
        moved = outcome.pose != self.true_pose
        self.true_pose = outcome.pose
        self._route = outcome.route
        if self._approach is not None and self._at_approach():
            # the manager never sees the standoff pose reached, so dwell then drop it
            self._dwell += 1
            if self._dwell >= DWELL_TICKS:
                self._skip(events)
            return outcome.travelled
        self._stall = 0 if moved else self._stall + 1
        if self._stall >= STALL_TICKS and not self._fall_back():
            self._logger.debug(f"{self.name} stalled on {self.waypoint.target.as_tuple()}, skipping")
            self._skip(events)
        return outcome.travelled

    def _offer(self, sweep, believed: Pose2, now: float, search_map: SearchMap) -> Optional[Pose2]:
        if not self.scenario.mode.uses_live or sweep.scan is None:
            return None
        classified = classify_scan(sweep.scan, self.vector_map, self.history, self.scenario.perception)
        regions = detect_inspection_regions(classified, self.vector_map, search_map, self.scenario.inspection, now)
        region = select_nearest(regions, believed)
        if region is None:
            return None
        return region_to_priority_waypoint(region, believed, self.scenario.inspection.standoff)

    def step(self, tick: int, now: float, search_map: SearchMap) -> RobotUpdate:
        """Advance this robot by one tick; ``search_map`` is read, never written."""
        events = self._pending_events
        self._pending_events = []
        travelled = self._move(events)

        self.drift.step(self.scenario.tick_dt)
        believed = self.drift.believe(self.true_pose)
        lidar = self.scenario.lidar
        sweep = lidar_sweep(self.vector_map, self.scenario.objects, self.true_pose, believed,
                            lidar.n_beams, lidar.max_range, lidar.range_noise_std, self.rng, timestamp=now)

        offered = self._offer(sweep, believed, now, search_map)
        self.waypoint = self.wm.tick(believed, now, offered)
        events.extend(e.value for e in self.wm.events)

        candidates = camera_candidates(self.vector_map, self.scenario.objects, self.true_pose, self.spec.camera_fp)
        detections = camera_detect(self.vector_map, self.scenario.objects, self.true_pose, self.spec.camera_fp,
                                   self.scenario.detect_prob, self.rng, candidates=candidates)
        return RobotUpdate(
            robot=self.index,
            tick=tick,
            true_pose=self.true_pose,
            believed_pose=believed,
            lidar_footprint_pose=believed,
            camera_footprint_pose=believed,
            travelled=travelled,
            detections=tuple(detections),
            candidates=tuple(candidates),
            wm_state=self.wm.state.value,
            events=tuple(events),
            done=self.wm.is_done,
            priority_count=self.wm.priority_count,
            skipped=self.wm.skipped_count,
        )


class TrialCoordinator:
    """
    Owner of the shared search map and the trial bookkeeping.

    The only writer of the search map: footprints are applied once per round,
    after every robot reported, in robot index order.
    """

    def __init__(
        self,
        scenario: Scenario,
        vector_map: VectorMap,
        plan: CoveragePlan,
        log: Optional[TrajectoryLogWriter] = None,
    ):
        self.scenario = scenario
        self.plan = plan
        self.log = log
        self.search_map = init_search_map(vector_map, scenario.planner.resolution)
        self.entropy_trace: List[Tuple[float, float]] = [(0.0, entropy(self.search_map))]
        self.targets = target_ids(scenario.objects)
        self.detection_time: Dict[str, Optional[float]] = {t: None for t in self.targets}
        self.ever_candidate: set = set()
        n = len(scenario.robots)
        self.path_length = [0.0] * n
        self.priority_count = [0] * n
        self.skipped = [0] * n
        self.done = [False] * n
        self.tick = 0
        self.stopped = False
        self._logger = logging.getLogger(f"{__name__}.TrialCoordinator")

    @property
    def all_detected(self) -> bool:
        return all(t is not None for t in self.detection_time.values())

    def apply_round(self, tick: int, updates: Sequence[RobotUpdate]) -> RoundOutcome:
        """
        Fold one round of robot updates into the shared state.

        Raises:
            ValueError: If the tick is not the next one or a robot's update is missing.
        """
        if self.stopped:
            raise ValueError("trial already stopped")
        if tick != self.tick + 1:
            raise ValueError(f"expected tick {self.tick + 1}, got {tick}")
        ordered = sorted(updates, key=lambda u: u.robot)
        if [u.robot for u in ordered] != list(range(len(self.scenario.robots))):
            raise ValueError(f"tick {tick} needs exactly one update per robot")
        if any(u.tick != tick for u in ordered):
            raise ValueError(f"update tick mismatch in round {tick}")

        now = tick * self.scenario.tick_dt
        observed: List[int] = []
        for update in ordered:
            spec = self.scenario.robots[update.robot]
            observe_footprint(self.search_map, update.lidar_footprint_pose, spec.lidar_fp)
            camera = observe_footprint(self.search_map, update.camera_footprint_pose, spec.camera_fp)
            observed.extend(int(i) for i in camera.observed)

            self.path_length[update.robot] += update.travelled
            self.priority_count[update.robot] = update.priority_count
            self.skipped[update.robot] = update.skipped
            self.done[update.robot] = update.done
            self.ever_candidate.update(update.candidates)

            events = list(update.events)
            for obj_id in update.detections:
                if obj_id in self.detection_time and self.detection_time[obj_id] is None:
                    self.detection_time[obj_id] = now
                    events.append(f"object_detected:{obj_id}")
                    self._logger.info(f"{spec.name} detected {obj_id} at t={now:.1f}s")
            if self.log is not None:
                self.log.write(tick, now, spec.name, update.true_pose, update.believed_pose, update.wm_state, events)

        self.entropy_trace.append((now, entropy(self.search_map)))
        self.tick = tick
        self.stopped = self.all_detected or all(self.done) or tick >= self.scenario.max_ticks
        return RoundOutcome(tick=tick, stop=self.stopped, observed_cells=tuple(observed))

    def failure_mode(self) -> FailureMode:
        if self.all_detected:
            return FailureMode.NONE
        missed = {t for t, when in self.detection_time.items() if when is None}
        if missed & self.ever_candidate:
            return FailureMode.DETECTION
        return FailureMode.PATH

    def result(self, failure_override: Optional[FailureMode] = None, error: Optional[str] = None) -> TrialResult:
        objects = {o.id: o for o in self.scenario.objects}
        return TrialResult(
            scenario=self.scenario.name,
            mode=self.scenario.mode,
            seed=self.scenario.seed,
            detected={t: self.detection_time[t] is not None for t in self.targets},
            detection_time=dict(self.detection_time),
            difficulty={t: objects[t].difficulty for t in self.targets},
            path_length=tuple(self.path_length),
            planned_length=tuple(self.plan.planned_length),
            failure_mode=failure_override or self.failure_mode(),
            entropy_trace=tuple(self.entropy_trace),
            priority_waypoints_taken=tuple(self.priority_count),
            skipped_waypoints=tuple(self.skipped),
            ticks=self.tick,
            error=error,
        )


def navigation_grids(scenario: Scenario, vector_map: VectorMap) -> List[NavigationGrid]:
    """One grid per robot, shared between robots of equal radius."""
    by_radius: Dict[float, NavigationGrid] = {}
    grids = []
    for spec in scenario.robots:
        if spec.radius not in by_radius:
            by_radius[spec.radius] = build_navigation_grid(vector_map, scenario.objects, spec.radius)
        grids.append(by_radius[spec.radius])
    return grids


def plan_for(scenario: Scenario, vector_map: VectorMap) -> CoveragePlan:
    return plan_coverage(vector_map, scenario.robots, scenario.mode, seed=scenario.seed, cfg=scenario.planner)


def run_trial(
    scenario: Scenario,
    vector_map: Optional[VectorMap] = None,
    plan: Optional[CoveragePlan] = None,
    log_path: Optional[Union[str, Path]] = None,
    search_map_path: Optional[Union[str, Path]] = None,
) -> TrialResult:
    """
    Plan and simulate one trial.

    Args:
        scenario: Trial definition.
        vector_map: Preloaded map; read from ``scenario.map_path`` when absent.
        plan: Precomputed plan for this scenario's base mode and seed.
        log_path: Where to write the trajectory CSV.
        search_map_path: Where to export the final search map as PGM.

    Returns:
        TrialResult, bit-identical for identical inputs.

    Raises:
        PlanningError: When the planner cannot reach its coverage target.
    """
    attributes = {"live.scenario": scenario.name, "live.mode": scenario.mode.value, "live.seed": scenario.seed}
    with trace_operation("simulator", "run_trial", attributes):
        vector_map = scenario.load_map() if vector_map is None else vector_map
        plan = plan or plan_for(scenario, vector_map)
        streams = robot_streams(scenario.seed, len(scenario.robots))
        grids = navigation_grids(scenario, vector_map)
        runtimes = [
            RobotRuntime(i, scenario, vector_map, plan.global_path(i), streams[i], grids[i])
            for i in range(len(scenario.robots))
        ]
        with TrajectoryLogWriter(log_path) as log:
            coordinator = TrialCoordinator(scenario, vector_map, plan, log)
            for tick in range(1, scenario.max_ticks + 1):
                now = tick * scenario.tick_dt
                updates = [runtime.step(tick, now, coordinator.search_map) for runtime in runtimes]
                if coordinator.apply_round(tick, updates).stop:
                    break
        if search_map_path is not None:
            export_pgm(coordinator.search_map, search_map_path)
        result = coordinator.result()
    logger.info(
        f"Trial {scenario.name} {scenario.mode.value} seed={scenario.seed}: {result.failure_mode.value}, "
        f"{result.objects_found}/{len(result.detected)} found in {result.ticks} ticks, "
        f"path {result.total_path_length:.1f} m"
    )
    return result
