"""
Robot navigation: inflated grid, A* routes, and per-tick kinematics.

Routes are polylines in the true frame. A straight leg is used whenever it
keeps the robot radius clear of every segment; otherwise an 8-connected A*
over the inflated grid is shortcut by line-of-sight smoothing. Every
translation is checked against the robot radius, so the robot never enters
the radius of a map segment or object outline.
"""

import heapq
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..geometry import Pose2, VectorMap, point_segment_distances, segment_clearance, segments_intersect
from ..planner import RobotSpec
from .world import WorldObject, outline_arrays

logger = logging.getLogger(__name__)

NAV_RESOLUTION = 0.25
ALIGN_TOLERANCE = 1e-6
_NEIGHBOURS = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
_SQRT2 = math.sqrt(2.0)

XY = Tuple[float, float]


class NavigationGrid:
    """
    Occupancy for path search: a cell is blocked when its center lies within
    ``radius + resolution / 2`` of any map segment or object outline.
    """

    def __init__(self, vector_map: VectorMap, objects: Sequence[WorldObject], radius: float,
                 resolution: float = NAV_RESOLUTION):
        if radius <= 0 or resolution <= 0:
            raise ValueError("radius and resolution must be positive")
        self.radius = radius
        self.resolution = resolution
        self.bounds = vector_map.bounds
        obj_a, obj_b, _ = outline_arrays(objects)
        self.map_segments = len(vector_map.seg_a)
        self.seg_a = np.vstack([vector_map.seg_a, obj_a]) if len(obj_a) else vector_map.seg_a
        self.seg_b = np.vstack([vector_map.seg_b, obj_b]) if len(obj_b) else vector_map.seg_b
        self.width = max(1, math.ceil(self.bounds.width / resolution - 1e-9))
        self.height = max(1, math.ceil(self.bounds.height / resolution - 1e-9))
        cols, rows = np.meshgrid(np.arange(self.width), np.arange(self.height))
        centers = np.stack([
            self.bounds.xmin + (cols.ravel() + 0.5) * resolution,
            self.bounds.ymin + (rows.ravel() + 0.5) * resolution,
        ], axis=1)
        self.inflation = radius + 0.5 * resolution
        if len(self.seg_a):
            clearance = point_segment_distances(centers, self.seg_a, self.seg_b).min(axis=1)
        else:
            clearance = np.full(len(centers), np.inf)
        self.clearance = clearance.reshape(self.height, self.width)
        self.blocked = self.clearance < self.inflation
        self._logger = logging.getLogger(f"{__name__}.NavigationGrid")
        self._logger.debug(f"Navigation grid {self.width}x{self.height}, {int(self.blocked.sum())} blocked cells")

    def cell_of(self, x: float, y: float) -> Optional[Tuple[int, int]]:
        col = math.floor((x - self.bounds.xmin) / self.resolution)
        row = math.floor((y - self.bounds.ymin) / self.resolution)
        if 0 <= col < self.width and 0 <= row < self.height:
            return row, col
        return None

    def center_of(self, cell: Tuple[int, int]) -> XY:
        row, col = cell
        return (self.bounds.xmin + (col + 0.5) * self.resolution,
                self.bounds.ymin + (row + 0.5) * self.resolution)

    def clearance_of(self, x: float, y: float) -> float:
        if len(self.seg_a) == 0:
            return math.inf
        return float(point_segment_distances(np.array([x, y]), self.seg_a, self.seg_b).min())

    def leg_clearance(self, p: XY, q: XY) -> float:
        return segment_clearance(np.asarray(p, dtype=float), np.asarray(q, dtype=float), self.seg_a, self.seg_b)

    def leg_is_safe(self, p: XY, q: XY) -> bool:
        return self.leg_clearance(p, q) >= self.radius

    def nearest_free(self, x: float, y: float, within: float) -> Optional[XY]:
        """Closest unblocked cell center to ``(x, y)`` no farther than ``within``, ties by row then column."""
        reach = math.ceil(within / self.resolution) + 1
        home = self.cell_of(x, y)
        if home is None:
            return None
        best = None
        for row in range(max(0, home[0] - reach), min(self.height, home[0] + reach + 1)):
            for col in range(max(0, home[1] - reach), min(self.width, home[1] + reach + 1)):
                if self.blocked[row, col]:
                    continue
                cx, cy = self.center_of((row, col))
                d = math.hypot(cx - x, cy - y)
                if d <= within and (best is None or d < best[0]):
                    best = (d, (cx, cy))
        return best[1] if best else None

    def viewing_spots(self, point: XY, max_range: float, near: XY, min_range: float = 0.5) -> List[XY]:
        """
        Free cell centers that can see ``point``, closest to ``near`` first.

        A spot must lie between ``min_range`` and ``max_range`` of the point
        with no static map segment crossing the sight line. Object outlines
        do not block, since the robot cannot tell them from the point itself.
        """
        rows, cols = np.nonzero(~self.blocked)
        if len(rows) == 0:
            return []
        centers = np.stack([
            self.bounds.xmin + (cols + 0.5) * self.resolution,
            self.bounds.ymin + (rows + 0.5) * self.resolution,
        ], axis=1)
        target = np.asarray(point, dtype=float)
        reach = np.hypot(*(centers - target).T)
        centers = centers[(reach >= min_range) & (reach <= max_range)]
        if len(centers) == 0:
            return []
        hidden = segments_intersect(target, centers, self.seg_a[:self.map_segments], self.seg_b[:self.map_segments])
        centers = centers[~hidden]
        order = np.lexsort((centers[:, 0], centers[:, 1], np.hypot(*(centers - np.asarray(near, dtype=float)).T)))
        return [(float(x), float(y)) for x, y in centers[order]]

    def astar(self, start: XY, goal: XY) -> Optional[List[Tuple[int, int]]]:
        """
        8-connected A* between the cells containing ``start`` and ``goal``.

        The start cell is always enterable; diagonal moves may not cut a
        blocked corner. Returns the cell sequence or None when unreachable.
        """
        source = self.cell_of(*start)
        target = self.cell_of(*goal)
        if source is None or target is None or self.blocked[target]:
            return None
        if source == target:
            return [source]

        def heuristic(cell: Tuple[int, int]) -> float:
            dr, dc = abs(cell[0] - target[0]), abs(cell[1] - target[1])
            return (dr + dc) + (_SQRT2 - 2.0) * min(dr, dc)

        g = {source: 0.0}
        parent = {source: None}
        heap = [(heuristic(source), 0.0, source)]
        closed = set()
        while heap:
            _, cost, cell = heapq.heappop(heap)
            if cell in closed:
                continue
            if cell == target:
                path = []
                while cell is not None:
                    path.append(cell)
                    cell = parent[cell]
                return path[::-1]
            closed.add(cell)
            row, col = cell
            for dr, dc in _NEIGHBOURS:
                nr, nc = row + dr, col + dc
                if not (0 <= nr < self.height and 0 <= nc < self.width) or self.blocked[nr, nc]:
                    continue
                if dr and dc and (self.blocked[row, nc] or self.blocked[nr, col]):
                    continue
                step = _SQRT2 if dr and dc else 1.0
                candidate = cost + step
                if candidate < g.get((nr, nc), math.inf):
                    g[(nr, nc)] = candidate
                    parent[(nr, nc)] = cell
                    heapq.heappush(heap, (candidate + heuristic((nr, nc)), candidate, (nr, nc)))
        return None

    def plan_route(self, start: XY, goal: XY, goal_tolerance: float = 0.0) -> Optional[List[XY]]:
        """
        Polyline from ``start`` to ``goal`` (start excluded), or None when unreachable.

        A goal too close to an obstacle is moved to the nearest free cell
        center within ``goal_tolerance``.
        """
        if self.clearance_of(*goal) < self.radius:
            snapped = self.nearest_free(*goal, within=goal_tolerance)
            if snapped is None:
                return None
            goal = snapped
        if self.leg_is_safe(start, goal):
            return [goal]

        goal_cell = self.cell_of(*goal)
        if goal_cell is not None and self.blocked[goal_cell]:
            snapped = self.nearest_free(*goal, within=goal_tolerance)
            if snapped is None:
                return None
            goal = snapped
        cells = self.astar(start, goal)
        if cells is None:
            return None
        waypoints = [self.center_of(c) for c in cells[1:]] + [goal]
        return self.smooth(start, waypoints)

    def smooth(self, start: XY, points: List[XY]) -> List[XY]:
        """Greedy line-of-sight shortcutting: always jump to the farthest safely visible point."""
        route: List[XY] = []
        current = start
        index = 0
        while index < len(points):
            nxt = index
            for candidate in range(len(points) - 1, index, -1):
                if self.leg_is_safe(current, points[candidate]):
                    nxt = candidate
                    break
            route.append(points[nxt])
            current = points[nxt]
            index = nxt + 1
        return route


def build_navigation_grid(
    vector_map: VectorMap,
    objects: Sequence[WorldObject],
    radius: float,
    resolution: float = NAV_RESOLUTION,
) -> NavigationGrid:
    return NavigationGrid(vector_map, objects, radius, resolution)


@dataclass
class StepOutcome:
    """Result of one kinematic tick."""

    pose: Pose2
    route: List[XY] = field(default_factory=list)
    skipped: bool = False
    travelled: float = 0.0
    blocked: bool = False


def _rotate_toward(pose: Pose2, heading: float, budget: float, turn_rate: float) -> Tuple[Pose2, float]:
    """Turn toward ``heading`` within ``budget`` seconds; returns the new pose and the time used."""
    error = pose.heading_error(heading)
    if abs(error) <= ALIGN_TOLERANCE:
        return pose.with_theta(heading), 0.0
    max_turn = turn_rate * budget
    if abs(error) <= max_turn:
        return pose.with_theta(heading), abs(error) / turn_rate
    return pose.with_theta(pose.theta + math.copysign(max_turn, error)), budget


def step_robot(
    spec: RobotSpec,
    true_pose: Pose2,
    waypoint: Pose2,
    vector_map: VectorMap,
    tick_dt: float,
    nav: Optional[NavigationGrid] = None,
    route: Optional[List[XY]] = None,
    face_heading: bool = False,
    goal_tolerance: float = 0.35,
) -> StepOutcome:
    """
    Drive the robot toward ``waypoint`` (true frame) for one tick.

    Rotation to the next route point comes first, then straight travel; any
    time left carries over to the following route point. At the final point
    the robot turns to the waypoint heading when ``face_heading`` is set.

    Args:
        spec: Speed, turn rate and radius.
        true_pose: Current ground-truth pose.
        waypoint: Target pose in the true frame.
        vector_map: Static map, used when ``nav`` is not supplied.
        tick_dt: Tick length in seconds.
        nav: Prebuilt navigation grid including object outlines.
        route: Route from a previous tick toward the same waypoint.
        face_heading: Whether to align with ``waypoint.theta`` on arrival.
        goal_tolerance: How far a blocked goal may be moved to free space.

    Returns:
        StepOutcome; ``skipped`` when the waypoint is unreachable.
    """
    if not tick_dt > 0:
        raise ValueError("tick_dt must be positive")
    nav = nav or build_navigation_grid(vector_map, [], spec.radius)
    start = (true_pose.x, true_pose.y)

    if route is None:
        if true_pose.distance_to(waypoint) <= 1e-9:
            route = []
        else:
            route = nav.plan_route(start, (waypoint.x, waypoint.y), goal_tolerance)
            if route is None:
                logger.debug(f"{spec.name}: waypoint {waypoint.as_tuple()} unreachable")
                return StepOutcome(pose=true_pose, route=[], skipped=True)
    route = list(route)

    pose = true_pose
    budget = tick_dt
    travelled = 0.0
    while budget > 1e-12 and route:
        tx, ty = route[0]
        distance = math.hypot(tx - pose.x, ty - pose.y)
        if distance <= 1e-9:
            route.pop(0)
            continue
        pose, used = _rotate_toward(pose, math.atan2(ty - pose.y, tx - pose.x), budget, spec.turn_rate)
        budget -= used
        if abs(pose.heading_error(math.atan2(ty - pose.y, tx - pose.x))) > ALIGN_TOLERANCE or budget <= 1e-12:
            break
        advance = min(distance, spec.speed * budget)
        if advance >= distance:
            nx, ny = tx, ty
        else:
            nx = pose.x + advance * math.cos(pose.theta)
            ny = pose.y + advance * math.sin(pose.theta)
        if not nav.leg_is_safe((pose.x, pose.y), (nx, ny)):
            return StepOutcome(pose=pose, route=route, travelled=travelled, blocked=True)
        pose = Pose2(nx, ny, pose.theta)
        travelled += advance
        budget -= advance / spec.speed
        if advance >= distance:
            route.pop(0)

    if not route and face_heading and budget > 1e-12:
        pose, _ = _rotate_toward(pose, waypoint.theta, budget, spec.turn_rate)
    return StepOutcome(pose=pose, route=route, travelled=travelled)
