"""
Coverage planning: sampled viewpoints, greedy set cover, balanced split, tour ordering.

Coverage is counted on the cells of a search-map grid at the planner
resolution. A cell is covered by a viewpoint when its center lies inside the
footprint placed at the viewpoint and no map segment blocks the line from the
viewpoint to the center.
"""

import heapq
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..geometry import Pose2, VectorMap, normalize_angle, path_positions, segments_intersect
from ..observability import trace_operation
from ..search_map import (
    RectangularFootprint,
    SearchMap,
    TriangularFootprint,
    init_search_map,
    points_in_convex_polygon,
)
from .config import PlannerConfig, PlannerMode, RobotSpec
from .routing import assign_clusters_to_robots, balanced_kmeans, order_route, path_length

logger = logging.getLogger(__name__)

Footprint = Union[RectangularFootprint, TriangularFootprint]

_SAMPLING_ROUNDS_PER_BATCH = 20


class PlanningError(RuntimeError):
    """The coverage target cannot be reached within the sample budget."""


@dataclass(frozen=True)
class CoveragePlan:
    """
    Per-robot viewpoint routes.

    ``planned_length[r]`` is ``path_length([start_r] + viewpoints[r])``.
    """

    mode: PlannerMode
    seed: int
    starts: Tuple[Pose2, ...]
    viewpoints: Tuple[Tuple[Pose2, ...], ...]
    planned_length: Tuple[float, ...]
    covered_fraction: float

    @property
    def total_length(self) -> float:
        return float(sum(self.planned_length))

    @property
    def viewpoint_count(self) -> int:
        return sum(len(v) for v in self.viewpoints)

    def global_path(self, robot: int) -> List[Pose2]:
        """Waypoints handed to the robot's manager; the start pose alone when nothing was assigned."""
        return list(self.viewpoints[robot]) or [self.starts[robot]]

    def with_mode(self, mode: PlannerMode) -> "CoveragePlan":
        return CoveragePlan(mode, self.seed, self.starts, self.viewpoints, self.planned_length, self.covered_fraction)

    def to_dict(self) -> Dict:
        return {
            "mode": self.mode.value,
            "seed": self.seed,
            "viewpoints": [[list(p.as_tuple()) for p in route] for route in self.viewpoints],
            "planned_length": list(self.planned_length),
            "covered_fraction": self.covered_fraction,
        }


class CoverageGrid:
    """Free cells of a map at a fixed resolution plus per-viewpoint coverage queries."""

    def __init__(self, vector_map: VectorMap, resolution: float):
        self.vector_map = vector_map
        self.search_map: SearchMap = init_search_map(vector_map, resolution)
        self.free = ~self.search_map.obstacle_mask().reshape(-1)
        self.free_count = int(np.count_nonzero(self.free))

    def _visible(self, window: np.ndarray, origin: np.ndarray) -> np.ndarray:
        window = window[self.free[window]]
        if len(window) == 0 or self.vector_map.is_empty:
            return window
        seg_a, seg_b = self.vector_map.seg_a, self.vector_map.seg_b
        centers = self.search_map.cell_centers[window]
        lo = np.minimum(centers.min(axis=0), origin)
        hi = np.maximum(centers.max(axis=0), origin)
        near = ((np.maximum(seg_a, seg_b) >= lo).all(axis=1)
                & (np.minimum(seg_a, seg_b) <= hi).all(axis=1))
        if not near.any():
            return window
        blocked = segments_intersect(origin, centers, seg_a[near], seg_b[near])
        return window[~blocked]

    def visible_in_polygon(self, origin: np.ndarray, polygon: np.ndarray) -> np.ndarray:
        window = self.search_map.index_window(*polygon.min(axis=0), *polygon.max(axis=0))
        if len(window) == 0:
            return window
        window = window[points_in_convex_polygon(self.search_map.cell_centers[window], polygon)]
        return self._visible(window, origin)

    def visible_in_disc(self, origin: np.ndarray, radius: float) -> np.ndarray:
        window = self.search_map.index_window(origin[0] - radius, origin[1] - radius,
                                              origin[0] + radius, origin[1] + radius)
        if len(window) == 0:
            return window
        offsets = self.search_map.cell_centers[window] - origin
        window = window[np.einsum("ij,ij->i", offsets, offsets) <= radius * radius]
        return self._visible(window, origin)

    def footprint_cells(self, pose: Pose2, fp: Footprint) -> np.ndarray:
        """Flat indices of free cells covered by ``fp`` at ``pose``."""
        return self.visible_in_polygon(pose.as_array(), fp.polygon(pose))

    @cached_property
    def components(self) -> np.ndarray:
        """
        Connected-region label per cell, -1 on obstacle cells.

        Two 4-neighbouring free cells are joined when no map segment crosses
        the line between their centers. Labels are the smallest member index.
        """
        sm = self.search_map
        n = sm.cell_count
        index = np.arange(n).reshape(sm.height, sm.width)
        a = np.concatenate([index[:, :-1].ravel(), index[:-1, :].ravel()])
        b = np.concatenate([index[:, 1:].ravel(), index[1:, :].ravel()])
        open_edge = self.free[a] & self.free[b]
        a, b = a[open_edge], b[open_edge]
        if len(a) and not self.vector_map.is_empty:
            crossed = segments_intersect(sm.cell_centers[a], sm.cell_centers[b],
                                         self.vector_map.seg_a, self.vector_map.seg_b)
            a, b = a[~crossed], b[~crossed]

        labels = np.arange(n)
        while True:
            joined = np.minimum(labels[a], labels[b])
            updated = labels.copy()
            np.minimum.at(updated, a, joined)
            np.minimum.at(updated, b, joined)
            updated = updated[updated]
            if np.array_equal(updated, labels):
                break
            labels = updated
        return np.where(self.free, labels, -1)

    def component_of(self, points: np.ndarray) -> np.ndarray:
        """Region label of each point; points off free space take the label of the nearest free cell."""
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        cells = self.search_map.cells_of(points)
        labels = np.where(cells >= 0, self.components[np.maximum(cells, 0)], -1)
        stray = labels < 0
        if stray.any():
            free_cells = np.flatnonzero(self.free)
            centers = self.search_map.cell_centers[free_cells]
            nearest = np.argmin(np.linalg.norm(points[stray, None, :] - centers[None, :, :], axis=2), axis=1)
            labels[stray] = self.components[free_cells[nearest]]
        return labels


def coverage_fraction(
    viewpoints: Sequence[Sequence[Pose2]],
    footprint: Footprint,
    vector_map: VectorMap,
    resolution: float,
) -> float:
    """
    Fraction of free cells inside at least one viewpoint's occlusion-respecting footprint.

    Args:
        viewpoints: Per-robot viewpoint lists.
        footprint: Footprint placed at every viewpoint.
        vector_map: Static map for free space and occlusion.
        resolution: Cell size in meters.

    Returns:
        Value in [0, 1]; 0.0 when the map has no free cell.
    """
    if not resolution > 0:
        raise ValueError("resolution must be positive")
    grid = CoverageGrid(vector_map, resolution)
    if grid.free_count == 0:
        return 0.0
    covered = np.zeros_like(grid.free)
    for route in viewpoints:
        for pose in route:
            covered[grid.footprint_cells(pose, footprint)] = True
    return float(np.count_nonzero(covered & grid.free)) / grid.free_count


def reference_footprint(robots: Sequence[RobotSpec], mode: PlannerMode) -> Footprint:
    """The smallest footprint of the team for the mode's sensor; ties go to the lower robot index."""
    if mode.base_mode is PlannerMode.VISUAL_CPP:
        return min((r.camera_fp for r in robots), key=lambda fp: fp.reach)
    return min((r.lidar_fp for r in robots), key=lambda fp: fp.reach)


def _visual_headings(count: int) -> List[float]:
    return [normalize_angle(2.0 * math.pi * h / count) for h in range(count)]


def _sample_positions(
    grid: CoverageGrid,
    rng: np.random.Generator,
    count: int,
    clearance: float,
) -> np.ndarray:
    """Up to ``count`` uniform positions with at least ``clearance`` to every segment."""
    bounds = grid.vector_map.bounds
    accepted: List[np.ndarray] = []
    total = 0
    for _ in range(_SAMPLING_ROUNDS_PER_BATCH):
        draw = np.column_stack([
            rng.uniform(bounds.xmin, bounds.xmax, size=count),
            rng.uniform(bounds.ymin, bounds.ymax, size=count),
        ])
        keep = grid.vector_map.min_distances(draw) >= clearance
        index = grid.search_map.cells_of(draw)
        keep &= (index >= 0) & grid.free[np.maximum(index, 0)]
        draw = draw[keep][:count - total]
        accepted.append(draw)
        total += len(draw)
        if total >= count:
            break
    return np.concatenate(accepted) if accepted else np.empty((0, 2))


def _candidate_cells(
    grid: CoverageGrid,
    positions: np.ndarray,
    fp: Footprint,
    headings: Sequence[float],
) -> Tuple[List[Pose2], List[np.ndarray]]:
    poses: List[Pose2] = []
    cells: List[np.ndarray] = []
    for x, y in positions:
        origin = np.array([x, y])
        if fp.is_visual:
            disc = grid.visible_in_disc(origin, fp.reach)
            centers = grid.search_map.cell_centers[disc]
            for heading in headings:
                pose = Pose2(float(x), float(y), heading)
                poses.append(pose)
                cells.append(disc[points_in_convex_polygon(centers, fp.polygon(pose))])
        else:
            pose = Pose2(float(x), float(y), 0.0)
            poses.append(pose)
            cells.append(grid.footprint_cells(pose, fp))
    return poses, cells


def _greedy_cover(cells: Sequence[np.ndarray], n_cells: int, target_count: int) -> Tuple[List[int], int]:
    """
    Lazy greedy set cover.

    Picks the candidate with the largest number of newly covered cells, ties
    by lower index, until ``target_count`` cells are covered or no candidate
    adds anything.
    """
    covered = np.zeros(n_cells, dtype=bool)
    heap = [(-len(c), i) for i, c in enumerate(cells)]
    heapq.heapify(heap)
    chosen: List[int] = []
    count = 0
    while heap and count < target_count:
        _, index = heapq.heappop(heap)
        gain = int(np.count_nonzero(~covered[cells[index]]))
        if gain == 0:
            continue
        if heap and (-gain, index) > heap[0]:
            heapq.heappush(heap, (-gain, index))
            continue
        chosen.append(index)
        covered[cells[index]] = True
        count += gain
    return chosen, count


def plan_coverage(
    vector_map: VectorMap,
    robots: Sequence[RobotSpec],
    mode: PlannerMode,
    target_coverage: Optional[float] = None,
    seed: int = 0,
    cfg: Optional[PlannerConfig] = None,
) -> CoveragePlan:
    """
    Plan per-robot coverage routes.

    Args:
        vector_map: Static map.
        robots: Team; starts anchor the routes and seed the clustering.
        mode: Planner setting; LidarCPPLive plans exactly like LidarCPP.
        target_coverage: Overrides ``cfg.target_coverage`` when given.
        seed: Seed of the viewpoint sampler.
        cfg: Planner tunables.

    Returns:
        CoveragePlan with one route per robot, in robot order.

    Raises:
        ValueError: On an empty team or target outside (0, 1].
        PlanningError: When the sample budget cannot reach the target.
    """
    cfg = cfg or PlannerConfig()
    target = cfg.target_coverage if target_coverage is None else target_coverage
    if not 0.0 < target <= 1.0:
        raise ValueError("target_coverage must be in (0, 1]")
    if not robots:
        raise ValueError("at least one robot is required")

    with trace_operation("planner", "plan_coverage", {"live.mode": mode.value, "live.seed": seed}):
        grid = CoverageGrid(vector_map, cfg.resolution)
        if grid.free_count == 0:
            raise PlanningError("map has no free space")
        fp = reference_footprint(robots, mode)
        headings = _visual_headings(cfg.visual_headings) if fp.is_visual else [0.0]
        target_count = math.ceil(target * grid.free_count - 1e-9)

        rng = np.random.default_rng(seed)
        poses: List[Pose2] = []
        cells: List[np.ndarray] = []
        reachable = np.zeros_like(grid.free)
        sampled = 0
        while sampled < cfg.sample_budget:
            batch = min(cfg.sample_batch, cfg.sample_budget - sampled)
            positions = _sample_positions(grid, rng, batch, cfg.viewpoint_clearance)
            if len(positions) == 0:
                break
            sampled += len(positions)
            batch_poses, batch_cells = _candidate_cells(grid, positions, fp, headings)
            poses.extend(batch_poses)
            cells.extend(batch_cells)
            for c in batch_cells:
                reachable[c] = True
            if np.count_nonzero(reachable) >= target_count:
                break

        if np.count_nonzero(reachable) < target_count:
            raise PlanningError(
                f"{sampled} candidate positions cover {np.count_nonzero(reachable)}/{grid.free_count} "
                f"free cells, below the {target:.2f} target"
            )

        chosen, count = _greedy_cover(cells, len(grid.free), target_count)
        kept = [poses[i] for i in chosen]
        covered_fraction = count / grid.free_count

        starts = tuple(r.start_pose for r in robots)
        routes = split_viewpoints(kept, starts, cfg, np.random.default_rng(seed), grid)
        plan = CoveragePlan(
            mode=mode,
            seed=seed,
            starts=starts,
            viewpoints=tuple(tuple(route) for route in routes),
            planned_length=tuple(path_length([s] + list(route)) for s, route in zip(starts, routes)),
            covered_fraction=covered_fraction,
        )
    logger.info(
        f"Planned {mode.value} seed={seed}: {len(kept)} viewpoints from {sampled} samples, "
        f"coverage {covered_fraction:.3f}, lengths {[round(v, 2) for v in plan.planned_length]}"
    )
    return plan


def split_viewpoints(
    viewpoints: Sequence[Pose2],
    starts: Sequence[Pose2],
    cfg: PlannerConfig,
    rng: Optional[np.random.Generator] = None,
    grid: Optional[CoverageGrid] = None,
) -> List[List[Pose2]]:
    """
    Partition viewpoints among robots and order each share from its start.

    With a ``grid``, viewpoints are first grouped by connected free region and
    each region is clustered among the robots that start in it. A region no
    robot starts in goes to the robot whose start is nearest its centroid.
    """
    k = len(starts)
    if not viewpoints:
        return [[] for _ in range(k)]
    positions = path_positions(viewpoints)
    start_xy = path_positions(starts)
    if grid is None:
        viewpoint_region = np.zeros(len(viewpoints), dtype=int)
        start_region = np.zeros(k, dtype=int)
    else:
        viewpoint_region = grid.component_of(positions)
        start_region = grid.component_of(start_xy)

    owner = np.full(len(viewpoints), -1, dtype=int)
    for region in np.unique(viewpoint_region):
        members = np.flatnonzero(viewpoint_region == region)
        team = np.flatnonzero(start_region == region)
        if len(team) == 0:
            centroid = positions[members].mean(axis=0)
            team = np.array([int(np.argmin(np.linalg.norm(start_xy - centroid, axis=1)))])
            logger.warning(f"No robot starts in the region of {len(members)} viewpoints; robot {team[0]} takes them")
        labels = balanced_kmeans(
            positions[members],
            len(team),
            rng=rng,
            slack=cfg.cluster_slack,
            init=start_xy[team],
            iterations=cfg.kmeans_iterations,
        )
        local_owner = assign_clusters_to_robots(positions[members], labels, [starts[r] for r in team])
        owner[members] = team[np.asarray(local_owner)[labels]]

    shares: List[List[Pose2]] = [[] for _ in range(k)]
    for pose, robot in zip(viewpoints, owner):
        shares[int(robot)].append(pose)
    return [order_route(start, share) for start, share in zip(starts, shares)]
