"""Tests for coverage planning, route ordering and plan files."""

import math

import numpy as np
import pytest

from src.geometry import Bounds, LineSegment, Pose2, VectorMap
from src.planner import (
    CoverageGrid,
    PlannerMode,
    PlanningError,
    RobotSpec,
    assign_clusters_to_robots,
    balanced_kmeans,
    coverage_fraction,
    create_planner_config,
    format_plan,
    nearest_neighbor_order,
    order_route,
    parse_plan,
    path_length,
    plan_coverage,
    read_plan_file,
    reference_footprint,
    split_viewpoints,
    two_opt,
    write_plan_file,
)
from src.search_map import RectangularFootprint, TriangularFootprint


def room(size: float) -> VectorMap:
    return VectorMap(
        (
            LineSegment.from_coords(0.0, 0.0, size, 0.0),
            LineSegment.from_coords(size, 0.0, size, size),
            LineSegment.from_coords(size, size, 0.0, size),
            LineSegment.from_coords(0.0, size, 0.0, 0.0),
        ),
        Bounds(0.0, 0.0, size, size),
    )


def two_rooms() -> VectorMap:
    """A 12 x 6 room and a 4 x 6 room sharing the wall at x = 12, with no opening."""
    return VectorMap(
        (
            LineSegment.from_coords(0.0, 0.0, 16.0, 0.0),
            LineSegment.from_coords(16.0, 0.0, 16.0, 6.0),
            LineSegment.from_coords(16.0, 6.0, 0.0, 6.0),
            LineSegment.from_coords(0.0, 6.0, 0.0, 0.0),
            LineSegment.from_coords(12.0, 0.0, 12.0, 6.0),
        ),
        Bounds(0.0, 0.0, 16.0, 6.0),
    )


def team(*starts, lidar=6.0):
    return [
        RobotSpec(
            name=f"r{i}",
            start=start,
            speed=0.5,
            turn_rate=1.0,
            lidar_fp=RectangularFootprint(length=lidar, width=lidar),
        )
        for i, start in enumerate(starts)
    ]


class TestPlannerMode:
    def test_cli_names(self):
        assert PlannerMode.from_cli("live") is PlannerMode.LIDAR_CPP_LIVE
        assert PlannerMode.from_cli("VisualCPP") is PlannerMode.VISUAL_CPP
        with pytest.raises(ValueError):
            PlannerMode.from_cli("sonar")

    def test_live_executes_lidar_plan(self):
        assert PlannerMode.LIDAR_CPP_LIVE.base_mode is PlannerMode.LIDAR_CPP
        assert PlannerMode.LIDAR_CPP_LIVE.uses_live
        assert not PlannerMode.VISUAL_CPP.uses_live

    def test_reference_footprint_is_smallest(self):
        robots = team((1.0, 1.0, 0.0), (2.0, 2.0, 0.0))
        robots[1] = robots[1].model_copy(update={"lidar_fp": RectangularFootprint(length=2.0, width=2.0)})
        assert reference_footprint(robots, PlannerMode.LIDAR_CPP_LIVE).length == 2.0
        assert isinstance(reference_footprint(robots, PlannerMode.VISUAL_CPP), TriangularFootprint)


class TestRouting:
    def test_path_length(self):
        assert path_length([]) == 0.0
        assert path_length([Pose2(0.0, 0.0)]) == 0.0
        assert path_length([Pose2(0.0, 0.0), Pose2(3.0, 4.0), Pose2(3.0, 0.0)]) == pytest.approx(9.0)

    def test_nearest_neighbor_tie_goes_to_lower_index(self):
        viewpoints = [Pose2(1.0, 0.0), Pose2(-1.0, 0.0), Pose2(5.0, 0.0)]
        assert nearest_neighbor_order(Pose2(0.0, 0.0), viewpoints) == [0, 1, 2]

    def test_two_opt_never_lengthens(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            xy = rng.uniform(0.0, 10.0, size=(12, 2))
            distances = np.linalg.norm(xy[:, None] - xy[None], axis=2).tolist()
            route = list(range(12))
            improved = two_opt(route, distances)

            def length(r):
                return sum(distances[a][b] for a, b in zip(r, r[1:]))

            assert improved[0] == 0
            assert sorted(improved) == route
            assert length(improved) <= length(route) + 1e-9

    def test_two_opt_untangles_crossing(self):
        xy = np.array([[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [2.0, 1.0]])
        distances = np.linalg.norm(xy[:, None] - xy[None], axis=2).tolist()
        assert two_opt([0, 1, 2, 3], distances) == [0, 2, 1, 3]

    def test_order_route_keeps_all_viewpoints(self):
        viewpoints = [Pose2(float(x), 0.0) for x in (4, 1, 3, 2)]
        ordered = order_route(Pose2(0.0, 0.0), viewpoints)
        assert [p.x for p in ordered] == [1.0, 2.0, 3.0, 4.0]

    def test_balanced_kmeans_respects_capacity(self):
        rng = np.random.default_rng(0)
        positions = np.vstack([rng.normal(0.0, 0.1, size=(15, 2)), rng.normal(5.0, 0.1, size=(5, 2))])
        labels = balanced_kmeans(positions, 2, slack=1.0, init=np.array([[0.0, 0.0], [5.0, 5.0]]))
        assert np.bincount(labels, minlength=2).max() <= 10

    def test_balanced_kmeans_is_deterministic(self):
        positions = np.random.default_rng(1).uniform(0.0, 10.0, size=(40, 2))
        a = balanced_kmeans(positions, 3, rng=np.random.default_rng(9))
        b = balanced_kmeans(positions, 3, rng=np.random.default_rng(9))
        assert np.array_equal(a, b)

    def test_balanced_kmeans_bad_arguments(self):
        with pytest.raises(ValueError):
            balanced_kmeans(np.zeros((3, 2)), 0)
        with pytest.raises(ValueError):
            balanced_kmeans(np.zeros((3, 2)), 2, slack=0.5)

    def test_split_keeps_each_region_with_its_robot(self):
        grid = CoverageGrid(two_rooms(), 0.5)
        left = [Pose2(float(x), float(y)) for x in (2, 5, 8, 11) for y in (2, 4)]
        right = [Pose2(14.0, 3.0)]
        starts = [Pose2(15.0, 3.0), Pose2(1.0, 3.0)]
        routes = split_viewpoints(left + right, starts, create_planner_config(), grid=grid)
        assert routes[0] == right
        assert set(routes[1]) == set(left) and len(routes[1]) == len(left)

    def test_regions_of_two_rooms(self):
        grid = CoverageGrid(two_rooms(), 0.5)
        labels = grid.component_of(np.array([[1.0, 1.0], [11.0, 5.0], [13.0, 1.0], [15.5, 5.5]]))
        assert labels[0] == labels[1] != labels[2] == labels[3]
        assert set(np.unique(grid.components[grid.free])) == {labels[0], labels[2]}

    def test_assign_clusters_is_one_to_one(self):
        positions = np.array([[0.0, 0.0], [0.5, 0.0], [9.0, 9.0]])
        labels = np.array([1, 1, 0])
        owner = assign_clusters_to_robots(positions, labels, [Pose2(0.0, 0.0), Pose2(10.0, 10.0)])
        assert owner == [1, 0]


class TestPlanCoverage:
    def test_lidar_plan_reaches_target(self):
        vmap = room(8.0)
        robots = team((1.0, 1.0, 0.0), (7.0, 7.0, math.pi))
        cfg = create_planner_config(resolution=0.5)
        plan = plan_coverage(vmap, robots, PlannerMode.LIDAR_CPP, seed=3, cfg=cfg)

        assert plan.covered_fraction >= 0.95
        assert len(plan.viewpoints) == 2
        assert coverage_fraction(plan.viewpoints, robots[0].lidar_fp, vmap, 0.5) == pytest.approx(plan.covered_fraction)
        for start, route, length in zip(plan.starts, plan.viewpoints, plan.planned_length):
            assert length == pytest.approx(path_length([start] + list(route)))
        assert plan.total_length == pytest.approx(sum(plan.planned_length))

    def test_same_seed_same_plan(self):
        vmap = room(8.0)
        robots = team((1.0, 1.0, 0.0), (7.0, 7.0, 0.0))
        cfg = create_planner_config(resolution=0.5)
        first = plan_coverage(vmap, robots, PlannerMode.LIDAR_CPP, seed=5, cfg=cfg)
        second = plan_coverage(vmap, robots, PlannerMode.LIDAR_CPP, seed=5, cfg=cfg)
        assert first.to_dict() == second.to_dict()

    def test_live_mode_plans_like_lidar(self):
        vmap = room(8.0)
        robots = team((1.0, 1.0, 0.0))
        cfg = create_planner_config(resolution=0.5)
        lidar = plan_coverage(vmap, robots, PlannerMode.LIDAR_CPP, seed=2, cfg=cfg)
        live = plan_coverage(vmap, robots, PlannerMode.LIDAR_CPP_LIVE, seed=2, cfg=cfg)
        assert live.viewpoints == lidar.viewpoints
        assert live.mode is PlannerMode.LIDAR_CPP_LIVE

    def test_visual_plan_uses_camera(self):
        vmap = room(6.0)
        robots = team((1.0, 1.0, 0.0))
        cfg = create_planner_config(resolution=0.5, target_coverage=0.8)
        plan = plan_coverage(vmap, robots, PlannerMode.VISUAL_CPP, seed=0, cfg=cfg)
        assert plan.covered_fraction >= 0.8
        assert coverage_fraction(plan.viewpoints, robots[0].camera_fp, vmap, 0.5) >= 0.8

    def test_budget_exhaustion_raises(self):
        robots = team((1.0, 1.0, 0.0), lidar=1.0)
        cfg = create_planner_config(resolution=0.5, sample_budget=2, sample_batch=1)
        with pytest.raises(PlanningError):
            plan_coverage(room(10.0), robots, PlannerMode.LIDAR_CPP, target_coverage=1.0, cfg=cfg)

    def test_bad_target_and_empty_team(self):
        with pytest.raises(ValueError):
            plan_coverage(room(4.0), team((1.0, 1.0, 0.0)), PlannerMode.LIDAR_CPP, target_coverage=0.0)
        with pytest.raises(ValueError):
            plan_coverage(room(4.0), [], PlannerMode.LIDAR_CPP)

    def test_single_viewpoint_covers_small_room(self):
        plan = plan_coverage(room(4.0), team((1.0, 1.0, 0.0)), PlannerMode.LIDAR_CPP, seed=4,
                             cfg=create_planner_config(resolution=0.5))
        assert plan.viewpoint_count == 1
        assert plan.covered_fraction == pytest.approx(1.0)

    def test_disjoint_rooms_are_not_shared(self):
        vmap = two_rooms()
        robots = team((1.0, 3.0, 0.0), (14.0, 3.0, math.pi))
        cfg = create_planner_config(resolution=0.5)
        plan = plan_coverage(vmap, robots, PlannerMode.LIDAR_CPP, seed=1, cfg=cfg)

        assert plan.viewpoints[0] and plan.viewpoints[1]
        assert all(p.x < 12.0 for p in plan.viewpoints[0])
        assert all(p.x > 12.0 for p in plan.viewpoints[1])

    def test_empty_route_falls_back_to_start(self):
        vmap = room(4.0)
        robots = team((1.0, 1.0, 0.0), (3.0, 3.0, 0.0))
        plan = plan_coverage(vmap, robots, PlannerMode.LIDAR_CPP, seed=0, cfg=create_planner_config(resolution=0.5))
        for index, route in enumerate(plan.viewpoints):
            assert plan.global_path(index) == (list(route) or [plan.starts[index]])


class TestPlanFile:
    def test_write_and_read(self, tmp_path):
        vmap = room(8.0)
        robots = team((1.0, 1.0, 0.0), (7.0, 7.0, 0.0))
        plan = plan_coverage(vmap, robots, PlannerMode.LIDAR_CPP, seed=1, cfg=create_planner_config(resolution=0.5))
        path = write_plan_file(plan, tmp_path / "nested" / "plan.txt")
        routes = read_plan_file(path, n_robots=2)
        assert [tuple(r) for r in routes] == list(plan.viewpoints)

    def test_format(self):
        text = format_plan([[Pose2(1.0, 2.0, 0.5)], [], [Pose2(3.0, 4.0)]])
        assert text == "0 1.0 2.0 0.5\n2 3.0 4.0 0.0\n"
        assert parse_plan(text, n_robots=4)[1:] == [[], [Pose2(3.0, 4.0)], []]

    @pytest.mark.parametrize("text", ["0 1 2\n", "x 1 2 3\n", "-1 1 2 3\n", "0 1 2 y\n"])
    def test_malformed_lines(self, text):
        with pytest.raises(ValueError):
            parse_plan(text)
