"""Tests for STF pooling, region filtering and priority viewpoints."""

import math

import numpy as np
import pytest

from src.geometry import Bounds, LineSegment, Point2, Pose2, VectorMap
from src.inspection import (
    InspectionRegion,
    create_inspection_config,
    detect_inspection_regions,
    filter_regions,
    pool_stf_clusters,
    pool_stfs,
    region_to_priority_waypoint,
    select_nearest,
)
from src.perception import LaserScan, classify_scan, create_perception_config, create_scan_history
from src.search_map import TriangularFootprint, init_search_map, observe_footprint


@pytest.fixture
def room() -> VectorMap:
    return VectorMap(
        (
            LineSegment.from_coords(0.0, 0.0, 10.0, 0.0),
            LineSegment.from_coords(10.0, 0.0, 10.0, 10.0),
            LineSegment.from_coords(10.0, 10.0, 0.0, 10.0),
            LineSegment.from_coords(0.0, 10.0, 0.0, 0.0),
        ),
        Bounds(0.0, 0.0, 10.0, 10.0),
    )


class TestPooling:
    def test_greedy_first_come_clusters(self):
        points = np.array([[0.0, 0.0], [0.3, 0.0], [5.0, 5.0], [0.45, 0.0], [5.2, 5.0]])
        clusters = pool_stf_clusters(points, 0.5)
        assert [count for _, count in clusters] == [3, 2]
        assert clusters[0][0].x == pytest.approx(0.25)
        assert clusters[1][0].as_tuple() == pytest.approx((5.1, 5.0))

    def test_radius_measured_from_seed(self):
        # 0.8 is within the radius of 0.4 but not of the seed at 0.0
        centers = pool_stfs([Point2(0.0, 0.0), Point2(0.4, 0.0), Point2(0.8, 0.0)], 0.5)
        assert len(centers) == 2
        assert centers[1] == Point2(0.8, 0.0)

    def test_empty_and_bad_radius(self):
        assert pool_stfs(np.empty((0, 2)), 0.5) == []
        with pytest.raises(ValueError):
            pool_stfs([Point2(0.0, 0.0)], 0.0)


class TestFilterRegions:
    def test_drops_points_near_walls(self, room):
        sm = init_search_map(room, 0.5)
        cfg = create_inspection_config()
        regions = filter_regions([Point2(0.1, 5.0), Point2(5.0, 5.0)], room, sm, cfg, now=3.0)
        assert [r.center for r in regions] == [Point2(5.0, 5.0)]
        assert regions[0].created_at == 3.0

    def test_drops_visually_observed_points(self, room):
        sm = init_search_map(room, 0.5)
        observe_footprint(sm, Pose2(2.0, 5.0, 0.0), TriangularFootprint(range=3.5, half_angle=0.5))
        cfg = create_inspection_config()
        regions = filter_regions([Point2(4.0, 5.0), Point2(8.0, 8.0)], room, sm, cfg, now=0.0, source_counts=[4, 1])
        assert [(r.center, r.source_count) for r in regions] == [(Point2(8.0, 8.0), 1)]

    def test_region_requires_a_source(self):
        with pytest.raises(ValueError):
            InspectionRegion(center=Point2(1.0, 1.0), created_at=0.0, source_count=0)


class TestSelection:
    def test_nearest_wins(self):
        regions = [InspectionRegion(Point2(5.0, 0.0), 0.0), InspectionRegion(Point2(1.0, 1.0), 1.0)]
        assert select_nearest(regions, Pose2(0.0, 0.0)).center == Point2(1.0, 1.0)

    def test_ties_prefer_older_then_smaller_xy(self):
        pose = Pose2(0.0, 0.0)
        older = InspectionRegion(Point2(0.0, 2.0), 0.0)
        newer = InspectionRegion(Point2(2.0, 0.0), 1.0)
        assert select_nearest([newer, older], pose) is older
        a = InspectionRegion(Point2(0.0, 2.0), 0.0)
        b = InspectionRegion(Point2(0.0, -2.0), 0.0)
        assert select_nearest([a, b], pose) is b

    def test_empty(self):
        assert select_nearest([], Pose2(0.0, 0.0)) is None


class TestPriorityWaypoint:
    def test_standoff_on_line_facing_center(self):
        wp = region_to_priority_waypoint(InspectionRegion(Point2(5.0, 0.0), 0.0), Pose2(0.0, 0.0, 2.0), 1.5)
        assert (wp.x, wp.y) == pytest.approx((3.5, 0.0))
        assert wp.theta == pytest.approx(0.0)

    def test_close_robot_only_turns(self):
        wp = region_to_priority_waypoint(InspectionRegion(Point2(1.0, 1.0), 0.0), Pose2(1.0, 0.0, math.pi), 1.5)
        assert (wp.x, wp.y) == (1.0, 0.0)
        assert wp.theta == pytest.approx(math.pi / 2)

    def test_rejects_bad_standoff(self):
        with pytest.raises(ValueError):
            region_to_priority_waypoint(InspectionRegion(Point2(1.0, 1.0), 0.0), Pose2(0.0, 0.0), 0.0)


class TestDetectInspectionRegions:
    def test_static_box_yields_one_region_on_second_scan(self, room):
        perception = create_perception_config()
        history = create_scan_history(perception)
        sm = init_search_map(room, 0.5)
        cfg = create_inspection_config()
        box = np.array([[3.0, 3.0], [3.05, 3.0], [3.1, 3.0], [5.0, 0.0]])
        pose = Pose2(5.0, 5.0, 0.0)
        local = box - pose.as_array()

        first = classify_scan(LaserScan(pose, 0.0, local), room, history, perception)
        assert detect_inspection_regions(first, room, sm, cfg, now=0.0) == []

        second = classify_scan(LaserScan(pose, 1.0, local), room, history, perception)
        regions = detect_inspection_regions(second, room, sm, cfg, now=1.0)
        assert len(regions) == 1
        assert regions[0].source_count == 3
        assert regions[0].center.x == pytest.approx(3.05)
