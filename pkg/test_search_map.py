"""Tests for the search map, footprints and entropy."""

import math

import numpy as np
import pytest

from src.geometry import Bounds, LineSegment, Point2, Pose2, VectorMap, segments_intersect
from src.search_map import (
    RectangularFootprint,
    SearchMapSizeError,
    TriangularFootprint,
    apply_footprint,
    cell_entropy,
    entropy,
    export_pgm,
    footprint_contains,
    init_search_map,
    is_visually_observed,
    mark_visually_observed,
    observe_footprint,
    points_in_convex_polygon,
    read_pgm,
)


def room(extra=()) -> VectorMap:
    walls = (
        LineSegment.from_coords(0.0, 0.0, 10.0, 0.0),
        LineSegment.from_coords(10.0, 0.0, 10.0, 10.0),
        LineSegment.from_coords(10.0, 10.0, 0.0, 10.0),
        LineSegment.from_coords(0.0, 10.0, 0.0, 0.0),
    )
    return VectorMap(walls + tuple(extra), Bounds(0.0, 0.0, 10.0, 10.0))


class TestInit:
    def test_perimeter_cells_are_obstacles(self):
        sm = init_search_map(room(), 0.5)
        assert (sm.width, sm.height) == (20, 20)
        assert sm.obstacle_cell_count() == 76
        assert sm.free_cell_count() == 324

    def test_initial_entropy_counts_non_obstacle_cells(self):
        sm = init_search_map(room(), 0.5)
        assert entropy(sm) == float(sm.cell_count - sm.obstacle_cell_count())

    def test_rejects_bad_resolution(self):
        with pytest.raises(ValueError):
            init_search_map(room(), 0.0)
        with pytest.raises(SearchMapSizeError):
            init_search_map(room(), 0.001)

    def test_cell_lookup(self):
        sm = init_search_map(room(), 0.5)
        assert sm.cell_of(Point2(0.1, 0.1)) == 0
        assert sm.cell_of(Point2(0.6, 0.1)) == 1
        assert sm.cell_of(Point2(0.1, 0.6)) == sm.width
        assert sm.cell_of(Point2(-0.1, 0.1)) is None
        assert sm.cells_of(np.array([[0.6, 0.1], [11.0, 1.0]])).tolist() == [1, -1]
        assert sm.cell_center(0) == Point2(0.25, 0.25)


class TestEntropy:
    def test_single_cell_value(self):
        assert cell_entropy([0.9]) == pytest.approx(0.46900, abs=1e-4)

    def test_certain_cells_contribute_nothing(self):
        assert cell_entropy([0.0, 1.0]) == 0.0
        assert cell_entropy([0.5, 0.5]) == 2.0


class TestFootprints:
    def test_rectangular_polygon_contains_center_cells(self):
        fp = RectangularFootprint(length=2.0, width=2.0)
        inside = footprint_contains(fp, Pose2(5.0, 5.0, 0.3), np.array([[5.0, 5.0], [5.9, 5.0], [8.0, 5.0]]))
        assert inside.tolist() == [True, True, False]

    def test_triangular_apex_at_pose(self):
        fp = TriangularFootprint(range=3.5, half_angle=0.5)
        polygon = fp.polygon(Pose2(1.0, 2.0, 0.0))
        np.testing.assert_allclose(polygon[0], [1.0, 2.0])
        assert fp.reach == 3.5
        inside = footprint_contains(fp, Pose2(1.0, 2.0, 0.0), np.array([[3.0, 2.0], [0.0, 2.0]]))
        assert inside.tolist() == [True, False]

    def test_half_angle_bounds(self):
        with pytest.raises(ValueError):
            TriangularFootprint(range=1.0, half_angle=math.pi / 2)


class TestObserveFootprint:
    def test_lidar_frees_cells_once(self):
        sm = init_search_map(room(), 0.5)
        before = entropy(sm)
        fp = RectangularFootprint(length=2.0, width=2.0)
        assert apply_footprint(sm, Pose2(5.0, 5.0, 0.0), fp) == 16
        assert entropy(sm) == before - 16
        assert apply_footprint(sm, Pose2(5.0, 5.0, 0.0), fp) == 0
        assert not sm.visual_mask.any()

    def test_entropy_never_increases(self):
        sm = init_search_map(room(), 0.5)
        rng = np.random.default_rng(2)
        trace = [entropy(sm)]
        for _ in range(30):
            pose = Pose2(*rng.uniform(1.0, 9.0, size=2), rng.uniform(-math.pi, math.pi))
            fp = TriangularFootprint(range=3.5, half_angle=0.5) if rng.random() < 0.5 else RectangularFootprint(length=3.0, width=3.0)
            observe_footprint(sm, pose, fp)
            trace.append(entropy(sm))
        assert all(b <= a for a, b in zip(trace, trace[1:]))

    def test_occluded_cells_untouched(self):
        sm = init_search_map(room([LineSegment.from_coords(5.0, 0.0, 5.0, 10.0)]), 0.5)
        update = observe_footprint(sm, Pose2(4.0, 5.0, 0.0), RectangularFootprint(length=4.0, width=4.0))
        assert len(update.freed) == 40
        assert np.all(sm.cell_centers[update.freed][:, 0] < 5.0)

    def test_visibility_matches_test_against_every_segment(self):
        rng = np.random.default_rng(9)
        clutter = [LineSegment.from_coords(*(float(v) for v in rng.uniform(0.5, 9.5, size=4))) for _ in range(25)]
        vector_map = room(clutter)
        for k in range(12):
            pose = Pose2(*rng.uniform(1.0, 9.0, size=2), rng.uniform(-math.pi, math.pi))
            fp = RectangularFootprint(length=3.0, width=3.0) if k % 2 else TriangularFootprint(range=3.5, half_angle=0.5)
            update = observe_footprint(init_search_map(vector_map, 0.25), pose, fp)

            fresh = init_search_map(vector_map, 0.25)
            cells = np.flatnonzero(fresh.occupancy.reshape(-1) == 0.5)
            cells = cells[points_in_convex_polygon(fresh.cell_centers[cells], fp.polygon(pose))]
            hidden = segments_intersect(pose.as_array(), fresh.cell_centers[cells], vector_map.seg_a, vector_map.seg_b)
            assert np.array_equal(np.sort(update.freed), np.sort(cells[~hidden]))

    def test_obstacle_cells_never_change(self):
        sm = init_search_map(room(), 0.5)
        obstacles = sm.obstacle_mask().copy()
        observe_footprint(sm, Pose2(1.0, 1.0, -2.0), RectangularFootprint(length=6.0, width=6.0))
        observe_footprint(sm, Pose2(1.0, 1.0, -2.0), TriangularFootprint(range=3.5, half_angle=0.5))
        assert np.array_equal(sm.obstacle_mask(), obstacles)
        assert not sm.visual_mask[obstacles].any()

    def test_camera_marks_visual_mask(self):
        sm = init_search_map(room(), 0.5)
        camera = TriangularFootprint(range=3.5, half_angle=0.5)
        update = observe_footprint(sm, Pose2(5.0, 5.0, 0.0), camera)
        assert len(update.observed) > 0
        assert set(update.freed.tolist()) <= set(update.observed.tolist())
        assert is_visually_observed(sm, Point2(7.0, 5.1))
        assert not is_visually_observed(sm, Point2(3.0, 5.0))
        assert not is_visually_observed(sm, Point2(-1.0, 5.0))
        again = observe_footprint(sm, Pose2(5.0, 5.0, 0.0), camera)
        assert again.is_empty

    def test_camera_marks_cells_already_freed_by_lidar(self):
        sm = init_search_map(room(), 0.5)
        observe_footprint(sm, Pose2(5.0, 5.0, 0.0), RectangularFootprint(length=6.0, width=6.0))
        update = observe_footprint(sm, Pose2(5.0, 5.0, 0.0), TriangularFootprint(range=2.0, half_angle=0.5))
        assert len(update.freed) == 0
        assert len(update.observed) > 0

    def test_mirror_replays_visual_delta(self):
        sm = init_search_map(room(), 0.5)
        mirror = init_search_map(room(), 0.5)
        update = observe_footprint(sm, Pose2(2.0, 8.0, -1.0), TriangularFootprint(range=3.5, half_angle=0.5))
        mark_visually_observed(mirror, update.observed.tolist())
        assert np.array_equal(mirror.visual_mask, sm.visual_mask)


class TestExport:
    def test_pgm_round_trip(self, tmp_path):
        sm = init_search_map(room(), 0.5)
        observe_footprint(sm, Pose2(5.0, 5.0, 0.0), RectangularFootprint(length=2.0, width=2.0))
        path = tmp_path / "map.pgm"
        meta = export_pgm(sm, path)
        grey = read_pgm(path)
        assert grey.shape == (20, 20)
        assert set(np.unique(grey).tolist()) == {0, 128, 255}
        assert grey[0, 0] == 255
        assert grey[10, 10] == 0
        assert meta.read_text().split() == ["0.0", "0.0", "0.5", "20", "20"]
