"""Tests for LTF / STF / DF classification and the scan history."""

import math

import numpy as np
import pytest

from src.geometry import Bounds, LineSegment, Point2, Pose2, VectorMap
from src.perception import (
    FeatureClass,
    LaserScan,
    PerceptionConfig,
    ScanHistory,
    ScanOrderError,
    classify_scan,
    create_perception_config,
    create_scan_history,
    ltf_likelihood,
    stf_likelihood,
)
from src.simulator import WorldObject, lidar_sweep


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


@pytest.fixture
def cfg() -> PerceptionConfig:
    return create_perception_config()


def scan_at(pose: Pose2, timestamp: float, *global_points) -> LaserScan:
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    local = [((x - pose.x) * c + (y - pose.y) * s, -(x - pose.x) * s + (y - pose.y) * c) for x, y in global_points]
    return LaserScan(pose_estimate=pose, timestamp=timestamp, points=np.array(local))


class TestPerceptionConfig:
    def test_defaults(self, cfg):
        assert cfg.sigma_s == 0.0025
        assert cfg.ltf_threshold == 0.3679
        assert cfg.stf_threshold == 0.3679
        assert cfg.history_horizon == 10

    def test_thresholds_are_likelihood_one_deviation_out(self, cfg):
        assert cfg.ltf_threshold == pytest.approx(math.exp(-1.0), abs=1e-4)
        assert cfg.stf_threshold == pytest.approx(math.exp(-1.0), abs=1e-4)
        assert cfg.ltf_threshold == pytest.approx(math.exp(-(cfg.sigma_std ** 2) / cfg.sigma_s), abs=1e-4)

    def test_invalid_values_rejected(self):
        with pytest.raises(ValueError):
            PerceptionConfig(sigma_s=0.0)
        with pytest.raises(ValueError):
            PerceptionConfig(ltf_threshold=1.0)
        with pytest.raises(ValueError):
            PerceptionConfig(history_horizon=0)


class TestLikelihoods:
    def test_ltf_on_wall_is_one(self, room, cfg):
        assert ltf_likelihood(Point2(5.0, 0.0), room, cfg.sigma_s) == pytest.approx(1.0)

    def test_ltf_one_sigma_is_below_threshold(self, room, cfg):
        value = ltf_likelihood(Point2(5.0, 0.05), room, cfg.sigma_s)
        assert value == pytest.approx(math.exp(-1.0))
        assert value < cfg.ltf_threshold

    def test_ltf_empty_map_is_zero(self, cfg):
        empty = VectorMap((), Bounds(0.0, 0.0, 1.0, 1.0))
        assert ltf_likelihood(Point2(0.5, 0.5), empty, cfg.sigma_s) == 0.0

    def test_rejects_non_positive_sigma(self, room):
        with pytest.raises(ValueError):
            ltf_likelihood(Point2(1.0, 1.0), room, 0.0)

    def test_stf_with_empty_history(self, cfg):
        history = create_scan_history(cfg)
        assert stf_likelihood(Point2(1.0, 1.0), history, cfg.sigma_s) == (0.0, None)

    def test_stf_matches_nearest_prior_point(self, cfg):
        history = create_scan_history(cfg)
        history.push(0.0, np.array([[3.0, 3.0], [6.0, 6.0]]))
        probability, matched = stf_likelihood(Point2(3.0, 3.05), history, cfg.sigma_s)
        assert matched == Point2(3.0, 3.0)
        assert probability == pytest.approx(math.exp(-1.0))


class TestClassifyScan:
    def test_static_box_becomes_stf_on_second_look(self, room, cfg):
        history = create_scan_history(cfg)
        pose = Pose2(5.0, 5.0, 0.4)

        first = classify_scan(scan_at(pose, 0.0, (5.0, 0.0), (3.0, 3.0)), room, history, cfg)
        assert first.labels == (FeatureClass.LTF, FeatureClass.DF)

        second = classify_scan(scan_at(pose, 1.0, (5.0, 0.0), (3.0, 3.0)), room, history, cfg)
        assert second.labels == (FeatureClass.LTF, FeatureClass.STF)
        np.testing.assert_allclose(second.points_of(FeatureClass.STF), [[3.0, 3.0]], atol=1e-9)

    def test_labels_match_point_by_point_reference(self, room, cfg):
        rng = np.random.default_rng(8)
        reference, history = create_scan_history(cfg), create_scan_history(cfg)
        for k in range(5):
            prior = rng.uniform(1.0, 9.0, size=(80, 2))
            reference.push(float(k), prior)
            history.push(float(k), prior)
        stored = reference.stacked_points()
        near = stored[rng.choice(len(stored), 40)] + rng.normal(0.0, 0.03, size=(40, 2))
        points = np.vstack([near, rng.uniform(0.5, 9.5, size=(40, 2)), [[0.0, 5.0], [5.0, 9.99]]])
        classified = classify_scan(LaserScan(Pose2(0.0, 0.0, 0.0), 10.0, points), room, history, cfg)

        expected = []
        for x, y in points:
            p = Point2(float(x), float(y))
            if ltf_likelihood(p, room, cfg.sigma_s) > cfg.ltf_threshold:
                expected.append(FeatureClass.LTF)
                continue
            probability, _ = stf_likelihood(p, reference, cfg.sigma_s)
            expected.append(FeatureClass.STF if probability > cfg.stf_threshold else FeatureClass.DF)
        assert list(classified.labels) == expected
        assert {FeatureClass.LTF, FeatureClass.STF, FeatureClass.DF} <= set(expected)

    def test_moving_point_stays_dynamic(self, room, cfg):
        history = create_scan_history(cfg)
        pose = Pose2(5.0, 5.0, 0.0)
        for k in range(5):
            classified = classify_scan(scan_at(pose, float(k), (2.0 + 0.5 * k, 7.0)), room, history, cfg)
            assert classified.labels == (FeatureClass.DF,)

    def test_ltf_points_not_retained(self, room, cfg):
        history = create_scan_history(cfg)
        classify_scan(scan_at(Pose2(5.0, 5.0), 0.0, (5.0, 0.0), (10.0, 4.0)), room, history, cfg)
        assert history.point_count == 0

    def test_label_counts_partition(self, room, cfg):
        history = create_scan_history(cfg)
        classified = classify_scan(scan_at(Pose2(5.0, 5.0), 0.0, (5.0, 0.0), (3.0, 3.0), (4.0, 4.0)), room, history, cfg)
        counts = classified.label_counts()
        assert sum(counts.values()) == 3
        assert counts[FeatureClass.LTF] == 1

    def test_non_increasing_timestamp_rejected(self, room, cfg):
        history = create_scan_history(cfg)
        classify_scan(scan_at(Pose2(5.0, 5.0), 1.0, (3.0, 3.0)), room, history, cfg)
        with pytest.raises(ScanOrderError):
            classify_scan(scan_at(Pose2(5.0, 5.0), 1.0, (3.0, 3.0)), room, history, cfg)

    def test_empty_scan_rejected(self):
        with pytest.raises(ValueError):
            LaserScan(pose_estimate=Pose2(0.0, 0.0), timestamp=0.0, points=np.empty((0, 2)))


class TestScanHistory:
    def test_evicts_oldest_beyond_capacity(self):
        history = ScanHistory(capacity=2, cell_size=0.1)
        history.push(0.0, np.array([[1.0, 1.0]]))
        history.push(1.0, np.array([[2.0, 2.0], [2.5, 2.5]]))
        history.push(2.0, np.array([[3.0, 3.0]]))
        assert history.timestamps() == [1.0, 2.0]
        assert history.point_count == 3
        distance, point = history.nearest(Point2(1.0, 1.0))
        assert point == Point2(2.0, 2.0)
        assert distance == pytest.approx(math.sqrt(2.0))

    def test_rejects_non_increasing_push(self):
        history = ScanHistory(capacity=3, cell_size=0.1)
        history.push(1.0, np.array([[0.0, 0.0]]))
        with pytest.raises(ValueError):
            history.push(1.0, np.array([[0.0, 0.0]]))

    def test_nearest_is_exact(self):
        rng = np.random.default_rng(5)
        history = ScanHistory(capacity=4, cell_size=0.1)
        batches = [rng.uniform(0.0, 10.0, size=(60, 2)) for _ in range(4)]
        for k, batch in enumerate(batches):
            history.push(float(k), batch)
        stored = np.concatenate(batches)
        for query in rng.uniform(-1.0, 11.0, size=(100, 2)):
            distance, _ = history.nearest(Point2(*query))
            assert distance == pytest.approx(np.min(np.hypot(*(stored - query).T)))

    def test_batched_distances_match_single_lookups(self):
        rng = np.random.default_rng(6)
        history = ScanHistory(capacity=4, cell_size=0.1)
        assert np.all(np.isinf(history.nearest_distances(np.zeros((3, 2)))))
        for k in range(9):
            history.push(float(k), rng.uniform(0.0, 10.0, size=(rng.integers(1, 50), 2)))
        queries = rng.uniform(-1.0, 11.0, size=(600, 2))
        batched = history.nearest_distances(queries)
        single = [history.nearest(Point2(*query))[0] for query in queries]
        np.testing.assert_allclose(batched, single, rtol=1e-12)

    def test_invalid_construction(self):
        with pytest.raises(ValueError):
            ScanHistory(capacity=0, cell_size=0.1)
        with pytest.raises(ValueError):
            ScanHistory(capacity=1, cell_size=0.0)


class TestClassificationAudit:
    """Label rates on simulated sweeps with exact localization and 1 cm range noise."""

    @staticmethod
    def _owned_by(points: np.ndarray, obj, margin: float = 0.05) -> np.ndarray:
        offset = np.abs(points - np.asarray(obj.center))
        return offset.max(axis=1) <= obj.half_extent + margin

    def test_wall_box_and_mover_rates(self, room, cfg):
        rng = np.random.default_rng(11)
        history = create_scan_history(cfg)
        box = WorldObject(id="box", center=(7.0, 7.0), half_extent=0.25)
        wall_hits = wall_ltf = box_hits = box_stf = mover_hits = mover_stf = 0

        for k in range(14):
            mover = WorldObject(id="mover", center=(1.5 + 0.5 * k, 2.5), half_extent=0.15, is_target=False)
            pose = Pose2(3.0 + 0.01 * k, 5.0, 0.0)
            sweep = lidar_sweep(room, [box, mover], pose, pose, 360, 10.0, 0.01, rng, timestamp=0.5 * k)
            classified = classify_scan(sweep.scan, room, history, cfg)
            points = classified.global_points
            labels = np.array([label.value for label in classified.labels])

            on_box = self._owned_by(points, box)
            on_mover = self._owned_by(points, mover)
            on_wall = ~(on_box | on_mover)
            wall_hits += np.count_nonzero(on_wall)
            wall_ltf += np.count_nonzero(on_wall & (labels == FeatureClass.LTF.value))
            if k >= 1:
                box_hits += np.count_nonzero(on_box)
                box_stf += np.count_nonzero(on_box & (labels == FeatureClass.STF.value))
            mover_hits += np.count_nonzero(on_mover)
            mover_stf += np.count_nonzero(on_mover & (labels == FeatureClass.STF.value))

        assert box_hits > 0 and mover_hits > 0
        assert wall_ltf / wall_hits >= 0.95
        assert box_stf / box_hits >= 0.90
        assert mover_stf / mover_hits < 0.10
