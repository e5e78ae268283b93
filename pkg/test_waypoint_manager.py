"""Tests for the waypoint manager state machine."""

import math

import numpy as np
import pytest

from src.geometry import Bounds, Pose2
from src.waypoint_manager import (
    ClockError,
    EmptyPathError,
    WaypointKind,
    WaypointManager,
    WmEvent,
    WmState,
    create_waypoint_config,
    wm_new,
    wm_skip,
    wm_tick,
)

PATH = [Pose2(0.0, 0.0), Pose2(5.0, 0.0), Pose2(5.0, 5.0)]
FAR = Pose2(20.0, 20.0)


class TestConstruction:
    def test_empty_path(self):
        with pytest.raises(EmptyPathError):
            WaypointManager([])

    def test_out_of_bounds_waypoint(self):
        with pytest.raises(ValueError):
            wm_new(PATH, bounds=Bounds(0.0, 0.0, 4.0, 4.0))

    def test_starts_following_first_waypoint(self):
        wm = wm_new(PATH)
        assert wm.state is WmState.FOLLOW_GLOBAL
        assert wm.current_waypoint().target == PATH[0]
        assert wm.current_waypoint().kind is WaypointKind.GLOBAL


class TestGlobalFollowing:
    def test_advances_and_finishes(self):
        wm = wm_new(PATH)
        wp = wm_tick(wm, Pose2(0.1, 0.0), 1.0)
        assert wm.events == [WmEvent.WAYPOINT_REACHED]
        assert wp.target == PATH[1]
        wm_tick(wm, FAR, 2.0)
        assert wm.events == []
        wm_tick(wm, Pose2(5.0, 0.2), 3.0)
        assert wm_tick(wm, Pose2(5.0, 5.0), 4.0) is None
        assert wm.is_done
        assert wm_tick(wm, Pose2(5.0, 5.0), 5.0) is None

    def test_global_heading_ignored_by_default(self):
        wm = wm_new([Pose2(0.0, 0.0, 0.0), Pose2(3.0, 0.0)])
        wm_tick(wm, Pose2(0.0, 0.0, math.pi), 1.0)
        assert wm.cursor == 1

    def test_clock_must_increase(self):
        wm = wm_new(PATH)
        wm_tick(wm, FAR, 1.0)
        with pytest.raises(ClockError):
            wm_tick(wm, FAR, 1.0)


class TestPriority:
    def test_accept_inspect_and_resume_cursor(self):
        wm = wm_new(PATH)
        wm_tick(wm, Pose2(0.0, 0.0), 1.0)
        assert wm.cursor == 1

        priority = Pose2(2.0, 2.0, math.pi / 2)
        wp = wm_tick(wm, FAR, 2.0, priority)
        assert wm.events == [WmEvent.PRIORITY_ACCEPTED]
        assert wp.kind is WaypointKind.PRIORITY
        assert wm.state is WmState.INSPECT

        # position matches but heading does not
        wm_tick(wm, Pose2(2.0, 2.0, 0.0), 3.0)
        assert wm.state is WmState.INSPECT

        wp = wm_tick(wm, Pose2(2.0, 2.1, math.pi / 2), 4.0)
        assert wm.events == [WmEvent.PRIORITY_COMPLETED]
        assert wp.target == PATH[1]
        assert wm.cursor == 1

    def test_offers_ignored_while_inspecting(self):
        wm = wm_new(PATH, create_waypoint_config(min_priority_interval=0.0))
        wm_tick(wm, FAR, 1.0, Pose2(2.0, 2.0))
        wm_tick(wm, FAR, 2.0, Pose2(3.0, 3.0))
        assert wm.active_priority == Pose2(2.0, 2.0)
        assert wm.priority_count == 1

    def test_rate_limit(self):
        wm = wm_new(PATH, create_waypoint_config(min_priority_interval=20.0))
        offer = Pose2(2.0, 2.0)
        wm_tick(wm, FAR, 1.0, offer)
        wm_tick(wm, offer, 2.0)
        assert wm.state is WmState.FOLLOW_GLOBAL
        wm_tick(wm, FAR, 20.9, offer)
        assert wm.state is WmState.FOLLOW_GLOBAL
        wm_tick(wm, FAR, 21.0, offer)
        assert wm.state is WmState.INSPECT
        assert wm.transitions == 2

    def test_accepted_priority_rate_bound(self):
        rng = np.random.default_rng(7)
        interval = 5.0
        wm = wm_new([Pose2(float(k), 0.0) for k in range(50)], create_waypoint_config(min_priority_interval=interval))
        now = 0.0
        for _ in range(2000):
            now += float(rng.uniform(0.05, 0.5))
            pose = Pose2(*rng.uniform(0.0, 50.0, size=2))
            if wm.state is WmState.INSPECT and rng.random() < 0.3:
                pose = wm.active_priority
            offer = Pose2(*rng.uniform(0.0, 10.0, size=2)) if rng.random() < 0.5 else None
            wm_tick(wm, pose, now, offer)
        assert wm.priority_count <= math.floor(now / interval) + 1

    def test_always_returns_a_waypoint_until_done(self):
        wm = wm_new(PATH, create_waypoint_config(min_priority_interval=0.0))
        for k, pose in enumerate([FAR, Pose2(0.0, 0.0), Pose2(1.0, 1.0), Pose2(5.0, 0.0)]):
            assert wm_tick(wm, pose, float(k + 1), Pose2(1.0, 1.0)) is not None


class TestSkip:
    def test_skip_global_and_priority(self):
        wm = wm_new(PATH)
        assert wm_skip(wm).target == PATH[1]
        wm_tick(wm, FAR, 1.0, Pose2(2.0, 2.0))
        assert wm.state is WmState.INSPECT
        wp = wm_skip(wm)
        assert wp.target == PATH[1]
        assert wm.events[-1] is WmEvent.WAYPOINT_SKIPPED
        assert wm.skipped_count == 2

    def test_skip_to_done(self):
        wm = wm_new([Pose2(1.0, 1.0)])
        assert wm_skip(wm) is None
        assert wm.is_done
        assert wm_skip(wm) is None
        assert wm.skipped_count == 1
