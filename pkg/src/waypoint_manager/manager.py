"""
Waypoint manager: per-robot state machine over the global coverage path.

States:
    FollowGlobal: the current waypoint is ``global_path[cursor]``.
    Inspect: the current waypoint is the accepted priority waypoint.
    Done: the global path is exhausted and no priority is active.

Priority offers are accepted only while following the global path and at
most once per ``min_priority_interval`` seconds. After an inspection the
manager resumes at the cursor it left.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field

from ..geometry import Bounds, Pose2

logger = logging.getLogger(__name__)


class EmptyPathError(ValueError):
    """A waypoint manager needs at least one global waypoint."""


class ClockError(ValueError):
    """``now`` did not strictly increase between ticks."""


class WaypointKind(str, Enum):
    GLOBAL = "Global"
    PRIORITY = "Priority"


class WmState(str, Enum):
    FOLLOW_GLOBAL = "FollowGlobal"
    INSPECT = "Inspect"
    DONE = "Done"


class WmEvent(str, Enum):
    """Transitions reported to the trajectory log."""

    WAYPOINT_REACHED = "waypoint_reached"
    PRIORITY_ACCEPTED = "priority_accepted"
    PRIORITY_COMPLETED = "priority_completed"
    WAYPOINT_SKIPPED = "waypoint_skipped"


@dataclass(frozen=True)
class Waypoint:
    target: Pose2
    kind: WaypointKind


class WaypointConfig(BaseModel):
    """Arrival tolerances and the priority rate limit."""

    model_config = ConfigDict(frozen=True)

    arrival_tol: float = Field(
        default=0.35,
        gt=0.0,
        description="Position tolerance in meters for reaching a waypoint",
    )

    heading_tol: float = Field(
        default=0.2,
        gt=0.0,
        le=math.pi,
        description="Heading tolerance in radians for priority waypoints",
    )

    global_heading_tol: float = Field(
        default=math.pi,
        gt=0.0,
        le=math.pi,
        description="Heading tolerance in radians for global waypoints (pi disables the check)",
    )

    min_priority_interval: float = Field(
        default=20.0,
        ge=0.0,
        description="Minimum seconds between two accepted priority waypoints",
    )


def create_waypoint_config(**overrides) -> WaypointConfig:
    return WaypointConfig(**overrides)


class WaypointManager:
    """
    Finite state machine feeding one robot its current waypoint.

    Mutated only through :meth:`tick` and :meth:`skip`. ``events`` holds the
    transitions of the most recent call.
    """

    def __init__(
        self,
        global_path: Sequence[Pose2],
        cfg: Optional[WaypointConfig] = None,
        bounds: Optional[Bounds] = None,
    ):
        if not global_path:
            raise EmptyPathError("global path must contain at least one pose")
        if bounds is not None:
            for pose in global_path:
                if not bounds.contains(pose.position):
                    raise ValueError(f"waypoint {pose.as_tuple()} lies outside map bounds")
        self.global_path = tuple(global_path)
        self.cfg = cfg or WaypointConfig()
        self.cursor = 0
        self.state = WmState.FOLLOW_GLOBAL
        self.active_priority: Optional[Pose2] = None
        self.last_priority_accept: Optional[float] = None
        self.priority_count = 0
        self.skipped_count = 0
        self.events: List[WmEvent] = []
        self._last_now: Optional[float] = None
        self._logger = logging.getLogger(f"{__name__}.WaypointManager")

    @property
    def transitions(self) -> int:
        """Priorities accepted so far."""
        return self.priority_count

    @property
    def is_done(self) -> bool:
        return self.state is WmState.DONE

    def current_waypoint(self) -> Optional[Waypoint]:
        if self.state is WmState.INSPECT:
            return Waypoint(self.active_priority, WaypointKind.PRIORITY)
        if self.state is WmState.FOLLOW_GLOBAL:
            return Waypoint(self.global_path[self.cursor], WaypointKind.GLOBAL)
        return None

    def _reached(self, pose: Pose2, waypoint: Waypoint) -> bool:
        tolerance = self.cfg.heading_tol if waypoint.kind is WaypointKind.PRIORITY else self.cfg.global_heading_tol
        target = waypoint.target
        return (pose.distance_to(target) <= self.cfg.arrival_tol
                and abs(pose.heading_error(target.theta)) <= tolerance)

    def _advance_cursor(self) -> None:
        self.cursor += 1
        if self.cursor >= len(self.global_path):
            self.cursor = len(self.global_path)
            self.state = WmState.DONE

    def _finish_priority(self) -> None:
        self.active_priority = None
        self.state = WmState.FOLLOW_GLOBAL

    def _priority_allowed(self, now: float) -> bool:
        if self.last_priority_accept is None:
            return True
        return now - self.last_priority_accept >= self.cfg.min_priority_interval

    def tick(self, pose: Pose2, now: float, offered_priority: Optional[Pose2] = None) -> Optional[Waypoint]:
        """
        Advance the state machine by one tick.

        Args:
            pose: Believed robot pose.
            now: Trial time in seconds; must exceed the previous call's.
            offered_priority: Pre-selected inspection viewpoint, if any.

        Returns:
            The waypoint to drive to, or None once Done.

        Raises:
            ClockError: If ``now`` does not strictly increase.
        """
        if self._last_now is not None and not now > self._last_now:
            raise ClockError(f"tick time {now} not after {self._last_now}")
        self._last_now = now
        self.events = []

        current = self.current_waypoint()
        if current is not None and self._reached(pose, current):
            if self.state is WmState.INSPECT:
                self._finish_priority()
                self.events.append(WmEvent.PRIORITY_COMPLETED)
                self._logger.debug(f"Priority waypoint reached at t={now:.2f}, resuming cursor {self.cursor}")
            else:
                self._advance_cursor()
                self.events.append(WmEvent.WAYPOINT_REACHED)
                self._logger.debug(f"Global waypoint reached at t={now:.2f}, cursor {self.cursor}")

        if (self.state is WmState.FOLLOW_GLOBAL
                and offered_priority is not None
                and self._priority_allowed(now)):
            self.state = WmState.INSPECT
            self.active_priority = offered_priority
            self.last_priority_accept = now
            self.priority_count += 1
            self.events.append(WmEvent.PRIORITY_ACCEPTED)
            self._logger.debug(f"Accepted priority waypoint {offered_priority.as_tuple()} at t={now:.2f}")

        return self.current_waypoint()

    def skip(self) -> Optional[Waypoint]:
        """Drop the current target after navigation reported it unreachable."""
        if self.state is WmState.INSPECT:
            self._finish_priority()
        elif self.state is WmState.FOLLOW_GLOBAL:
            self._advance_cursor()
        else:
            return None
        self.skipped_count += 1
        self.events.append(WmEvent.WAYPOINT_SKIPPED)
        return self.current_waypoint()


def wm_new(
    global_path: Sequence[Pose2],
    cfg: Optional[WaypointConfig] = None,
    bounds: Optional[Bounds] = None,
) -> WaypointManager:
    return WaypointManager(global_path, cfg, bounds)


def wm_tick(
    wm: WaypointManager,
    pose: Pose2,
    now: float,
    offered_priority: Optional[Pose2] = None,
) -> Optional[Waypoint]:
    return wm.tick(pose, now, offered_priority)


def wm_skip(wm: WaypointManager) -> Optional[Waypoint]:
    return wm.skip()
