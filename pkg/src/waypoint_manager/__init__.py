"""
Waypoint manager state machine.
"""

from .manager import (
    Waypoint,
    WaypointKind,
    WmState,
    WmEvent,
    WaypointConfig,
    WaypointManager,
    EmptyPathError,
    ClockError,
    create_waypoint_config,
    wm_new,
    wm_tick,
    wm_skip,
)

__all__ = [
    "Waypoint",
    "WaypointKind",
    "WmState",
    "WmEvent",
    "WaypointConfig",
    "WaypointManager",
    "EmptyPathError",
    "ClockError",
    "create_waypoint_config",
    "wm_new",
    "wm_tick",
    "wm_skip",
]
