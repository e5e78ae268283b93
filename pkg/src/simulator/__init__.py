"""
Deterministic 2D world: kinematics, simulated sensors, drift and trial execution.
"""

from .world import Difficulty, WorldObject, outline_arrays, world_map, validate_objects, target_ids
from .sensors import (
    LidarConfig,
    CameraConfig,
    LidarSweep,
    lidar_bearings,
    lidar_sweep,
    simulate_lidar,
    camera_candidates,
    camera_detect,
)
from .drift import DriftConfig, DriftModel
from .navigation import NavigationGrid, StepOutcome, build_navigation_grid, step_robot
from .scenario import Scenario, load_scenario, save_scenario
from .apartment import (
    ApartmentLayout,
    build_reference_apartment,
    generate_apartment,
    default_team,
    reference_scenario,
    write_reference_map,
)
from .trajectory import TRAJECTORY_COLUMNS, TrajectoryLogWriter, read_trajectory_log
from .trial import (
    FailureMode,
    RobotUpdate,
    RoundOutcome,
    TrialResult,
    RobotRuntime,
    TrialCoordinator,
    navigation_grids,
    plan_for,
    run_trial,
)

__all__ = [
    "Difficulty",
    "WorldObject",
    "outline_arrays",
    "world_map",
    "validate_objects",
    "target_ids",
    "LidarConfig",
    "CameraConfig",
    "LidarSweep",
    "lidar_bearings",
    "lidar_sweep",
    "simulate_lidar",
    "camera_candidates",
    "camera_detect",
    "DriftConfig",
    "DriftModel",
    "NavigationGrid",
    "StepOutcome",
    "build_navigation_grid",
    "step_robot",
    "Scenario",
    "load_scenario",
    "save_scenario",
    "ApartmentLayout",
    "build_reference_apartment",
    "generate_apartment",
    "default_team",
    "reference_scenario",
    "write_reference_map",
    "TRAJECTORY_COLUMNS",
    "TrajectoryLogWriter",
    "read_trajectory_log",
    "FailureMode",
    "RobotUpdate",
    "RoundOutcome",
    "TrialResult",
    "RobotRuntime",
    "TrialCoordinator",
    "navigation_grids",
    "plan_for",
    "run_trial",
]
