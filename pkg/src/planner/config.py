"""
Planner configuration, planner modes and the robot description shared with the simulator.
"""

import math
from enum import Enum
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..geometry import Pose2
from ..search_map import RectangularFootprint, TriangularFootprint


class PlannerMode(str, Enum):
    """The three planner settings compared by the experiments."""

    LIDAR_CPP = "LidarCPP"
    VISUAL_CPP = "VisualCPP"
    LIDAR_CPP_LIVE = "LidarCPPLive"

    @property
    def base_mode(self) -> "PlannerMode":
        """The mode whose global plan this mode executes."""
        return PlannerMode.LIDAR_CPP if self is PlannerMode.LIDAR_CPP_LIVE else self

    @property
    def uses_live(self) -> bool:
        return self is PlannerMode.LIDAR_CPP_LIVE

    @property
    def cli_name(self) -> str:
        return _CLI_NAMES[self]

    @classmethod
    def from_cli(cls, name: str) -> "PlannerMode":
        for mode, alias in _CLI_NAMES.items():
            if name in (alias, mode.value):
                return mode
        raise ValueError(f"unknown planner mode '{name}'")


_CLI_NAMES = {
    PlannerMode.LIDAR_CPP: "lidar",
    PlannerMode.VISUAL_CPP: "visual",
    PlannerMode.LIDAR_CPP_LIVE: "live",
}


class RobotSpec(BaseModel):
    """One robot of the team: start pose, motion limits and sensor footprints."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1, description="Robot identifier")
    start: Tuple[float, float, float] = Field(description="Start pose as (x, y, theta)")
    speed: float = Field(gt=0.0, description="Maximum linear speed in m/s")
    turn_rate: float = Field(gt=0.0, description="Maximum angular speed in rad/s")
    radius: float = Field(default=0.2, gt=0.0, description="Body radius in meters used for obstacle inflation")
    lidar_fp: RectangularFootprint = Field(
        default_factory=lambda: RectangularFootprint(length=6.0, width=6.0),
        description="Lidar costmap footprint",
    )
    camera_fp: TriangularFootprint = Field(
        default_factory=lambda: TriangularFootprint(range=3.5, half_angle=0.5),
        description="Camera view footprint",
    )

    @field_validator("start")
    @classmethod
    def validate_start(cls, v: Tuple[float, float, float]) -> Tuple[float, float, float]:
        if not all(math.isfinite(c) for c in v):
            raise ValueError("start pose must be finite")
        return v

    @property
    def start_pose(self) -> Pose2:
        return Pose2(*self.start)


class PlannerConfig(BaseModel):
    """Coverage planner tunables."""

    model_config = ConfigDict(frozen=True)

    target_coverage: float = Field(
        default=0.95,
        gt=0.0,
        le=1.0,
        description="Fraction of free cells the kept viewpoints must cover",
    )

    sample_budget: int = Field(
        default=5000,
        ge=1,
        description="Maximum number of candidate viewpoint positions",
    )

    sample_batch: int = Field(
        default=500,
        ge=1,
        description="Candidate positions drawn per sampling round",
    )

    resolution: float = Field(
        default=0.25,
        gt=0.0,
        description="Cell size in meters of the coverage grid",
    )

    viewpoint_clearance: float = Field(
        default=0.4,
        ge=0.0,
        description="Minimum distance from a candidate viewpoint to any map segment",
    )

    visual_headings: int = Field(
        default=8,
        ge=1,
        description="Headings tried per candidate position for camera coverage",
    )

    cluster_slack: float = Field(
        default=1.5,
        ge=1.0,
        description="Cluster capacity as a multiple of the even share n/k",
    )

    kmeans_iterations: int = Field(
        default=50,
        ge=1,
        description="Iteration cap for balanced k-means",
    )


def create_planner_config(**overrides) -> PlannerConfig:
    return PlannerConfig(**overrides)
