"""
Scenario files: one trial's world, team, planner setting and simulation knobs (JSON).
"""

import logging
from pathlib import Path
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..geometry import VectorMap, load_vector_map
from ..inspection import InspectionConfig
from ..perception import PerceptionConfig
from ..planner import PlannerConfig, PlannerMode, RobotSpec
from ..waypoint_manager import WaypointConfig
from .drift import DriftConfig
from .sensors import LidarConfig
from .world import WorldObject, validate_objects

logger = logging.getLogger(__name__)


class Scenario(BaseModel):
    """Everything needed to run one deterministic trial."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(default="scenario", description="Label used in logs and result rows")
    map_path: str = Field(description="Vector map file; relative paths resolve against the scenario file")
    robots: List[RobotSpec] = Field(min_length=1, description="Team in index order")
    objects: List[WorldObject] = Field(min_length=1, description="Unmapped objects, targets included")
    mode: PlannerMode = Field(default=PlannerMode.LIDAR_CPP_LIVE, description="Planner setting")
    seed: int = Field(default=0, ge=0, description="Root seed for planning and all robot streams")
    tick_dt: float = Field(default=0.5, gt=0.0, description="Simulation tick in seconds")
    drift: Optional[DriftConfig] = Field(
        default_factory=DriftConfig,
        description="Random-walk localization drift; null disables it",
    )
    detect_prob: float = Field(default=0.8, gt=0.0, le=1.0, description="Per-tick detection probability")
    max_ticks: int = Field(default=1200, ge=1, description="Hard tick limit")
    lidar: LidarConfig = Field(default_factory=LidarConfig)
    perception: PerceptionConfig = Field(default_factory=PerceptionConfig)
    inspection: InspectionConfig = Field(default_factory=InspectionConfig)
    waypoints: WaypointConfig = Field(default_factory=WaypointConfig)
    planner: PlannerConfig = Field(default_factory=PlannerConfig)

    @model_validator(mode="after")
    def validate_team_and_objects(self) -> "Scenario":
        names = [r.name for r in self.robots]
        if len(set(names)) != len(names):
            raise ValueError("robot names must be unique")
        ids = [o.id for o in self.objects]
        if len(set(ids)) != len(ids):
            raise ValueError("object ids must be unique")
        if not any(o.is_target for o in self.objects):
            raise ValueError("at least one object must be a target")
        return self

    def robot_index(self, name: str) -> int:
        for index, robot in enumerate(self.robots):
            if robot.name == name:
                return index
        raise KeyError(f"no robot named '{name}' in scenario {self.name}")

    def with_run(self, mode: Optional[PlannerMode] = None, seed: Optional[int] = None) -> "Scenario":
        """Copy with a different planner setting and/or seed."""
        update = {}
        if mode is not None:
            update["mode"] = mode
        if seed is not None:
            update["seed"] = seed
        return self.model_copy(update=update)

    def load_map(self) -> VectorMap:
        vector_map = load_vector_map(self.map_path)
        validate_objects(vector_map, self.objects)
        return vector_map


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Parse a scenario file and resolve its map path."""
    path = Path(path)
    scenario = Scenario.model_validate_json(path.read_text(encoding="utf-8"))
    map_path = Path(scenario.map_path)
    if not map_path.is_absolute():
        map_path = (path.parent / map_path).resolve()
    logger.debug(f"Loaded scenario {scenario.name} from {path}")
    return scenario.model_copy(update={"map_path": str(map_path)})


def save_scenario(scenario: Scenario, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(scenario.model_dump_json(indent=2), encoding="utf-8")
    return path
