"""Shared fixtures: a small two-robot room that plans and simulates in seconds."""

import math

import pytest

from src.geometry import Bounds, LineSegment, VectorMap, save_vector_map
from src.planner import PlannerMode, RobotSpec, create_planner_config
from src.search_map import RectangularFootprint
from src.simulator import LidarConfig, Scenario, WorldObject, save_scenario


def build_small_room() -> VectorMap:
    return VectorMap(
        (
            LineSegment.from_coords(0.0, 0.0, 8.0, 0.0),
            LineSegment.from_coords(8.0, 0.0, 8.0, 8.0),
            LineSegment.from_coords(8.0, 8.0, 0.0, 8.0),
            LineSegment.from_coords(0.0, 8.0, 0.0, 0.0),
            LineSegment.from_coords(4.0, 0.0, 4.0, 3.0),
        ),
        Bounds(0.0, 0.0, 8.0, 8.0),
    )


def build_small_scenario(map_path, mode: PlannerMode = PlannerMode.LIDAR_CPP_LIVE, seed: int = 0) -> Scenario:
    lidar = RectangularFootprint(length=4.0, width=4.0)
    return Scenario(
        name="small-room",
        map_path=str(map_path),
        robots=[
            RobotSpec(name="a1", start=(1.0, 1.0, 0.0), speed=0.6, turn_rate=1.2, lidar_fp=lidar),
            RobotSpec(name="hsr", start=(7.0, 7.0, math.pi), speed=0.4, turn_rate=0.8, lidar_fp=lidar),
        ],
        objects=[
            WorldObject(id="T1", center=(2.0, 6.0), difficulty="Easy"),
            WorldObject(id="T2", center=(6.0, 2.0), difficulty="Medium"),
        ],
        mode=mode,
        seed=seed,
        max_ticks=80,
        lidar=LidarConfig(n_beams=72),
        planner=create_planner_config(resolution=0.5),
    )


@pytest.fixture
def small_map_path(tmp_path):
    path = tmp_path / "room.vmap"
    save_vector_map(build_small_room(), path)
    return path


@pytest.fixture
def small_scenario(small_map_path) -> Scenario:
    return build_small_scenario(small_map_path)


@pytest.fixture
def small_scenario_file(tmp_path, small_scenario):
    return save_scenario(small_scenario.model_copy(update={"map_path": "room.vmap"}), tmp_path / "room.json")
