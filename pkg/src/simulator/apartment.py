"""
The 20 m x 30 m reference apartment and seeded variants of it.

Floor plan: three rooms on the left (x 0-8) stacked at y = 10 and y = 20,
a corridor (x 8-11), and two rooms on the right (x 11-20) split at y = 15.
Every room opens onto the corridor through a 1.2 m doorway.
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from ..geometry import Bounds, LineSegment, VectorMap, save_vector_map
from ..planner import PlannerMode, RobotSpec
from ..search_map import RectangularFootprint
from .scenario import Scenario
from .sensors import CameraConfig
from .world import Difficulty, WorldObject

WIDTH = 20.0
HEIGHT = 30.0
DOOR = 1.2

Rect = Tuple[float, float, float, float]

APARTMENT_WALLS: Tuple[Tuple[float, float, float, float], ...] = (
    (0.0, 0.0, 20.0, 0.0),
    (20.0, 0.0, 20.0, 30.0),
    (20.0, 30.0, 0.0, 30.0),
    (0.0, 30.0, 0.0, 0.0),
    (8.0, 0.0, 8.0, 4.4),
    (8.0, 5.6, 8.0, 14.4),
    (8.0, 15.6, 8.0, 24.4),
    (8.0, 25.6, 8.0, 30.0),
    (0.0, 10.0, 8.0, 10.0),
    (0.0, 20.0, 8.0, 20.0),
    (11.0, 0.0, 11.0, 6.9),
    (11.0, 8.1, 11.0, 21.9),
    (11.0, 23.1, 11.0, 30.0),
    (11.0, 15.0, 20.0, 15.0),
)

APARTMENT_FURNITURE: Tuple[Rect, ...] = (
    (2.0, 6.5, 3.0, 7.3),
    (4.0, 16.5, 5.5, 17.3),
    (2.5, 22.0, 3.3, 23.0),
    (15.0, 4.0, 16.6, 4.8),
    (16.0, 24.0, 17.0, 25.2),
)

OBJECT_SITES: Tuple[Tuple[str, float, float, Difficulty], ...] = (
    ("E1", 9.5, 12.0, Difficulty.EASY),
    ("E2", 15.5, 7.5, Difficulty.EASY),
    ("M1", 2.0, 12.0, Difficulty.MEDIUM),
    ("M2", 13.0, 28.0, Difficulty.MEDIUM),
    ("M3", 6.5, 1.5, Difficulty.MEDIUM),
    ("H1", 1.2, 22.5, Difficulty.HARD),
    ("H2", 18.7, 1.3, Difficulty.HARD),
)

LAYOUTS: Tuple[Tuple[str, str], ...] = (
    ("E1", "M1"),
    ("E2", "H1"),
    ("M2", "H2"),
    ("E1", "M3"),
    ("M3", "H1"),
)

INITIAL_CONDITIONS: Tuple[Tuple[Tuple[float, float, float], Tuple[float, float, float]], ...] = (
    ((9.5, 2.0, math.pi / 2), (9.5, 28.0, -math.pi / 2)),
    ((4.0, 5.0, 0.0), (15.5, 22.0, math.pi)),
    ((9.0, 15.0, -math.pi / 2), (10.0, 15.0, math.pi / 2)),
)


@dataclass(frozen=True)
class ApartmentLayout:
    """Map, object sites, initial conditions and object layouts of an apartment."""

    vector_map: VectorMap
    sites: Dict[str, WorldObject]
    initial_conditions: Tuple[Tuple[Tuple[float, float, float], ...], ...]
    layouts: Tuple[Tuple[str, ...], ...]

    def objects_for(self, layout: int) -> List[WorldObject]:
        return [self.sites[name] for name in self.layouts[layout]]


def rect_segments(rect: Rect) -> List[LineSegment]:
    x0, y0, x1, y1 = rect
    return [
        LineSegment.from_coords(x0, y0, x1, y0),
        LineSegment.from_coords(x1, y0, x1, y1),
        LineSegment.from_coords(x1, y1, x0, y1),
        LineSegment.from_coords(x0, y1, x0, y0),
    ]


def _assemble(walls: Sequence[Tuple[float, float, float, float]], furniture: Sequence[Rect]) -> VectorMap:
    segments = [LineSegment.from_coords(*w) for w in walls]
    for rect in furniture:
        segments.extend(rect_segments(rect))
    return VectorMap(tuple(segments), Bounds(0.0, 0.0, WIDTH, HEIGHT))


def build_reference_apartment() -> ApartmentLayout:
    sites = {
        name: WorldObject(id=name, center=(x, y), difficulty=difficulty)
        for name, x, y, difficulty in OBJECT_SITES
    }
    return ApartmentLayout(
        vector_map=_assemble(APARTMENT_WALLS, APARTMENT_FURNITURE),
        sites=sites,
        initial_conditions=INITIAL_CONDITIONS,
        layouts=LAYOUTS,
    )


def _wall_with_door(x0: float, y0: float, x1: float, y1: float, door_at: float) -> List[Tuple[float, float, float, float]]:
    """Split an axis-aligned wall around a doorway centered ``door_at`` along it."""
    if x0 == x1:
        return [(x0, y0, x0, door_at - DOOR / 2), (x0, door_at + DOOR / 2, x1, y1)]
    return [(x0, y0, door_at - DOOR / 2, y0), (door_at + DOOR / 2, y0, x1, y1)]


def generate_apartment(seed: int) -> VectorMap:
    """
    A seeded 20 m x 30 m variant of the reference floor plan.

    Room splits, corridor position, doorway positions and one piece of
    furniture per room are drawn from ``seed``.
    """
    rng = np.random.default_rng(seed)
    left = float(rng.uniform(7.0, 8.5))
    right = left + 3.0
    split_a = float(rng.uniform(8.5, 11.5))
    split_b = float(rng.uniform(18.5, 21.5))
    split_r = float(rng.uniform(13.0, 17.0))

    walls: List[Tuple[float, float, float, float]] = [
        (0.0, 0.0, WIDTH, 0.0),
        (WIDTH, 0.0, WIDTH, HEIGHT),
        (WIDTH, HEIGHT, 0.0, HEIGHT),
        (0.0, HEIGHT, 0.0, 0.0),
        (0.0, split_a, left, split_a),
        (0.0, split_b, left, split_b),
        (right, split_r, WIDTH, split_r),
    ]
    left_rooms = [(0.0, split_a), (split_a, split_b), (split_b, HEIGHT)]
    right_rooms = [(0.0, split_r), (split_r, HEIGHT)]

    def door_walls(x: float, rooms: Sequence[Tuple[float, float]]) -> None:
        doors = [float(rng.uniform(lo + 1.5, hi - 1.5)) for lo, hi in rooms]
        edges = [0.0]
        for door in doors:
            edges.extend([door - DOOR / 2, door + DOOR / 2])
        edges.append(HEIGHT)
        for lo, hi in zip(edges[0::2], edges[1::2]):
            walls.append((x, lo, x, hi))

    door_walls(left, left_rooms)
    door_walls(right, right_rooms)

    furniture: List[Rect] = []
    for (x_lo, x_hi), rooms in (((0.0, left), left_rooms), ((right, WIDTH), right_rooms)):
        for y_lo, y_hi in rooms:
            w = float(rng.uniform(0.6, 1.6))
            h = float(rng.uniform(0.6, 0.9))
            x0 = float(rng.uniform(x_lo + 1.0, x_hi - 1.5 - w))
            y0 = float(rng.uniform(y_lo + 1.0, y_hi - 1.0 - h))
            furniture.append((x0, y0, x0 + w, y0 + h))
    return _assemble(walls, furniture)


def default_team(starts: Sequence[Tuple[float, float, float]]) -> List[RobotSpec]:
    """
    The two-robot team: a fast quadruped ``a1`` and a slower ``hsr``.

    Both carry a 6 m x 6 m lidar costmap and the default camera.
    """
    camera = CameraConfig().footprint()
    lidar = RectangularFootprint(length=6.0, width=6.0)
    limits = (("a1", 0.6, 1.2), ("hsr", 0.4, 0.8))
    return [
        RobotSpec(name=name, start=tuple(start), speed=speed, turn_rate=turn, lidar_fp=lidar, camera_fp=camera)
        for (name, speed, turn), start in zip(limits, starts)
    ]


def reference_scenario(
    ic: int,
    layout: int,
    mode: PlannerMode = PlannerMode.LIDAR_CPP_LIVE,
    seed: int = 0,
    map_path: Union[str, Path] = "data/maps/apartment.vmap",
    apartment: ApartmentLayout = None,
) -> Scenario:
    """Scenario for one (IC, layout) cell of the reference apartment."""
    apartment = apartment or build_reference_apartment()
    return Scenario(
        name=f"apartment-ic{ic}-layout{layout}",
        map_path=str(map_path),
        robots=default_team(apartment.initial_conditions[ic]),
        objects=apartment.objects_for(layout),
        mode=mode,
        seed=seed,
    )


def write_reference_map(path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_vector_map(build_reference_apartment().vector_map, path)
    return path
