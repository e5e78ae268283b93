"""
Ground-truth world content the static map does not know about.
"""

import math
from enum import Enum
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..geometry import LineSegment, Point2, VectorMap, segments_intersect, square_outline


class Difficulty(str, Enum):
    EASY = "Easy"
    MEDIUM = "Medium"
    HARD = "Hard"


class WorldObject(BaseModel):
    """An axis-aligned square obstacle; targets are what the team searches for."""

    model_config = ConfigDict(frozen=True)

    id: str = Field(min_length=1, description="Object identifier")
    center: Tuple[float, float] = Field(description="Center (x, y) in meters")
    half_extent: float = Field(default=0.25, gt=0.0, description="Half side length in meters")
    difficulty: Difficulty = Field(default=Difficulty.MEDIUM, description="Placement difficulty label")
    is_target: bool = Field(default=True, description="Whether detecting it counts toward success")

    @field_validator("center")
    @classmethod
    def validate_center(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        if not all(math.isfinite(c) for c in v):
            raise ValueError("object center must be finite")
        return v

    @property
    def center_point(self) -> Point2:
        return Point2(*self.center)

    def outline(self) -> Tuple[LineSegment, ...]:
        return square_outline(self.center_point, self.half_extent)


def outline_arrays(objects: Sequence[WorldObject]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Endpoints of every object outline plus the owning object index per segment.

    Returns:
        ``(seg_a, seg_b, owner)`` with shapes ``(4n, 2)``, ``(4n, 2)``, ``(4n,)``.
    """
    coords = [s.as_tuple() for obj in objects for s in obj.outline()]
    coords = np.array(coords, dtype=float).reshape(-1, 4)
    owner = np.repeat(np.arange(len(objects)), 4)
    return coords[:, :2].copy(), coords[:, 2:].copy(), owner


def world_map(vector_map: VectorMap, objects: Iterable[WorldObject]) -> VectorMap:
    """The static map with every object outline appended."""
    return vector_map.with_segments(s for obj in objects for s in obj.outline())


def validate_objects(vector_map: VectorMap, objects: Sequence[WorldObject]) -> None:
    """
    Reject objects outside the bounds or touching a map segment.

    Raises:
        ValueError: Naming the first offending object.
    """
    bounds = vector_map.bounds
    for obj in objects:
        x, y = obj.center
        h = obj.half_extent
        if not (bounds.xmin < x - h and x + h < bounds.xmax and bounds.ymin < y - h and y + h < bounds.ymax):
            raise ValueError(f"object {obj.id} extends outside the map bounds")
        if vector_map.is_empty:
            continue
        seg_a, seg_b, _ = outline_arrays([obj])
        if segments_intersect(seg_a, seg_b, vector_map.seg_a, vector_map.seg_b).any():
            raise ValueError(f"object {obj.id} intersects a map segment")
        if vector_map.min_distance(obj.center_point) < h:
            raise ValueError(f"object {obj.id} encloses a map segment")


def target_ids(objects: Sequence[WorldObject]) -> List[str]:
    return [obj.id for obj in objects if obj.is_target]
