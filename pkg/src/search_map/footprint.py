"""
Sensor footprints: the lidar costmap rectangle and the camera view triangle.
"""

import math
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..geometry import Pose2, rotation_matrix

_INSIDE_EPS = 1e-9


class RectangularFootprint(BaseModel):
    """Lidar costmap: a ``length`` x ``width`` rectangle centered on the pose, long side along the heading."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["rectangular"] = "rectangular"
    length: float = Field(gt=0.0, description="Extent along the heading in meters")
    width: float = Field(gt=0.0, description="Extent across the heading in meters")

    @property
    def is_visual(self) -> bool:
        return False

    @property
    def reach(self) -> float:
        """Radius of the smallest pose-centered disc containing the footprint."""
        return 0.5 * math.hypot(self.length, self.width)

    def polygon(self, pose: Pose2) -> np.ndarray:
        hl, hw = 0.5 * self.length, 0.5 * self.width
        local = np.array([[-hl, -hw], [hl, -hw], [hl, hw], [-hl, hw]])
        return local @ rotation_matrix(pose.theta).T + pose.as_array()


class TriangularFootprint(BaseModel):
    """
    Camera view: apex at the pose, axis along the heading.

    The two far corners sit ``range`` meters from the apex on the rays at
    ``heading +/- half_angle``.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["triangular"] = "triangular"
    range: float = Field(gt=0.0, description="Edge length from the apex in meters")
    half_angle: float = Field(gt=0.0, lt=math.pi / 2, description="Half field of view in radians")

    @field_validator("half_angle")
    @classmethod
    def validate_half_angle(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("half_angle must be finite")
        return v

    @property
    def is_visual(self) -> bool:
        return True

    @property
    def reach(self) -> float:
        return self.range

    def polygon(self, pose: Pose2) -> np.ndarray:
        left = pose.theta + self.half_angle
        right = pose.theta - self.half_angle
        return np.array([
            [pose.x, pose.y],
            [pose.x + self.range * math.cos(right), pose.y + self.range * math.sin(right)],
            [pose.x + self.range * math.cos(left), pose.y + self.range * math.sin(left)],
        ])


SensorFootprint = Annotated[Union[RectangularFootprint, TriangularFootprint], Field(discriminator="kind")]


def points_in_convex_polygon(points: np.ndarray, polygon: np.ndarray) -> np.ndarray:
    """
    Inclusive containment test for a counter-clockwise convex polygon.

    Args:
        points: ``(n, 2)`` query points.
        polygon: ``(k, 2)`` vertices in counter-clockwise order.

    Returns:
        ``(n,)`` boolean mask.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    start = polygon
    edge = np.roll(polygon, -1, axis=0) - polygon
    rel = points[:, None, :] - start[None, :, :]
    cross = edge[None, :, 0] * rel[..., 1] - edge[None, :, 1] * rel[..., 0]
    return np.all(cross >= -_INSIDE_EPS, axis=1)


def footprint_contains(fp: "RectangularFootprint | TriangularFootprint", pose: Pose2, points: np.ndarray) -> np.ndarray:
    return points_in_convex_polygon(points, fp.polygon(pose))
