"""
Simulated lidar and camera against the ground truth (map plus objects).
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..geometry import Pose2, VectorMap, cast_ranges, segments_intersect
from ..perception import LaserScan
from ..search_map import TriangularFootprint, points_in_convex_polygon
from .world import WorldObject, outline_arrays

logger = logging.getLogger(__name__)


class LidarConfig(BaseModel):
    """Simulated lidar parameters."""

    model_config = ConfigDict(frozen=True)

    n_beams: int = Field(default=360, ge=8, description="Evenly spaced beams per sweep")
    max_range: float = Field(default=10.0, gt=0.0, description="Maximum range in meters")
    range_noise_std: float = Field(default=0.01, ge=0.0, description="Gaussian range noise std in meters")


class CameraConfig(BaseModel):
    """Camera footprint defaults used when building a team."""

    model_config = ConfigDict(frozen=True)

    range: float = Field(default=3.5, gt=0.0, description="View distance in meters")
    half_angle: float = Field(default=0.5, gt=0.0, lt=math.pi / 2, description="Half field of view in radians")

    def footprint(self) -> TriangularFootprint:
        return TriangularFootprint(range=self.range, half_angle=self.half_angle)


@dataclass(frozen=True)
class LidarSweep:
    """A sweep plus which returned points came from an object outline."""

    scan: Optional[LaserScan]
    hit_object: np.ndarray
    ranges: np.ndarray


def lidar_bearings(n_beams: int) -> np.ndarray:
    return 2.0 * math.pi * np.arange(n_beams) / n_beams


def lidar_sweep(
    vector_map: VectorMap,
    objects: Sequence[WorldObject],
    true_pose: Pose2,
    believed_pose: Pose2,
    n_beams: int,
    max_range: float,
    range_noise_std: float,
    rng: np.random.Generator,
    timestamp: float = 0.0,
) -> LidarSweep:
    """
    Cast ``n_beams`` rays from the true pose against map and object outlines.

    One Gaussian draw is made per beam whenever ``range_noise_std > 0``.
    Misses and noisy ranges outside ``(0, max_range]`` are dropped.
    """
    if n_beams < 8:
        raise ValueError("n_beams must be at least 8")
    bearings = lidar_bearings(n_beams)
    angles = true_pose.theta + bearings
    origin = true_pose.as_array()
    map_ranges = cast_ranges(origin, angles, vector_map.seg_a, vector_map.seg_b, max_range)
    if objects:
        obj_a, obj_b, _ = outline_arrays(objects)
        obj_ranges = cast_ranges(origin, angles, obj_a, obj_b, max_range)
    else:
        obj_ranges = np.full(n_beams, np.inf)
    ranges = np.minimum(map_ranges, obj_ranges)
    from_object = obj_ranges < map_ranges

    if range_noise_std > 0:
        ranges = ranges + rng.normal(0.0, range_noise_std, size=n_beams)
    keep = np.isfinite(ranges) & (ranges > 0.0) & (ranges <= max_range)
    ranges, bearings, from_object = ranges[keep], bearings[keep], from_object[keep]

    if len(ranges) == 0:
        return LidarSweep(scan=None, hit_object=from_object, ranges=ranges)
    points = np.column_stack([ranges * np.cos(bearings), ranges * np.sin(bearings)])
    scan = LaserScan(pose_estimate=believed_pose, timestamp=timestamp, points=points)
    return LidarSweep(scan=scan, hit_object=from_object, ranges=ranges)


def simulate_lidar(
    vector_map: VectorMap,
    objects: Sequence[WorldObject],
    true_pose: Pose2,
    believed_pose: Pose2,
    n_beams: int,
    max_range: float,
    range_noise_std: float,
    rng: np.random.Generator,
    timestamp: float = 0.0,
) -> Optional[LaserScan]:
    """Robot-frame scan tagged with the believed pose; None when every beam misses."""
    return lidar_sweep(vector_map, objects, true_pose, believed_pose, n_beams,
                       max_range, range_noise_std, rng, timestamp).scan


def camera_candidates(
    vector_map: VectorMap,
    objects: Sequence[WorldObject],
    true_pose: Pose2,
    camera_fp: TriangularFootprint,
) -> List[str]:
    """Objects whose center is in view with nothing in between, in object order."""
    if not objects:
        return []
    centers = np.array([obj.center for obj in objects], dtype=float)
    inside = points_in_convex_polygon(centers, camera_fp.polygon(true_pose))
    if not inside.any():
        return []
    origin = true_pose.as_array()
    blocked_by_map = segments_intersect(origin, centers, vector_map.seg_a, vector_map.seg_b)
    obj_a, obj_b, owner = outline_arrays(objects)
    found = []
    for index in np.flatnonzero(inside & ~blocked_by_map):
        others = owner != index
        if others.any() and segments_intersect(origin, centers[index], obj_a[others], obj_b[others])[0]:
            continue
        found.append(objects[index].id)
    return found


def camera_detect(
    vector_map: VectorMap,
    objects: Sequence[WorldObject],
    true_pose: Pose2,
    camera_fp: TriangularFootprint,
    detect_prob: float,
    rng: np.random.Generator,
    candidates: Optional[List[str]] = None,
) -> List[str]:
    """
    Report each camera candidate independently with probability ``detect_prob``.

    One uniform draw is made per candidate, in object order.
    """
    if not 0.0 < detect_prob <= 1.0:
        raise ValueError("detect_prob must be in (0, 1]")
    if candidates is None:
        candidates = camera_candidates(vector_map, objects, true_pose, camera_fp)
    if not candidates:
        return []
    draws = rng.random(len(candidates))
    return [obj_id for obj_id, u in zip(candidates, draws) if u < detect_prob]
