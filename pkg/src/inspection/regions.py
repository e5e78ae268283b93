"""
Inspection regions: pooled, filtered short term features worth a camera look.

Regions are transient. They are recomputed from the STF points of each
classified scan and never persisted across ticks.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..geometry import Point2, Pose2, VectorMap
from ..perception import ClassifiedScan, FeatureClass
from ..search_map import SearchMap, is_visually_observed

logger = logging.getLogger(__name__)


class InspectionConfig(BaseModel):
    """Radii of the STF filtering pipeline and the viewing standoff."""

    model_config = ConfigDict(frozen=True)

    pool_radius: float = Field(
        default=0.5,
        gt=0.0,
        description="Points within this radius of a cluster seed are pooled into one centroid",
    )

    ltf_margin: float = Field(
        default=0.3,
        gt=0.0,
        description="Pooled points closer than this to any map segment are dropped as drift artifacts",
    )

    standoff: float = Field(
        default=1.5,
        gt=0.0,
        description="Distance kept from a region center when viewing it",
    )


def create_inspection_config(**overrides) -> InspectionConfig:
    return InspectionConfig(**overrides)


@dataclass(frozen=True)
class InspectionRegion:
    """A candidate target location to inspect visually."""

    center: Point2
    created_at: float
    source_count: int = 1

    def __post_init__(self) -> None:
        if self.source_count < 1:
            raise ValueError("source_count must be at least 1")


def pool_stf_clusters(points, pool_radius: float) -> List[Tuple[Point2, int]]:
    """
    Greedy first-come pooling.

    Take the first unconsumed point, gather every unconsumed point within
    ``pool_radius`` of it, emit their centroid and size; repeat in input order.
    """
    if pool_radius <= 0:
        raise ValueError("pool_radius must be positive")
    array = _as_array(points)
    consumed = np.zeros(len(array), dtype=bool)
    clusters: List[Tuple[Point2, int]] = []
    for seed in range(len(array)):
        if consumed[seed]:
            continue
        distances = np.hypot(*(array - array[seed]).T)
        members = ~consumed & (distances <= pool_radius)
        consumed |= members
        centroid = array[members].mean(axis=0)
        clusters.append((Point2(float(centroid[0]), float(centroid[1])), int(members.sum())))
    return clusters


def pool_stfs(points, pool_radius: float) -> List[Point2]:
    """Centroids of :func:`pool_stf_clusters`, in first-member order."""
    return [center for center, _ in pool_stf_clusters(points, pool_radius)]


def _as_array(points) -> np.ndarray:
    if isinstance(points, np.ndarray):
        return points.astype(float).reshape(-1, 2)
    return np.array([[p.x, p.y] for p in points], dtype=float).reshape(-1, 2)


def filter_regions(
    pooled: Sequence[Point2],
    vector_map: VectorMap,
    sm: SearchMap,
    cfg: InspectionConfig,
    now: float,
    source_counts: Optional[Sequence[int]] = None,
) -> List[InspectionRegion]:
    """
    Drop pooled points near the static map or inside visually observed cells.

    Args:
        pooled: Pooled STF centroids.
        vector_map: Static map for the LTF-margin test.
        sm: Search map providing the visual mask.
        cfg: Filtering radii.
        now: Creation timestamp for the surviving regions.
        source_counts: Pool sizes parallel to ``pooled``; 1 each when omitted.

    Returns:
        Surviving regions in input order.
    """
    if not pooled:
        return []
    counts = list(source_counts) if source_counts is not None else [1] * len(pooled)
    clearance = vector_map.min_distances(_as_array(pooled))
    regions = []
    for point, count, distance in zip(pooled, counts, clearance):
        if distance < cfg.ltf_margin:
            continue
        if is_visually_observed(sm, point):
            continue
        regions.append(InspectionRegion(center=point, created_at=now, source_count=count))
    return regions


def select_nearest(regions: Sequence[InspectionRegion], pose: Pose2) -> Optional[InspectionRegion]:
    """Nearest region to the pose; ties go to the earlier ``created_at``, then the smaller ``(x, y)``."""
    if not regions:
        return None
    return min(
        regions,
        key=lambda r: (pose.distance_to(r.center), r.created_at, r.center.x, r.center.y),
    )


def region_to_priority_waypoint(region: InspectionRegion, pose: Pose2, standoff: float) -> Pose2:
    """
    Viewpoint on the pose-to-center line, ``standoff`` short of the center, facing it.

    A robot already within ``standoff`` keeps its position and only turns.
    """
    if standoff <= 0:
        raise ValueError("standoff must be positive")
    distance = pose.distance_to(region.center)
    heading = pose.bearing_to(region.center) if distance > 0 else pose.theta
    if distance <= standoff:
        return Pose2(pose.x, pose.y, heading)
    back = standoff / distance
    return Pose2(
        region.center.x + (pose.x - region.center.x) * back,
        region.center.y + (pose.y - region.center.y) * back,
        heading,
    )


def detect_inspection_regions(
    classified: ClassifiedScan,
    vector_map: VectorMap,
    sm: SearchMap,
    cfg: InspectionConfig,
    now: float,
) -> List[InspectionRegion]:
    """Pool and filter the STF points of one classified scan."""
    stf_points = classified.points_of(FeatureClass.STF)
    if len(stf_points) == 0:
        return []
    clusters = pool_stf_clusters(stf_points, cfg.pool_radius)
    regions = filter_regions(
        [center for center, _ in clusters],
        vector_map,
        sm,
        cfg,
        now,
        source_counts=[count for _, count in clusters],
    )
    logger.debug(f"{len(stf_points)} STF points -> {len(clusters)} pooled -> {len(regions)} regions")
    return regions
