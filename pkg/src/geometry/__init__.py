"""
Planar geometry substrate: poses, vector maps, analytic ray casting.
"""

from .primitives import (
    Point2,
    Pose2,
    LineSegment,
    normalize_angle,
    normalize_angles,
    rotation_matrix,
    transform_to_global,
    transform_many_to_global,
    transform_many_to_local,
    dist_point_segment,
    point_segment_distances,
    square_outline,
    path_positions,
)
from .vector_map import (
    Bounds,
    VectorMap,
    MapFormatError,
    parse_vector_map,
    load_vector_map,
    dump_vector_map,
    save_vector_map,
)
from .raycast import (
    cast_ranges,
    ray_cast,
    expected_scan,
    segments_intersect,
    has_line_of_sight,
    segment_clearance,
)

__all__ = [
    "Point2",
    "Pose2",
    "LineSegment",
    "normalize_angle",
    "normalize_angles",
    "rotation_matrix",
    "transform_to_global",
    "transform_many_to_global",
    "transform_many_to_local",
    "dist_point_segment",
    "point_segment_distances",
    "square_outline",
    "path_positions",
    "Bounds",
    "VectorMap",
    "MapFormatError",
    "parse_vector_map",
    "load_vector_map",
    "dump_vector_map",
    "save_vector_map",
    "cast_ranges",
    "ray_cast",
    "expected_scan",
    "segments_intersect",
    "has_line_of_sight",
    "segment_clearance",
]
