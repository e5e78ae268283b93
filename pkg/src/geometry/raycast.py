"""
Analytic ray casting and segment intersection against vector maps.

Rays are intersected with segments in closed form using the parametric
cross-product formulation; nothing here marches along the ray.
"""

import math
from typing import List, Optional, Sequence

import numpy as np

from .primitives import Point2, Pose2, point_segment_distances
from .vector_map import VectorMap

_PARALLEL_EPS = 1e-12


def _cross(ax: np.ndarray, ay: np.ndarray, bx: np.ndarray, by: np.ndarray) -> np.ndarray:
    return ax * by - ay * bx


def cast_ranges(
    origin: np.ndarray,
    angles: np.ndarray,
    seg_a: np.ndarray,
    seg_b: np.ndarray,
    max_range: float,
) -> np.ndarray:
    """
    Cast rays from one origin against a segment set.

    Args:
        origin: ``(2,)`` ray origin in the global frame.
        angles: ``(k,)`` absolute ray headings in radians.
        seg_a: ``(m, 2)`` segment start points.
        seg_b: ``(m, 2)`` segment end points.
        max_range: Hits farther than this are misses.

    Returns:
        ``(k,)`` ranges, ``inf`` where a ray misses.
    """
    angles = np.asarray(angles, dtype=float).reshape(-1)
    if len(seg_a) == 0 or len(angles) == 0:
        return np.full(len(angles), np.inf)

    dx = np.cos(angles)[:, None]
    dy = np.sin(angles)[:, None]
    ex = (seg_b[:, 0] - seg_a[:, 0])[None, :]
    ey = (seg_b[:, 1] - seg_a[:, 1])[None, :]
    wx = (seg_a[:, 0] - origin[0])[None, :]
    wy = (seg_a[:, 1] - origin[1])[None, :]

    denom = _cross(dx, dy, ex, ey)
    seg_len = np.hypot(ex, ey)
    parallel = np.abs(denom) <= _PARALLEL_EPS * seg_len

    with np.errstate(divide="ignore", invalid="ignore"):
        t = _cross(wx, wy, ex, ey) / denom
        u = _cross(wx, wy, dx, dy) / denom
    hit = ~parallel & (t >= 0.0) & (u >= 0.0) & (u <= 1.0)
    ranges = np.where(hit, t, np.inf)

    # Collinear rays: nearest endpoint in front of the origin, if the ray reaches the span.
    collinear = parallel & (np.abs(_cross(wx, wy, dx, dy)) <= _PARALLEL_EPS * np.maximum(seg_len, 1.0))
    if np.any(collinear):
        ta = wx * dx + wy * dy
        tb = (wx + ex) * dx + (wy + ey) * dy
        near = np.maximum(np.minimum(ta, tb), 0.0)
        reaches = np.maximum(ta, tb) >= 0.0
        ranges = np.where(collinear & reaches, np.minimum(ranges, near), ranges)

    best = ranges.min(axis=1)
    best[best > max_range] = np.inf
    return best


def ray_cast(pose: Pose2, bearing: float, max_range: float, vector_map: VectorMap) -> Optional[float]:
    """
    Distance along the ray at ``bearing`` (relative to the pose heading) to the first map segment.

    Returns ``None`` if nothing is hit within ``max_range``.
    """
    if max_range <= 0:
        raise ValueError("max_range must be positive")
    result = cast_ranges(pose.as_array(), np.array([pose.theta + bearing]), vector_map.seg_a, vector_map.seg_b, max_range)
    value = float(result[0])
    return value if math.isfinite(value) else None


def expected_scan(
    pose: Pose2,
    bearings: Sequence[float],
    vector_map: VectorMap,
    max_range: float,
) -> List[Optional[float]]:
    """Elementwise :func:`ray_cast` over a list of bearings."""
    if len(bearings) == 0:
        raise ValueError("bearings must be non-empty")
    if max_range <= 0:
        raise ValueError("max_range must be positive")
    angles = pose.theta + np.asarray(bearings, dtype=float)
    ranges = cast_ranges(pose.as_array(), angles, vector_map.seg_a, vector_map.seg_b, max_range)
    return [float(r) if math.isfinite(r) else None for r in ranges]


def segments_intersect(
    p: np.ndarray,
    q: np.ndarray,
    seg_a: np.ndarray,
    seg_b: np.ndarray,
) -> np.ndarray:
    """
    Closed intersection test between query segments ``p[i]-q[i]`` and every map segment.

    ``p`` and ``q`` broadcast against each other, so a single origin with many
    targets is a ``(2,)`` and an ``(n, 2)`` array.

    Returns:
        ``(n,)`` boolean array, True where the query segment touches any map segment.
    """
    p = np.atleast_2d(np.asarray(p, dtype=float))
    q = np.atleast_2d(np.asarray(q, dtype=float))
    p, q = np.broadcast_arrays(p, q)
    if len(seg_a) == 0:
        return np.zeros(len(p), dtype=bool)

    px, py = p[:, 0:1], p[:, 1:2]
    rx, ry = q[:, 0:1] - px, q[:, 1:2] - py
    ax, ay = seg_a[None, :, 0], seg_a[None, :, 1]
    sx, sy = seg_b[None, :, 0] - ax, seg_b[None, :, 1] - ay

    # Orientation of each endpoint relative to the other segment.
    o1 = _cross(rx, ry, ax - px, ay - py)
    o2 = _cross(rx, ry, ax + sx - px, ay + sy - py)
    o3 = _cross(sx, sy, px - ax, py - ay)
    o4 = _cross(sx, sy, px + rx - ax, py + ry - ay)
    proper = (o1 * o2 <= 0.0) & (o3 * o4 <= 0.0)

    # All four orientations zero means collinear; require overlapping projections.
    collinear = (o1 == 0.0) & (o2 == 0.0) & (o3 == 0.0) & (o4 == 0.0)
    if np.any(collinear):
        overlap_x = (np.minimum(px, px + rx) <= np.maximum(ax, ax + sx)) & (np.minimum(ax, ax + sx) <= np.maximum(px, px + rx))
        overlap_y = (np.minimum(py, py + ry) <= np.maximum(ay, ay + sy)) & (np.minimum(ay, ay + sy) <= np.maximum(py, py + ry))
        proper = np.where(collinear, overlap_x & overlap_y, proper)
    return proper.any(axis=1)


def has_line_of_sight(origin: Point2, target: Point2, vector_map: VectorMap) -> bool:
    """True when the segment ``origin``-``target`` touches no map segment."""
    return not bool(segments_intersect(origin.as_array(), target.as_array(), vector_map.seg_a, vector_map.seg_b)[0])


def segment_clearance(p: np.ndarray, q: np.ndarray, seg_a: np.ndarray, seg_b: np.ndarray) -> float:
    """Minimum distance between the motion segment ``p``-``q`` and any map segment."""
    if len(seg_a) == 0:
        return math.inf
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if segments_intersect(p, q, seg_a, seg_b)[0]:
        return 0.0
    candidates = [point_segment_distances(p, seg_a, seg_b).min(), point_segment_distances(q, seg_a, seg_b).min()]
    if np.any(p != q):
        motion_a, motion_b = p[None, :], q[None, :]
        candidates.append(point_segment_distances(seg_a, motion_a, motion_b).min())
        candidates.append(point_segment_distances(seg_b, motion_a, motion_b).min())
    return float(min(candidates))
