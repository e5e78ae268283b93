"""
Planar primitives: points, poses, line segments and rigid transforms.

Scalar helpers operate on the dataclasses; the ``*_many`` helpers operate on
``(n, 2)`` numpy arrays and are what the scan and grid code calls in hot loops.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

TWO_PI = 2.0 * math.pi


def normalize_angle(theta: float) -> float:
    """Wrap an angle to the half-open interval (-pi, pi]."""
    wrapped = math.remainder(theta, TWO_PI)
    if wrapped <= -math.pi:
        wrapped += TWO_PI
    return wrapped


def normalize_angles(theta: np.ndarray) -> np.ndarray:
    """Vectorized :func:`normalize_angle`."""
    wrapped = np.mod(np.asarray(theta, dtype=float) + math.pi, TWO_PI) - math.pi
    return np.where(wrapped <= -math.pi, wrapped + TWO_PI, wrapped)


@dataclass(frozen=True)
class Point2:
    """A point in meters."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"Point2 coordinates must be finite, got ({self.x}, {self.y})")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def distance_to(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_tuple(self) -> Tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Pose2:
    """A planar pose; ``theta`` is kept in (-pi, pi]."""

    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.x, self.y, self.theta)):
            raise ValueError(f"Pose2 components must be finite, got ({self.x}, {self.y}, {self.theta})")
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    @property
    def position(self) -> Point2:
        return Point2(self.x, self.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def distance_to(self, other: "Pose2 | Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def bearing_to(self, target: "Pose2 | Point2") -> float:
        """Absolute heading of the direction from this pose toward ``target``."""
        return math.atan2(target.y - self.y, target.x - self.x)

    def heading_error(self, heading: float) -> float:
        """Signed rotation that turns this pose onto ``heading``."""
        return normalize_angle(heading - self.theta)

    def with_theta(self, theta: float) -> "Pose2":
        return Pose2(self.x, self.y, theta)

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.x, self.y, self.theta)


@dataclass(frozen=True)
class LineSegment:
    """A closed, non-degenerate segment from ``a`` to ``b``."""

    a: Point2
    b: Point2

    def __post_init__(self) -> None:
        if self.length <= 0.0:
            raise ValueError(f"Degenerate segment at ({self.a.x}, {self.a.y})")

    @property
    def length(self) -> float:
        return self.a.distance_to(self.b)

    @classmethod
    def from_coords(cls, x1: float, y1: float, x2: float, y2: float) -> "LineSegment":
        return cls(Point2(x1, y1), Point2(x2, y2))

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.a.x, self.a.y, self.b.x, self.b.y)


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def transform_to_global(pose: Pose2, p: Point2) -> Point2:
    """Map a robot-frame point into the global frame: ``R(theta) p + (x, y)``."""
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    return Point2(c * p.x - s * p.y + pose.x, s * p.x + c * p.y + pose.y)


def transform_many_to_global(pose: Pose2, points: np.ndarray) -> np.ndarray:
    """Vectorized :func:`transform_to_global` for an ``(n, 2)`` array."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    return points @ rotation_matrix(pose.theta).T + pose.as_array()


def transform_many_to_local(pose: Pose2, points: np.ndarray) -> np.ndarray:
    """Inverse of :func:`transform_many_to_global`."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    return (points - pose.as_array()) @ rotation_matrix(pose.theta)


def dist_point_segment(p: Point2, s: LineSegment) -> float:
    """Euclidean distance from ``p`` to the closest point of the closed segment ``s``."""
    ex, ey = s.b.x - s.a.x, s.b.y - s.a.y
    t = ((p.x - s.a.x) * ex + (p.y - s.a.y) * ey) / (ex * ex + ey * ey)
    t = min(1.0, max(0.0, t))
    return math.hypot(p.x - (s.a.x + t * ex), p.y - (s.a.y + t * ey))


def point_segment_distances(points: np.ndarray, seg_a: np.ndarray, seg_b: np.ndarray) -> np.ndarray:
    """
    Distances between every point and every segment.

    Args:
        points: ``(n, 2)`` query points.
        seg_a: ``(m, 2)`` segment start points.
        seg_b: ``(m, 2)`` segment end points.

    Returns:
        ``(n, m)`` array of point-to-segment distances.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    edge = seg_b - seg_a
    length_sq = np.einsum("ij,ij->i", edge, edge)
    rel = points[:, None, :] - seg_a[None, :, :]
    t = np.clip(np.einsum("nmk,mk->nm", rel, edge) / length_sq[None, :], 0.0, 1.0)
    closest = seg_a[None, :, :] + t[..., None] * edge[None, :, :]
    return np.linalg.norm(points[:, None, :] - closest, axis=2)


def square_outline(center: Point2, half_extent: float) -> Tuple[LineSegment, ...]:
    """The four sides of an axis-aligned square, counter-clockwise."""
    x0, x1 = center.x - half_extent, center.x + half_extent
    y0, y1 = center.y - half_extent, center.y + half_extent
    return (
        LineSegment.from_coords(x0, y0, x1, y0),
        LineSegment.from_coords(x1, y0, x1, y1),
        LineSegment.from_coords(x1, y1, x0, y1),
        LineSegment.from_coords(x0, y1, x0, y0),
    )


def path_positions(poses) -> np.ndarray:
    """Stack the positions of a pose sequence into an ``(n, 2)`` array."""
    return np.array([[p.x, p.y] for p in poses], dtype=float).reshape(-1, 2)
