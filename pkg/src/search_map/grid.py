"""
Search map: per-cell occupancy belief, entropy, and the visually-observed mask.

Cells start at 0.5; cells touched by a map segment start at 1.0 and never
change. A footprint frees (sets to 0.0) every non-obstacle cell whose center
lies inside the footprint polygon and is in line of sight of the pose.
Camera footprints additionally mark cells as visually observed.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..geometry import Point2, Pose2, VectorMap, segments_intersect
from .footprint import RectangularFootprint, TriangularFootprint, points_in_convex_polygon

logger = logging.getLogger(__name__)

MAX_CELLS = 10_000_000
UNKNOWN = 0.5
OCCUPIED = 1.0
FREE = 0.0

Footprint = Union[RectangularFootprint, TriangularFootprint]


class SearchMapSizeError(ValueError):
    """The requested resolution would allocate an absurd number of cells."""


@dataclass(frozen=True)
class FootprintUpdate:
    """Flat indices of cells changed by one footprint application."""

    freed: np.ndarray
    observed: np.ndarray

    @property
    def is_empty(self) -> bool:
        return len(self.freed) == 0 and len(self.observed) == 0


class SearchMap:
    """
    Occupancy belief grid over the vector map bounds.

    Cell ``(row, col)`` covers ``[origin.x + col*res, origin.x + (col+1)*res)``
    by the matching ``y`` interval for ``row``; flat index is ``row * width + col``.
    Single writer: only the trial coordinator mutates it.
    """

    def __init__(self, vector_map: VectorMap, resolution: float, width: int, height: int):
        self.vector_map = vector_map
        self.origin = Point2(vector_map.bounds.xmin, vector_map.bounds.ymin)
        self.resolution = resolution
        self.width = width
        self.height = height
        self.occupancy = np.full((height, width), UNKNOWN, dtype=float)
        self.visual_mask = np.zeros((height, width), dtype=bool)
        cols, rows = np.meshgrid(np.arange(width), np.arange(height))
        self._centers = np.stack([
            self.origin.x + (cols.ravel() + 0.5) * resolution,
            self.origin.y + (rows.ravel() + 0.5) * resolution,
        ], axis=1)

    @property
    def cell_count(self) -> int:
        return self.width * self.height

    @property
    def cell_centers(self) -> np.ndarray:
        """``(cell_count, 2)`` centers in flat-index order."""
        return self._centers

    def obstacle_mask(self) -> np.ndarray:
        return self.occupancy == OCCUPIED

    def obstacle_cell_count(self) -> int:
        return int(np.count_nonzero(self.obstacle_mask()))

    def free_cell_count(self) -> int:
        return self.cell_count - self.obstacle_cell_count()

    def cell_of(self, p: Point2) -> Optional[int]:
        """Flat index of the cell containing ``p``, or ``None`` outside the grid."""
        col = math.floor((p.x - self.origin.x) / self.resolution)
        row = math.floor((p.y - self.origin.y) / self.resolution)
        if not (0 <= col < self.width and 0 <= row < self.height):
            return None
        return row * self.width + col

    def cells_of(self, points: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`cell_of`; -1 marks points outside the grid."""
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        cols = np.floor((points[:, 0] - self.origin.x) / self.resolution).astype(np.int64)
        rows = np.floor((points[:, 1] - self.origin.y) / self.resolution).astype(np.int64)
        inside = (cols >= 0) & (cols < self.width) & (rows >= 0) & (rows < self.height)
        return np.where(inside, rows * self.width + cols, -1)

    def cell_center(self, index: int) -> Point2:
        x, y = self._centers[index]
        return Point2(float(x), float(y))

    def index_window(self, xmin: float, ymin: float, xmax: float, ymax: float) -> np.ndarray:
        """Flat indices of cells whose extent meets the closed rectangle."""
        col0 = max(0, math.floor((xmin - self.origin.x) / self.resolution))
        col1 = min(self.width - 1, math.floor((xmax - self.origin.x) / self.resolution))
        row0 = max(0, math.floor((ymin - self.origin.y) / self.resolution))
        row1 = min(self.height - 1, math.floor((ymax - self.origin.y) / self.resolution))
        if col1 < col0 or row1 < row0:
            return np.empty(0, dtype=np.int64)
        cols, rows = np.meshgrid(np.arange(col0, col1 + 1), np.arange(row0, row1 + 1))
        return (rows * self.width + cols).ravel()

    def copy(self) -> "SearchMap":
        clone = SearchMap.__new__(SearchMap)
        clone.vector_map = self.vector_map
        clone.origin = self.origin
        clone.resolution = self.resolution
        clone.width = self.width
        clone.height = self.height
        clone.occupancy = self.occupancy.copy()
        clone.visual_mask = self.visual_mask.copy()
        clone._centers = self._centers
        return clone


def _grid_extent(length: float, resolution: float) -> int:
    return max(1, math.ceil(length / resolution - 1e-9))


def init_search_map(vector_map: VectorMap, resolution: float) -> SearchMap:
    """
    Build the initial search map for ``vector_map``.

    Args:
        vector_map: Static map; its bounds define the grid extent.
        resolution: Cell edge in meters.

    Returns:
        SearchMap with segment cells at 1.0 and all other cells at 0.5.

    Raises:
        ValueError: If ``resolution`` is not positive.
        SearchMapSizeError: If the grid would exceed 10**7 cells.
    """
    if not resolution > 0:
        raise ValueError("resolution must be positive")
    width = _grid_extent(vector_map.bounds.width, resolution)
    height = _grid_extent(vector_map.bounds.height, resolution)
    if width * height > MAX_CELLS:
        raise SearchMapSizeError(f"{width}x{height} cells exceeds the {MAX_CELLS} cell limit")

    sm = SearchMap(vector_map, resolution, width, height)
    flat = sm.occupancy.reshape(-1)
    for a, b in zip(vector_map.seg_a, vector_map.seg_b):
        flat[_segment_cells(sm, a, b)] = OCCUPIED
    logger.debug(f"Search map {width}x{height} at {resolution} m, {sm.obstacle_cell_count()} obstacle cells")
    return sm


def _segment_cells(sm: SearchMap, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cells whose closed square meets the closed segment ``a``-``b``."""
    window = sm.index_window(min(a[0], b[0]), min(a[1], b[1]), max(a[0], b[0]), max(a[1], b[1]))
    if len(window) == 0:
        return window
    half = 0.5 * sm.resolution
    centers = sm.cell_centers[window]
    corners = centers[:, None, :] + half * np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]])[None, :, :]
    direction = b - a
    side = direction[0] * (corners[..., 1] - a[1]) - direction[1] * (corners[..., 0] - a[0])
    separated = np.all(side > 0, axis=1) | np.all(side < 0, axis=1)
    return window[~separated]


def _segments_near(vector_map: VectorMap, points: np.ndarray):
    """Map segments meeting the bounding box of ``points``; sight lines between them stay inside it."""
    lo, hi = points.min(axis=0), points.max(axis=0)
    seg_a, seg_b = vector_map.seg_a, vector_map.seg_b
    if len(seg_a) == 0:
        return seg_a, seg_b
    keep = np.all(np.maximum(seg_a, seg_b) >= lo, axis=1) & np.all(np.minimum(seg_a, seg_b) <= hi, axis=1)
    return seg_a[keep], seg_b[keep]


def observe_footprint(sm: SearchMap, pose: Pose2, fp: Footprint) -> FootprintUpdate:
    """
    Apply one sensor footprint and report which cells changed.

    Obstacle cells never change. Occluded cells (a map segment between the
    pose and the cell center) are left untouched.
    """
    polygon = fp.polygon(pose)
    window = sm.index_window(*polygon.min(axis=0), *polygon.max(axis=0))
    empty = FootprintUpdate(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
    if len(window) == 0:
        return empty

    occupancy = sm.occupancy.reshape(-1)
    visual = sm.visual_mask.reshape(-1)
    pending = occupancy[window] == UNKNOWN
    if fp.is_visual:
        pending |= (occupancy[window] != OCCUPIED) & ~visual[window]
    window = window[pending]
    if len(window) == 0:
        return empty

    centers = sm.cell_centers[window]
    window = window[points_in_convex_polygon(centers, polygon)]
    if len(window) == 0:
        return empty
    seg_a, seg_b = _segments_near(sm.vector_map, np.vstack([polygon, pose.as_array()]))
    blocked = segments_intersect(pose.as_array(), sm.cell_centers[window], seg_a, seg_b)
    visible = window[~blocked]

    freed = visible[occupancy[visible] == UNKNOWN]
    occupancy[freed] = FREE
    observed = np.empty(0, dtype=np.int64)
    if fp.is_visual:
        observed = visible[~visual[visible]]
        visual[observed] = True
    return FootprintUpdate(freed=freed, observed=observed)


def apply_footprint(sm: SearchMap, pose: Pose2, fp: Footprint) -> int:
    """Apply a footprint; returns the number of newly freed cells."""
    return int(len(observe_footprint(sm, pose, fp).freed))


def apply_update(sm: SearchMap, freed, observed) -> None:
    """Replay a footprint delta received from elsewhere (networked mirrors)."""
    occupancy = sm.occupancy.reshape(-1)
    freed = np.asarray(freed, dtype=np.int64)
    if len(freed):
        freed = freed[occupancy[freed] != OCCUPIED]
        occupancy[freed] = FREE
    mark_visually_observed(sm, observed)


def mark_visually_observed(sm: SearchMap, cell_indices) -> None:
    indices = np.asarray(cell_indices, dtype=np.int64)
    if len(indices):
        sm.visual_mask.reshape(-1)[indices] = True


def entropy(sm: SearchMap) -> float:
    """Shannon entropy of the occupancy grid in bits, with 0 log 0 = 0."""
    return cell_entropy(sm.occupancy)


def cell_entropy(probabilities) -> float:
    """Summed binary entropy in bits of an array of cell probabilities."""
    m = np.asarray(probabilities, dtype=float)
    interior = (m > 0.0) & (m < 1.0)
    p = m[interior]
    return float(-np.sum(p * np.log2(p) + (1.0 - p) * np.log2(1.0 - p)))


def is_visually_observed(sm: SearchMap, p: Point2) -> bool:
    """Visual mask of the cell containing ``p``; points off the grid are not observed."""
    index = sm.cell_of(p)
    if index is None:
        return False
    return bool(sm.visual_mask.reshape(-1)[index])
