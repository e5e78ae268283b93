"""
Bounded history of prior non-LTF points with a spatial hash for exact nearest-neighbour search.
"""

import math
from collections import deque
from typing import Deque, Dict, List, Optional, Tuple

import numpy as np

from ..geometry import Point2

CellKey = Tuple[int, int]

# Rings searched around the query cell before falling back to a full scan.
_MAX_HASH_RINGS = 2
_QUERY_BLOCK = 256


class ScanHistory:
    """
    Ring buffer of ``(timestamp, global non-LTF points)`` entries.

    Single writer: one instance per robot classification stream.
    """

    def __init__(self, capacity: int, cell_size: float):
        if capacity < 1:
            raise ValueError("history capacity must be at least 1")
        if cell_size <= 0:
            raise ValueError("cell_size must be positive")
        self.capacity = capacity
        self.cell_size = cell_size
        self._entries: Deque[Tuple[int, float, np.ndarray]] = deque()
        self._cells: Dict[CellKey, List[Tuple[int, float, float]]] = {}
        self._next_seq = 0
        self._point_count = 0
        self._stacked: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def point_count(self) -> int:
        return self._point_count

    @property
    def last_timestamp(self) -> Optional[float]:
        return self._entries[-1][1] if self._entries else None

    def timestamps(self) -> List[float]:
        return [timestamp for _, timestamp, _ in self._entries]

    def _key(self, x: float, y: float) -> CellKey:
        return (math.floor(x / self.cell_size), math.floor(y / self.cell_size))

    def push(self, timestamp: float, points: np.ndarray) -> None:
        """Append one scan's non-LTF points, evicting the oldest entry beyond capacity."""
        last = self.last_timestamp
        if last is not None and timestamp <= last:
            raise ValueError(f"history timestamps must increase: {timestamp} after {last}")
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        seq = self._next_seq
        self._next_seq += 1
        self._entries.append((seq, timestamp, points))
        self._stacked = None
        for x, y in points:
            self._cells.setdefault(self._key(x, y), []).append((seq, float(x), float(y)))
        self._point_count += len(points)
        while len(self._entries) > self.capacity:
            self._evict_oldest()

    def _evict_oldest(self) -> None:
        seq, _, points = self._entries.popleft()
        self._stacked = None
        for key in {self._key(x, y) for x, y in points}:
            kept = [item for item in self._cells[key] if item[0] != seq]
            if kept:
                self._cells[key] = kept
            else:
                del self._cells[key]
        self._point_count -= len(points)

    def stacked_points(self) -> np.ndarray:
        """Every retained point as one ``(n, 2)`` array, oldest scan first."""
        if self._stacked is None:
            parts = [points for _, _, points in self._entries if len(points)]
            self._stacked = np.concatenate(parts) if parts else np.empty((0, 2))
        return self._stacked

    def nearest_distances(self, points: np.ndarray) -> np.ndarray:
        """Exact nearest-point distance for each query row; ``inf`` while the history is empty."""
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        stacked = self.stacked_points()
        if len(stacked) == 0:
            return np.full(len(points), np.inf)
        distances = np.empty(len(points))
        for start in range(0, len(points), _QUERY_BLOCK):
            block = points[start:start + _QUERY_BLOCK]
            d2 = (block[:, None, 0] - stacked[None, :, 0]) ** 2 + (block[:, None, 1] - stacked[None, :, 1]) ** 2
            distances[start:start + _QUERY_BLOCK] = np.sqrt(d2.min(axis=1))
        return distances

    def nearest(self, point: Point2) -> Optional[Tuple[float, Point2]]:
        """
        Exact nearest stored point.

        Returns:
            ``(distance, point)`` or ``None`` when the history holds no points.
        """
        if self._point_count == 0:
            return None
        ci, cj = self._key(point.x, point.y)
        best_d2 = math.inf
        best: Optional[Tuple[float, float]] = None
        for ring in range(_MAX_HASH_RINGS + 1):
            for key in _ring_keys(ci, cj, ring):
                for _, x, y in self._cells.get(key, ()):
                    d2 = (x - point.x) ** 2 + (y - point.y) ** 2
                    if d2 < best_d2:
                        best_d2, best = d2, (x, y)
            # Anything outside rings 0..ring is at least ring * cell_size away.
            if best is not None and best_d2 <= (ring * self.cell_size) ** 2:
                return math.sqrt(best_d2), Point2(*best)
        return self._nearest_exhaustive(point)

    def _nearest_exhaustive(self, point: Point2) -> Tuple[float, Point2]:
        stacked = self.stacked_points()
        d2 = np.sum((stacked - point.as_array()) ** 2, axis=1)
        index = int(np.argmin(d2))
        return math.sqrt(float(d2[index])), Point2(float(stacked[index, 0]), float(stacked[index, 1]))


def _ring_keys(ci: int, cj: int, ring: int):
    if ring == 0:
        yield (ci, cj)
        return
    for di in range(-ring, ring + 1):
        yield (ci + di, cj - ring)
        yield (ci + di, cj + ring)
    for dj in range(-ring + 1, ring):
        yield (ci - ring, cj + dj)
        yield (ci + ring, cj + dj)
