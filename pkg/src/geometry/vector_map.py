"""
Static vector maps: a bounded set of line segments.

File format (UTF-8 text, meters)::

    # comment
    bounds xmin ymin xmax ymax
    x1 y1 x2 y2
    ...

The ``bounds`` header is required before the first segment.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from .primitives import LineSegment, Point2, point_segment_distances

logger = logging.getLogger(__name__)

_BOUNDS_TOLERANCE = 1e-9


class MapFormatError(ValueError):
    """Raised when a vector map file or segment list is malformed."""

    def __init__(self, message: str, line_number: int = 0):
        self.line_number = line_number
        prefix = f"line {line_number}: " if line_number else ""
        super().__init__(f"{prefix}{message}")


@dataclass(frozen=True)
class Bounds:
    """Axis-aligned rectangle in meters."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self) -> None:
        values = (self.xmin, self.ymin, self.xmax, self.ymax)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("Bounds must be finite")
        if self.xmax <= self.xmin or self.ymax <= self.ymin:
            raise ValueError(f"Empty bounds {values}")

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    def contains(self, p: Point2, tolerance: float = _BOUNDS_TOLERANCE) -> bool:
        return (self.xmin - tolerance <= p.x <= self.xmax + tolerance
                and self.ymin - tolerance <= p.y <= self.ymax + tolerance)

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.xmin, self.ymin, self.xmax, self.ymax)


@dataclass(frozen=True)
class VectorMap:
    """
    The static world: an ordered list of segments inside ``bounds``.

    ``seg_a`` and ``seg_b`` hold the endpoints as ``(m, 2)`` arrays so that
    ray casting and distance queries can be vectorized.
    """

    segments: Tuple[LineSegment, ...]
    bounds: Bounds
    seg_a: np.ndarray = field(init=False, repr=False, compare=False)
    seg_b: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "segments", tuple(self.segments))
        for index, segment in enumerate(self.segments):
            if not (self.bounds.contains(segment.a) and self.bounds.contains(segment.b)):
                raise MapFormatError(f"segment {index} {segment.as_tuple()} lies outside bounds")
        coords = np.array([s.as_tuple() for s in self.segments], dtype=float).reshape(-1, 4)
        object.__setattr__(self, "seg_a", coords[:, :2].copy())
        object.__setattr__(self, "seg_b", coords[:, 2:].copy())

    def __len__(self) -> int:
        return len(self.segments)

    @property
    def is_empty(self) -> bool:
        return not self.segments

    def with_segments(self, extra: Iterable[LineSegment]) -> "VectorMap":
        """A new map with ``extra`` appended (used to add obstacle outlines)."""
        return VectorMap(self.segments + tuple(extra), self.bounds)

    def min_distances(self, points: np.ndarray) -> np.ndarray:
        """Distance from each point to the nearest segment; ``inf`` for an empty map."""
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        if self.is_empty:
            return np.full(len(points), np.inf)
        return point_segment_distances(points, self.seg_a, self.seg_b).min(axis=1)

    def min_distance(self, p: Point2) -> float:
        return float(self.min_distances(p.as_array())[0])


def parse_vector_map(text: str) -> VectorMap:
    """Parse the vector map text format; see the module docstring."""
    bounds = None
    segments: List[LineSegment] = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if fields[0] == "bounds":
            if bounds is not None:
                raise MapFormatError("duplicate bounds header", line_number)
            try:
                bounds = Bounds(*_parse_numbers(fields[1:], line_number))
            except ValueError as e:
                if isinstance(e, MapFormatError):
                    raise
                raise MapFormatError(str(e), line_number) from e
            continue
        if bounds is None:
            raise MapFormatError("segment before bounds header", line_number)
        x1, y1, x2, y2 = _parse_numbers(fields, line_number)
        try:
            segment = LineSegment.from_coords(x1, y1, x2, y2)
        except ValueError as e:
            raise MapFormatError(str(e), line_number) from e
        if not (bounds.contains(segment.a) and bounds.contains(segment.b)):
            raise MapFormatError("segment outside bounds", line_number)
        segments.append(segment)
    if bounds is None:
        raise MapFormatError("missing bounds header")
    return VectorMap(tuple(segments), bounds)


def _parse_numbers(fields: Sequence[str], line_number: int) -> Tuple[float, ...]:
    if len(fields) != 4:
        raise MapFormatError(f"expected 4 numbers, got {len(fields)}", line_number)
    try:
        values = tuple(float(f) for f in fields)
    except ValueError as e:
        raise MapFormatError(f"not a number: {e}", line_number) from e
    if not all(math.isfinite(v) for v in values):
        raise MapFormatError("non-finite coordinate", line_number)
    return values


def load_vector_map(path: Union[str, Path]) -> VectorMap:
    """Read a vector map file."""
    path = Path(path)
    vector_map = parse_vector_map(path.read_text(encoding="utf-8"))
    logger.debug(f"Loaded vector map {path} with {len(vector_map)} segments")
    return vector_map


def dump_vector_map(vector_map: VectorMap) -> str:
    """Serialize a map to the text format; ``repr`` floats keep the round trip exact."""
    lines = ["bounds " + " ".join(repr(float(v)) for v in vector_map.bounds.as_tuple())]
    for segment in vector_map.segments:
        lines.append(" ".join(repr(float(v)) for v in segment.as_tuple()))
    return "\n".join(lines) + "\n"


def save_vector_map(vector_map: VectorMap, path: Union[str, Path]) -> None:
    Path(path).write_text(dump_vector_map(vector_map), encoding="utf-8")
