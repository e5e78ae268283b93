"""
Search map (entropy map) with sensor footprints.
"""

from .footprint import (
    RectangularFootprint,
    TriangularFootprint,
    SensorFootprint,
    points_in_convex_polygon,
    footprint_contains,
)
from .grid import (
    SearchMap,
    SearchMapSizeError,
    FootprintUpdate,
    init_search_map,
    observe_footprint,
    apply_footprint,
    apply_update,
    mark_visually_observed,
    entropy,
    cell_entropy,
    is_visually_observed,
)
from .export import export_pgm, read_pgm, occupancy_to_grey

__all__ = [
    "RectangularFootprint",
    "TriangularFootprint",
    "SensorFootprint",
    "points_in_convex_polygon",
    "footprint_contains",
    "SearchMap",
    "SearchMapSizeError",
    "FootprintUpdate",
    "init_search_map",
    "observe_footprint",
    "apply_footprint",
    "apply_update",
    "mark_visually_observed",
    "entropy",
    "cell_entropy",
    "is_visually_observed",
    "export_pgm",
    "read_pgm",
    "occupancy_to_grey",
]
