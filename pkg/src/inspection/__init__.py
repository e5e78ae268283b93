"""
Inspection region generation from short term features.
"""

from .regions import (
    InspectionConfig,
    InspectionRegion,
    create_inspection_config,
    pool_stf_clusters,
    pool_stfs,
    filter_regions,
    select_nearest,
    region_to_priority_waypoint,
    detect_inspection_regions,
)

__all__ = [
    "InspectionConfig",
    "InspectionRegion",
    "create_inspection_config",
    "pool_stf_clusters",
    "pool_stfs",
    "filter_regions",
    "select_nearest",
    "region_to_priority_waypoint",
    "detect_inspection_regions",
]
