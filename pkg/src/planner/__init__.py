"""
Coverage path planning for heterogeneous robot teams.
"""

from .config import PlannerMode, PlannerConfig, RobotSpec, create_planner_config
from .routing import (
    path_length,
    balanced_kmeans,
    assign_clusters_to_robots,
    nearest_neighbor_order,
    two_opt,
    order_route,
)
from .coverage import (
    CoveragePlan,
    CoverageGrid,
    PlanningError,
    coverage_fraction,
    plan_coverage,
    reference_footprint,
    split_viewpoints,
)
from .plan_file import format_plan, parse_plan, write_plan_file, read_plan_file

__all__ = [
    "PlannerMode",
    "PlannerConfig",
    "RobotSpec",
    "create_planner_config",
    "path_length",
    "balanced_kmeans",
    "assign_clusters_to_robots",
    "nearest_neighbor_order",
    "two_opt",
    "order_route",
    "CoveragePlan",
    "CoverageGrid",
    "PlanningError",
    "coverage_fraction",
    "plan_coverage",
    "reference_footprint",
    "split_viewpoints",
    "format_plan",
    "parse_plan",
    "write_plan_file",
    "read_plan_file",
]
