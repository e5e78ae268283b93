"""
Lidar feature classification (LTF / STF / DF).
"""

from .config import PerceptionConfig, create_perception_config
from .history import ScanHistory
from .classifier import (
    FeatureClass,
    LaserScan,
    ClassifiedScan,
    ScanOrderError,
    ltf_likelihood,
    ltf_likelihoods,
    stf_likelihood,
    stf_likelihoods,
    classify_scan,
    create_scan_history,
)

__all__ = [
    "PerceptionConfig",
    "create_perception_config",
    "ScanHistory",
    "FeatureClass",
    "LaserScan",
    "ClassifiedScan",
    "ScanOrderError",
    "ltf_likelihood",
    "ltf_likelihoods",
    "stf_likelihood",
    "stf_likelihoods",
    "classify_scan",
    "create_scan_history",
]
