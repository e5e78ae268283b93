"""
Lidar point classification into long term, short term and dynamic features.

A point is a long term feature (LTF) when it matches the static vector map,
a short term feature (STF) when it matches a retained non-LTF point from a
prior scan, and a dynamic feature (DF) otherwise. DFs are discarded downstream.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from ..geometry import Point2, Pose2, VectorMap, transform_many_to_global
from .config import PerceptionConfig
from .history import ScanHistory

logger = logging.getLogger(__name__)


class FeatureClass(str, Enum):
    """Label assigned to every lidar point."""
    LTF = "LTF"
    STF = "STF"
    DF = "DF"


class ScanOrderError(ValueError):
    """A scan arrived with a timestamp not after the previous one in its stream."""


@dataclass(frozen=True)
class LaserScan:
    """One lidar sweep: robot-frame points tagged with the believed pose."""

    pose_estimate: Pose2
    timestamp: float
    points: np.ndarray

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if len(points) == 0:
            raise ValueError("LaserScan requires at least one point")
        if not np.all(np.isfinite(points)):
            raise ValueError("LaserScan points must be finite")
        object.__setattr__(self, "points", points)

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class ClassifiedScan:
    """A scan with one label and one global-frame point per input point."""

    scan: LaserScan
    labels: Tuple[FeatureClass, ...]
    global_points: np.ndarray

    def __post_init__(self) -> None:
        if not (len(self.labels) == len(self.scan.points) == len(self.global_points)):
            raise ValueError("labels, points and global points must be parallel")

    def mask(self, label: FeatureClass) -> np.ndarray:
        return np.array([lab is label for lab in self.labels], dtype=bool)

    def points_of(self, label: FeatureClass) -> np.ndarray:
        return self.global_points[self.mask(label)]

    def label_counts(self) -> Dict[FeatureClass, int]:
        counts = {label: 0 for label in FeatureClass}
        for label in self.labels:
            counts[label] += 1
        return counts


def _likelihood(distance: float, sigma_s: float) -> float:
    return math.exp(-(distance * distance) / sigma_s)


def ltf_likelihood(p_global: Point2, vector_map: VectorMap, sigma_s: float) -> float:
    """``exp(-d^2 / sigma_s)`` with ``d`` the distance to the nearest map segment; 0 for an empty map."""
    if sigma_s <= 0:
        raise ValueError("sigma_s must be positive")
    if vector_map.is_empty:
        return 0.0
    return _likelihood(vector_map.min_distance(p_global), sigma_s)


def ltf_likelihoods(points_global: np.ndarray, vector_map: VectorMap, sigma_s: float) -> np.ndarray:
    """Vectorized :func:`ltf_likelihood`."""
    if vector_map.is_empty:
        return np.zeros(len(points_global))
    distances = vector_map.min_distances(points_global)
    return np.exp(-(distances ** 2) / sigma_s)


def stf_likelihood(
    p_global: Point2,
    history: ScanHistory,
    sigma_s: float,
) -> Tuple[float, Optional[Point2]]:
    """Likelihood that ``p_global`` re-observes its nearest retained prior point, plus that point."""
    if sigma_s <= 0:
        raise ValueError("sigma_s must be positive")
    match = history.nearest(p_global)
    if match is None:
        return 0.0, None
    distance, matched = match
    return _likelihood(distance, sigma_s), matched


def stf_likelihoods(points_global: np.ndarray, history: ScanHistory, sigma_s: float) -> np.ndarray:
    """Vectorized :func:`stf_likelihood` without the matched points; 0 while the history is empty."""
    if sigma_s <= 0:
        raise ValueError("sigma_s must be positive")
    distances = history.nearest_distances(points_global)
    return np.exp(-(distances ** 2) / sigma_s)


def create_scan_history(cfg: PerceptionConfig) -> ScanHistory:
    return ScanHistory(capacity=cfg.history_horizon, cell_size=cfg.hash_cell_size)


def classify_scan(
    scan: LaserScan,
    vector_map: VectorMap,
    history: ScanHistory,
    cfg: PerceptionConfig,
) -> ClassifiedScan:
    """
    Label every point of ``scan`` and push its non-LTF points into ``history``.

    Args:
        scan: Incoming scan; its timestamp must exceed every history timestamp.
        vector_map: Static map used for the LTF test.
        history: Per-robot history, mutated in place.
        cfg: Thresholds and observation variance.

    Returns:
        ClassifiedScan with labels parallel to ``scan.points``.

    Raises:
        ScanOrderError: If the scan timestamp does not increase.
    """
    last = history.last_timestamp
    if last is not None and scan.timestamp <= last:
        raise ScanOrderError(f"scan timestamp {scan.timestamp} not after {last}")

    global_points = transform_many_to_global(scan.pose_estimate, scan.points)
    is_ltf = ltf_likelihoods(global_points, vector_map, cfg.sigma_s) > cfg.ltf_threshold

    is_stf = np.zeros(len(global_points), dtype=bool)
    if not is_ltf.all():
        is_stf[~is_ltf] = stf_likelihoods(global_points[~is_ltf], history, cfg.sigma_s) > cfg.stf_threshold
    labels = [
        FeatureClass.LTF if ltf else FeatureClass.STF if stf else FeatureClass.DF
        for ltf, stf in zip(is_ltf, is_stf)
    ]

    history.push(scan.timestamp, global_points[~is_ltf])
    classified = ClassifiedScan(scan=scan, labels=tuple(labels), global_points=global_points)
    logger.debug(f"Classified scan t={scan.timestamp:.2f}: {classified.label_counts()}")
    return classified
