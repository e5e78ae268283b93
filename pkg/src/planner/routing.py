"""
Route construction: viewpoint partitioning and per-robot tour ordering.
"""

import logging
import math
from typing import List, Optional, Sequence

import numpy as np

from ..geometry import Pose2, path_positions

logger = logging.getLogger(__name__)

_IMPROVEMENT_EPS = 1e-9


def path_length(poses: Sequence[Pose2]) -> float:
    """Sum of consecutive Euclidean position distances; 0 for fewer than two poses."""
    if len(poses) < 2:
        return 0.0
    return float(sum(math.hypot(b.x - a.x, b.y - a.y) for a, b in zip(poses, poses[1:])))


def _assign_capacitated(positions: np.ndarray, centroids: np.ndarray, capacity: int) -> np.ndarray:
    """Greedy nearest assignment over (point, cluster) pairs by ascending distance."""
    n, k = len(positions), len(centroids)
    distances = np.linalg.norm(positions[:, None, :] - centroids[None, :, :], axis=2)
    labels = np.full(n, -1, dtype=int)
    load = np.zeros(k, dtype=int)
    for flat in np.argsort(distances.ravel(), kind="stable"):
        point, cluster = divmod(int(flat), k)
        if labels[point] >= 0 or load[cluster] >= capacity:
            continue
        labels[point] = cluster
        load[cluster] += 1
    return labels


def balanced_kmeans(
    positions: np.ndarray,
    k: int,
    rng: Optional[np.random.Generator] = None,
    slack: float = 1.5,
    init: Optional[np.ndarray] = None,
    iterations: int = 50,
) -> np.ndarray:
    """
    Capacitated k-means on 2D positions.

    Every cluster holds at most ``ceil(slack * n / k)`` points. Assignment
    visits (point, cluster) pairs by ascending distance, so results depend
    only on the inputs.

    Args:
        positions: ``(n, 2)`` points.
        k: Number of clusters.
        rng: Used to draw initial centroids when ``init`` is absent.
        slack: Capacity multiplier, at least 1.
        init: ``(k, 2)`` initial centroids.
        iterations: Cap on assignment/update rounds.

    Returns:
        ``(n,)`` cluster labels in ``[0, k)``.
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    n = len(positions)
    if k < 1:
        raise ValueError("k must be at least 1")
    if slack < 1.0:
        raise ValueError("slack must be at least 1")
    if n == 0:
        return np.empty(0, dtype=int)

    if init is not None:
        centroids = np.asarray(init, dtype=float).reshape(k, 2).copy()
    else:
        rng = rng if rng is not None else np.random.default_rng(0)
        picks = rng.choice(n, size=min(k, n), replace=False)
        centroids = positions[np.resize(picks, k)].copy()

    capacity = max(1, math.ceil(slack * n / k))
    labels = _assign_capacitated(positions, centroids, capacity)
    for _ in range(iterations):
        for cluster in range(k):
            members = positions[labels == cluster]
            if len(members):
                centroids[cluster] = members.mean(axis=0)
        updated = _assign_capacitated(positions, centroids, capacity)
        if np.array_equal(updated, labels):
            break
        labels = updated
    return labels


def assign_clusters_to_robots(
    positions: np.ndarray,
    labels: np.ndarray,
    starts: Sequence[Pose2],
) -> List[int]:
    """
    One-to-one cluster to robot matching.

    Non-empty clusters are matched greedily by centroid-to-start distance,
    ties by robot index. Returns ``owner[cluster] = robot index``.
    """
    k = len(starts)
    start_xy = path_positions(starts)
    pairs = []
    for cluster in range(k):
        members = positions[labels == cluster]
        if len(members) == 0:
            continue
        centroid = members.mean(axis=0)
        for robot in range(k):
            pairs.append((float(np.linalg.norm(centroid - start_xy[robot])), robot, cluster))
    pairs.sort()

    owner = [-1] * k
    taken = set()
    for _, robot, cluster in pairs:
        if owner[cluster] >= 0 or robot in taken:
            continue
        owner[cluster] = robot
        taken.add(robot)
    spare = [r for r in range(k) if r not in taken]
    for cluster in range(k):
        if owner[cluster] < 0:
            owner[cluster] = spare.pop(0)
    return owner


def nearest_neighbor_order(start: Pose2, viewpoints: Sequence[Pose2]) -> List[int]:
    """Greedy tour from ``start``; ties go to the lower viewpoint index."""
    remaining = list(range(len(viewpoints)))
    order = []
    current = start
    while remaining:
        nxt = min(remaining, key=lambda i: (current.distance_to(viewpoints[i]), i))
        order.append(nxt)
        remaining.remove(nxt)
        current = viewpoints[nxt]
    return order


def two_opt(route: List[int], distances: List[List[float]]) -> List[int]:
    """
    Open-path 2-opt with ``route[0]`` fixed.

    Reverses ``route[i..j]`` whenever that shortens the path and repeats until
    no improving reversal remains.
    """
    route = list(route)
    m = len(route)
    improved = True
    while improved:
        improved = False
        for i in range(1, m - 1):
            for j in range(i + 1, m):
                a, b, c = route[i - 1], route[i], route[j]
                delta = distances[a][c] - distances[a][b]
                if j + 1 < m:
                    d = route[j + 1]
                    delta += distances[b][d] - distances[c][d]
                if delta < -_IMPROVEMENT_EPS:
                    route[i:j + 1] = route[i:j + 1][::-1]
                    improved = True
    return route


def order_route(start: Pose2, viewpoints: Sequence[Pose2]) -> List[Pose2]:
    """
    Order viewpoints into a short open path beginning at ``start``.

    Nearest neighbour construction followed by 2-opt; the start itself is
    not part of the returned list.
    """
    if len(viewpoints) <= 1:
        return list(viewpoints)
    nodes = [start] + list(viewpoints)
    xy = path_positions(nodes)
    distances = np.linalg.norm(xy[:, None, :] - xy[None, :, :], axis=2).tolist()
    route = [0] + [i + 1 for i in nearest_neighbor_order(start, viewpoints)]
    route = two_opt(route, distances)
    return [nodes[i] for i in route[1:]]
