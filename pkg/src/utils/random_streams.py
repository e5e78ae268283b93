"""
Seeded random streams.

A trial seed spawns ``1 + n_robots`` child sequences: child 0 is reserved
for planning, child ``i + 1`` feeds robot ``i``. Robots draw from their
own stream in a fixed order each tick (drift, lidar noise, camera), so a
robot simulated in another process reproduces the same numbers.
"""

from typing import List

import numpy as np


def _children(seed: int, n_robots: int) -> List[np.random.SeedSequence]:
    if n_robots < 1:
        raise ValueError("n_robots must be at least 1")
    return np.random.SeedSequence(seed).spawn(1 + n_robots)


def robot_stream(seed: int, n_robots: int, index: int) -> np.random.Generator:
    if not 0 <= index < n_robots:
        raise IndexError(f"robot index {index} out of range for {n_robots} robots")
    return np.random.default_rng(_children(seed, n_robots)[index + 1])


def robot_streams(seed: int, n_robots: int) -> List[np.random.Generator]:
    return [np.random.default_rng(child) for child in _children(seed, n_robots)[1:]]
