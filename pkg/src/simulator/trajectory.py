"""Trajectory log: one CSV row per robot, tick and event."""

import csv
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

from ..geometry import Pose2

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = [
    "tick", "time_s", "robot",
    "true_x", "true_y", "true_theta",
    "bel_x", "bel_y", "bel_theta",
    "wm_state", "event",
]

NO_EVENT = "none"


class TrajectoryLogWriter:
    """
    Streams trajectory rows to ``path``; keeps them in memory when no path is given.

    Usable as a context manager.
    """

    def __init__(self, path: Optional[Union[str, Path]] = None):
        self.path = Path(path) if path is not None else None
        self.rows: List[List] = []
        self._handle = None
        self._writer = None
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._handle = self.path.open("w", newline="", encoding="utf-8")
            self._writer = csv.writer(self._handle, lineterminator="\n")
            self._writer.writerow(TRAJECTORY_COLUMNS)

    def write(
        self,
        tick: int,
        time_s: float,
        robot: str,
        true_pose: Pose2,
        believed_pose: Pose2,
        wm_state: str,
        events: Sequence[str] = (),
    ) -> None:
        for event in list(events) or [NO_EVENT]:
            row = [tick, time_s, robot, *true_pose.as_tuple(), *believed_pose.as_tuple(), wm_state, event]
            self.rows.append(row)
            if self._writer is not None:
                self._writer.writerow(row)

    def close(self) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None
            logger.debug(f"Wrote {len(self.rows)} trajectory rows to {self.path}")

    def __enter__(self) -> "TrajectoryLogWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def read_trajectory_log(path: Union[str, Path]) -> List[Dict[str, str]]:
    with Path(path).open(newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))
