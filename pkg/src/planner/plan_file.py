"""Plan files: one viewpoint per line as ``robot_index x y theta``."""

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Union

from ..geometry import Pose2
from .coverage import CoveragePlan

logger = logging.getLogger(__name__)


def format_plan(viewpoints: Sequence[Sequence[Pose2]]) -> str:
    lines = []
    for robot, route in enumerate(viewpoints):
        for pose in route:
            lines.append(f"{robot} {pose.x!r} {pose.y!r} {pose.theta!r}")
    return "\n".join(lines) + ("\n" if lines else "")


def write_plan_file(plan: CoveragePlan, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_plan(plan.viewpoints), encoding="utf-8")
    logger.info(f"Wrote {plan.viewpoint_count} viewpoints to {path}")
    return path


def parse_plan(text: str, n_robots: Optional[int] = None) -> List[List[Pose2]]:
    """
    Parse plan text into per-robot routes, in file order.

    Args:
        text: Plan file contents; blank and ``#`` lines are ignored.
        n_robots: Pad the result with empty routes up to this count.

    Raises:
        ValueError: On a malformed line or negative robot index.
    """
    routes: List[List[Pose2]] = [[] for _ in range(n_robots or 0)]
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 4:
            raise ValueError(f"line {line_number}: expected 'robot_index x y theta'")
        try:
            robot = int(fields[0])
            x, y, theta = (float(v) for v in fields[1:])
        except ValueError as exc:
            raise ValueError(f"line {line_number}: {exc}") from exc
        if robot < 0:
            raise ValueError(f"line {line_number}: negative robot index")
        while len(routes) <= robot:
            routes.append([])
        routes[robot].append(Pose2(x, y, theta))
    return routes


def read_plan_file(path: Union[str, Path], n_robots: Optional[int] = None) -> List[List[Pose2]]:
    return parse_plan(Path(path).read_text(encoding="utf-8"), n_robots)
