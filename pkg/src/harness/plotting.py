"""Trajectory rendering with matplotlib (Agg backend, file output only)."""

import logging
from collections import defaultdict
from pathlib import Path
from typing import Dict, List, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ..geometry import VectorMap  # noqa: E402
from ..simulator import Difficulty, WorldObject, read_trajectory_log  # noqa: E402

logger = logging.getLogger(__name__)

DIFFICULTY_COLORS = {
    Difficulty.EASY: "tab:green",
    Difficulty.MEDIUM: "tab:orange",
    Difficulty.HARD: "tab:red",
}

DETECTION_PREFIX = "object_detected:"


def render_trial(
    vector_map: VectorMap,
    objects: Sequence[WorldObject],
    log_path: Union[str, Path],
    out_png: Union[str, Path],
) -> Path:
    """
    Draw the map, object sites, each robot's true trajectory and detection moments.

    Args:
        vector_map: Static map.
        objects: Objects placed in the trial.
        log_path: Trajectory CSV written by the trial.
        out_png: Image to write.

    Returns:
        Path of the written image.
    """
    rows = read_trajectory_log(log_path)
    paths: Dict[str, List[tuple]] = defaultdict(list)
    detections = []
    for row in rows:
        point = (float(row["true_x"]), float(row["true_y"]))
        track = paths[row["robot"]]
        if not track or track[-1] != point:
            track.append(point)
        if row["event"].startswith(DETECTION_PREFIX):
            detections.append((point, row["event"][len(DETECTION_PREFIX):], row["robot"]))

    fig, ax = plt.subplots(figsize=(6, 9))
    for a, b in zip(vector_map.seg_a, vector_map.seg_b):
        ax.plot([a[0], b[0]], [a[1], b[1]], color="black", linewidth=1.0)

    for obj in objects:
        x, y = obj.center
        ax.add_patch(plt.Rectangle(
            (x - obj.half_extent, y - obj.half_extent), 2 * obj.half_extent, 2 * obj.half_extent,
            color=DIFFICULTY_COLORS[obj.difficulty], alpha=0.8 if obj.is_target else 0.3,
        ))
        ax.annotate(obj.id, (x, y), textcoords="offset points", xytext=(4, 4), fontsize=7)

    for robot, track in paths.items():
        xs, ys = zip(*track)
        line, = ax.plot(xs, ys, linewidth=1.2, label=robot)
        ax.scatter(xs[0], ys[0], color=line.get_color(), marker="o", s=25)

    for (x, y), obj_id, robot in detections:
        ax.scatter(x, y, marker="*", s=120, color="gold", edgecolors="black", zorder=5)
        logger.debug(f"{robot} detected {obj_id} at ({x:.2f}, {y:.2f})")

    bounds = vector_map.bounds
    ax.set_xlim(bounds.xmin, bounds.xmax)
    ax.set_ylim(bounds.ymin, bounds.ymax)
    ax.set_aspect("equal")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_title(Path(log_path).stem)
    if paths:
        ax.legend(loc="upper right", fontsize=8)

    out = Path(out_png)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=120, bbox_inches="tight")
    plt.close(fig)
    logger.info(f"Rendered {len(paths)} trajectories to {out}")
    return out
