"""Search map snapshots as ASCII greymaps (PGM P2) with a metadata sidecar."""

import logging
from pathlib import Path
from typing import Union

import numpy as np

from .grid import SearchMap

logger = logging.getLogger(__name__)

MAX_GREY = 255


def occupancy_to_grey(occupancy: np.ndarray) -> np.ndarray:
    """0 -> 0, 0.5 -> 128, 1 -> 255."""
    return np.floor(np.clip(occupancy, 0.0, 1.0) * MAX_GREY + 0.5).astype(int)


def export_pgm(sm: SearchMap, path: Union[str, Path]) -> Path:
    """
    Write ``path`` (P2 greymap, top row = largest y) and ``path.meta``.

    The sidecar holds ``origin_x origin_y resolution width height`` on one line.

    Returns:
        Path of the sidecar file.
    """
    path = Path(path)
    grey = occupancy_to_grey(sm.occupancy)[::-1]
    lines = ["P2", f"{sm.width} {sm.height}", str(MAX_GREY)]
    lines.extend(" ".join(str(v) for v in row) for row in grey)
    path.write_text("\n".join(lines) + "\n", encoding="ascii")

    meta = path.with_name(path.name + ".meta")
    meta.write_text(
        f"{sm.origin.x!r} {sm.origin.y!r} {sm.resolution!r} {sm.width} {sm.height}\n",
        encoding="ascii",
    )
    logger.debug(f"Wrote search map snapshot {path}")
    return meta


def read_pgm(path: Union[str, Path]) -> np.ndarray:
    """Read a P2 greymap back into a ``(height, width)`` array, bottom row first."""
    tokens = [t for line in Path(path).read_text(encoding="ascii").splitlines()
              if not line.startswith("#") for t in line.split()]
    if not tokens or tokens[0] != "P2":
        raise ValueError(f"{path} is not an ASCII greymap")
    width, height = int(tokens[1]), int(tokens[2])
    values = np.array([int(t) for t in tokens[4:4 + width * height]]).reshape(height, width)
    return values[::-1]
