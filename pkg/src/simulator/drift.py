"""Localization drift: a random-walk offset between believed and true pose."""

import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..geometry import Pose2


class DriftConfig(BaseModel):
    """Random-walk standard deviations per square root second."""

    model_config = ConfigDict(frozen=True)

    position_std: float = Field(default=0.01, ge=0.0, description="Per-axis std in m/sqrt(s)")
    heading_std: float = Field(default=0.002, ge=0.0, description="Heading std in rad/sqrt(s)")


class DriftModel:
    """
    Additive offset ``(dx, dy, dtheta)`` in the global frame.

    ``believe(true) = true + offset`` and ``to_true(believed) = believed - offset``.
    With no config the offset stays zero and no random numbers are drawn.
    """

    def __init__(self, cfg: Optional[DriftConfig], rng: np.random.Generator):
        self.cfg = cfg
        self._rng = rng
        self.dx = 0.0
        self.dy = 0.0
        self.dtheta = 0.0

    @property
    def enabled(self) -> bool:
        return self.cfg is not None

    def step(self, dt: float) -> None:
        if self.cfg is None:
            return
        scale = math.sqrt(dt)
        noise = self._rng.normal(0.0, 1.0, size=3)
        self.dx += float(noise[0]) * self.cfg.position_std * scale
        self.dy += float(noise[1]) * self.cfg.position_std * scale
        self.dtheta += float(noise[2]) * self.cfg.heading_std * scale

    def believe(self, true_pose: Pose2) -> Pose2:
        if self.cfg is None:
            return true_pose
        return Pose2(true_pose.x + self.dx, true_pose.y + self.dy, true_pose.theta + self.dtheta)

    def to_true(self, believed: Pose2) -> Pose2:
        if self.cfg is None:
            return believed
        return Pose2(believed.x - self.dx, believed.y - self.dy, believed.theta - self.dtheta)
