"""
Perception configuration for lidar feature classification.
"""

import math

from pydantic import BaseModel, ConfigDict, Field, field_validator

# exp(-1): the likelihood of a point exactly one standard deviation away.
ONE_SIGMA_LIKELIHOOD = 0.3679


class PerceptionConfig(BaseModel):
    """Thresholds and noise model for LTF/STF/DF labelling."""

    model_config = ConfigDict(frozen=True)

    sigma_s: float = Field(
        default=0.0025,
        gt=0.0,
        description="Scalar observation variance in square meters",
    )

    ltf_threshold: float = Field(
        default=ONE_SIGMA_LIKELIHOOD,
        gt=0.0,
        lt=1.0,
        description="Map-match likelihood above which a point is a long term feature",
    )

    stf_threshold: float = Field(
        default=ONE_SIGMA_LIKELIHOOD,
        gt=0.0,
        lt=1.0,
        description="Prior-scan match likelihood above which a point is a short term feature",
    )

    history_horizon: int = Field(
        default=10,
        ge=1,
        description="Number of prior scans whose non-LTF points are retained",
    )

    @field_validator("sigma_s")
    @classmethod
    def validate_sigma(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("sigma_s must be finite")
        return v

    @property
    def sigma_std(self) -> float:
        return math.sqrt(self.sigma_s)

    @property
    def hash_cell_size(self) -> float:
        """Spatial hash cell edge used for nearest-neighbour lookups."""
        return 2.0 * self.sigma_std


def create_perception_config(**overrides) -> PerceptionConfig:
    """Build a perception config, applying keyword overrides to the defaults."""
    return PerceptionConfig(**overrides)
