# Configuration classes for logging and tracing

"""
Observability configuration classes using Pydantic for environment management.

This module defines configuration for OpenTelemetry tracing and the log
level of the simulation, planning and coordination components.
"""

import os
import re

from enum import Enum
from pydantic import BaseModel, Field, field_validator


class LogLevel(str, Enum):
    """Supported log levels, as accepted by ``LIVE_LOG``."""
    ERROR = "error"
    INFO = "info"
    DEBUG = "debug"

    @property
    def logging_level(self) -> str:
        return self.value.upper()


def _env_flag(name: str) -> bool:
    return os.getenv(name, "false").strip().lower() in ("1", "true", "yes", "on")


class TracingConfig(BaseModel):
    """Configuration for OpenTelemetry tracing."""

    enabled: bool = Field(
        default_factory=lambda: _env_flag("LIVE_TRACING"),
        description="Enable/disable tracing of planning, trials, batches and sessions"
    )

    service_name: str = Field(
        default="live-search",
        description="Service name for trace identification"
    )

    @field_validator("service_name")
    @classmethod
    def validate_service_name(cls, v: str) -> str:
        if not v or len(v) > 100:
            raise ValueError("Service name must be 1-100 characters")
        if not re.match(r'^[a-zA-Z0-9_-]+$', v):
            raise ValueError("Service name contains invalid characters")
        return v

    service_version: str = Field(
        default="1.0.0",
        description="Service version for trace metadata"
    )

    console_export: bool = Field(
        default_factory=lambda: _env_flag("LIVE_TRACE_CONSOLE"),
        description="Print finished spans to stdout"
    )


class ObservabilityConfig(BaseModel):
    """Main observability configuration."""

    tracing: TracingConfig = Field(
        default_factory=TracingConfig,
        description="OpenTelemetry tracing configuration"
    )

    log_level: LogLevel = Field(
        default_factory=lambda: LogLevel(os.getenv("LIVE_LOG", "info").strip().lower() or "info"),
        description="Global log level"
    )

    def get_service_tags(self) -> dict:
        """Resource attributes attached to every span."""
        return {
            "service.name": self.tracing.service_name,
            "service.version": self.tracing.service_version,
        }


def create_observability_config(**overrides) -> ObservabilityConfig:
    """
    Create observability configuration from environment variables.

    Returns:
        ObservabilityConfig: Validated configuration instance.
    """
    return ObservabilityConfig(**overrides)
