"""
Observability for the search stack: logging setup and OpenTelemetry tracing.
"""

from .config import LogLevel, ObservabilityConfig, TracingConfig, create_observability_config
from .service import (
    LOG_FORMAT,
    ObservabilityService,
    configure_logging,
    get_observability_service,
    set_observability_service,
    trace_operation,
)

__all__ = [
    "LogLevel",
    "ObservabilityConfig",
    "TracingConfig",
    "create_observability_config",
    "LOG_FORMAT",
    "ObservabilityService",
    "configure_logging",
    "get_observability_service",
    "set_observability_service",
    "trace_operation",
]
