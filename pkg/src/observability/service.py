# Observability Service - OpenTelemetry tracing and logging setup

"""
OpenTelemetry tracing service for planning, trials, batches and server sessions.

Tracing is off unless ``LIVE_TRACING`` is set; every helper degrades to a
no-op context so callers never branch on it. Spans never influence results.
"""

import logging
import sys
import time
from contextlib import contextmanager
from typing import Any, ContextManager, Dict, Optional

from opentelemetry import trace
from opentelemetry.sdk.resources import Resource
from opentelemetry.sdk.trace import Span, TracerProvider
from opentelemetry.sdk.trace.export import ConsoleSpanExporter, SimpleSpanProcessor

from .config import LogLevel, ObservabilityConfig, create_observability_config

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: "LogLevel | str" = LogLevel.INFO) -> None:
    """
    Install a single stream handler on the root logger.

    Args:
        level: ``error``, ``info`` or ``debug`` (case-insensitive).
    """
    level = LogLevel(str(getattr(level, "value", level)).lower())
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_live_search", False):
            root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._live_search = True
    root.addHandler(handler)
    root.setLevel(level.logging_level)


class ObservabilityService:
    """
    Facade over the OpenTelemetry tracer.

    Components open spans through :meth:`trace_operation`.
    """

    def __init__(self, config: ObservabilityConfig):
        """
        Initialize the observability service.

        Args:
            config: Observability configuration containing tracing settings.
        """
        if not config:
            raise ValueError("ObservabilityConfig is required")

        self.config = config
        self.tracing_config = config.tracing
        self._tracer: Optional[trace.Tracer] = None
        self._provider: Optional[TracerProvider] = None
        self._initialized = False
        self._logger = logging.getLogger(f"{__name__}.ObservabilityService")

        self._initialize_components()

    def _initialize_components(self) -> None:
        try:
            if self.tracing_config.enabled:
                self._initialize_tracing()
            self._initialized = True
        except Exception as e:
            self._logger.error(f"Failed to initialize ObservabilityService: {e}")

    def _initialize_tracing(self) -> None:
        resource = Resource.create(self.config.get_service_tags())
        self._provider = TracerProvider(resource=resource)
        if self.tracing_config.console_export:
            self._provider.add_span_processor(SimpleSpanProcessor(ConsoleSpanExporter()))
        self._tracer = self._provider.get_tracer(__name__)
        self._logger.info(f"Tracing initialized for service: {self.tracing_config.service_name}")

    @property
    def enabled(self) -> bool:
        return self._initialized and self._tracer is not None

    @property
    def tracer(self) -> trace.Tracer:
        """Get the OpenTelemetry tracer instance."""
        if not self.enabled:
            raise RuntimeError("Tracing is not enabled")
        return self._tracer

    def trace_operation(
        self,
        component: str,
        operation: str,
        attributes: Optional[Dict[str, Any]] = None
    ) -> ContextManager[Optional[Span]]:
        """
        Create a trace span for a component operation.

        Args:
            component: Package performing the operation (``planner``, ``simulator``, ...)
            operation: Name of the operation being performed
            attributes: Additional attributes to add to the span

        Returns:
            Context manager for the trace span
        """
        if not self.enabled:
            return self._noop_span_context()

        span_attributes = {
            "live.component": component,
            "live.operation": operation,
            "service.name": self.tracing_config.service_name,
        }
        if attributes:
            span_attributes.update(attributes)
        return self._enhanced_span_context(f"{component}.{operation}", span_attributes)

    @contextmanager
    def _enhanced_span_context(self, span_name: str, span_attributes: Dict[str, Any]):
        start_time = time.time()
        span = None

        try:
            span = self._tracer.start_span(span_name, attributes=span_attributes)
            with trace.use_span(span, end_on_exit=False):
                yield span
        except Exception as e:
            if span:
                span.record_exception(e)
                span.set_status(trace.Status(trace.StatusCode.ERROR, str(e)))
            raise
        else:
            if span:
                span.set_status(trace.Status(trace.StatusCode.OK))
        finally:
            if span:
                duration_ms = (time.time() - start_time) * 1000
                span.set_attribute("operation.duration_ms", duration_ms)
                span.end()

    @contextmanager
    def _noop_span_context(self):
        """No-op context manager when tracing is disabled."""
        yield None

    def shutdown(self) -> None:
        if self._provider is not None:
            self._provider.shutdown()


_service: Optional[ObservabilityService] = None


def get_observability_service() -> ObservabilityService:
    """Process-wide service built from the environment on first use."""
    global _service
    if _service is None:
        _service = ObservabilityService(create_observability_config())
    return _service


def set_observability_service(service: Optional[ObservabilityService]) -> None:
    """Replace the process-wide service (tests, CLI start-up)."""
    global _service
    _service = service


def trace_operation(
    component: str,
    operation: str,
    attributes: Optional[Dict[str, Any]] = None
) -> ContextManager[Optional[Span]]:
    """Span on the process-wide service; a no-op when tracing is off."""
    return get_observability_service().trace_operation(component, operation, attributes)
