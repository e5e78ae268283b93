"""
Configuration management for the LIVE multi-robot search stack.
"""

from functools import lru_cache

from pydantic import AliasChoices, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class LiveSearchSettings(BaseSettings):
    """Process-wide settings read from the environment and ``.env``."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
        populate_by_name=True,
    )

    # Logging and tracing
    log_level: str = Field(default="info", validation_alias=AliasChoices("LIVE_LOG", "log_level"))
    tracing_enabled: bool = Field(default=False, validation_alias=AliasChoices("LIVE_TRACING", "tracing_enabled"))
    trace_console: bool = Field(default=False, validation_alias=AliasChoices("LIVE_TRACE_CONSOLE", "trace_console"))

    # Data locations
    data_dir: str = Field(default="data", validation_alias=AliasChoices("LIVE_DATA_DIR", "data_dir"))
    default_out_dir: str = Field(default="out", validation_alias=AliasChoices("LIVE_OUT_DIR", "default_out_dir"))

    # Batch execution
    batch_workers: int = Field(default=1, ge=1, validation_alias=AliasChoices("LIVE_BATCH_WORKERS", "batch_workers"))

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        level = v.strip().lower()
        if level not in ("error", "info", "debug"):
            raise ValueError("log_level must be one of error, info, debug")
        return level


@lru_cache(maxsize=1)
def get_settings() -> LiveSearchSettings:
    """Build the process settings on first use; raises ValidationError on bad environment values."""
    return LiveSearchSettings()
