"""Shared helpers."""

from .random_streams import robot_stream, robot_streams

__all__ = ["robot_stream", "robot_streams"]
