"""
Framed wire protocol between the coordination server and robot clients.

Frame: 4-byte big-endian unsigned payload length, then a UTF-8 JSON object
with a ``type`` field naming the message variant.
"""

import asyncio
import json
import struct
from typing import Annotated, List, Literal, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from ..geometry import Pose2
from ..planner import RobotSpec
from ..simulator import RobotUpdate

HEADER = struct.Struct(">I")
HEADER_SIZE = HEADER.size
MAX_MESSAGE_SIZE = 16 * 1024 * 1024

PoseTuple = Tuple[float, float, float]


class ProtocolError(Exception):
    """Base class of every wire protocol failure."""


class TruncatedFrameError(ProtocolError):
    """Fewer bytes than the header declares."""


class UnknownMessageTypeError(ProtocolError):
    """The payload's ``type`` names no message variant."""


class MissingFieldError(ProtocolError):
    """A required field (or ``type`` itself) is absent."""


class MalformedPayloadError(ProtocolError):
    """The payload is not a JSON object of valid field values."""


class FrameTooLargeError(ProtocolError):
    """The declared payload length exceeds MAX_MESSAGE_SIZE."""


class LockstepViolationError(ProtocolError):
    """A message arrived out of the lockstep order."""


class TransportError(ProtocolError):
    """The peer disconnected."""


class _Message(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class Register(_Message):
    type: Literal["Register"] = "Register"
    robot: str
    spec: RobotSpec


class Plan(_Message):
    type: Literal["Plan"] = "Plan"
    robot: str
    viewpoints: List[PoseTuple]


class Update(_Message):
    type: Literal["Update"] = "Update"
    robot: str
    tick: int
    believed_pose: PoseTuple
    lidar_footprint_pose: PoseTuple
    camera_footprint_pose: PoseTuple
    true_pose: PoseTuple
    travelled: float
    detections: List[str]
    candidates: List[str]
    wm_state: str
    events: List[str]
    done: bool
    priority_count: int
    skipped: int

    @classmethod
    def from_robot_update(cls, name: str, update: RobotUpdate) -> "Update":
        return cls(
            robot=name,
            tick=update.tick,
            believed_pose=update.believed_pose.as_tuple(),
            lidar_footprint_pose=update.lidar_footprint_pose.as_tuple(),
            camera_footprint_pose=update.camera_footprint_pose.as_tuple(),
            true_pose=update.true_pose.as_tuple(),
            travelled=update.travelled,
            detections=list(update.detections),
            candidates=list(update.candidates),
            wm_state=update.wm_state,
            events=list(update.events),
            done=update.done,
            priority_count=update.priority_count,
            skipped=update.skipped,
        )

    def to_robot_update(self, index: int) -> RobotUpdate:
        return RobotUpdate(
            robot=index,
            tick=self.tick,
            true_pose=Pose2(*self.true_pose),
            believed_pose=Pose2(*self.believed_pose),
            lidar_footprint_pose=Pose2(*self.lidar_footprint_pose),
            camera_footprint_pose=Pose2(*self.camera_footprint_pose),
            travelled=self.travelled,
            detections=tuple(self.detections),
            candidates=tuple(self.candidates),
            wm_state=self.wm_state,
            events=tuple(self.events),
            done=self.done,
            priority_count=self.priority_count,
            skipped=self.skipped,
        )


class Ack(_Message):
    type: Literal["Ack"] = "Ack"
    tick: int
    stop: bool = False
    observed_cells: List[int] = Field(default_factory=list)


class Done(_Message):
    type: Literal["Done"] = "Done"
    robot: str


Message = Annotated[Union[Register, Plan, Update, Ack, Done], Field(discriminator="type")]
MESSAGE_TYPES = {"Register": Register, "Plan": Plan, "Update": Update, "Ack": Ack, "Done": Done}
_MESSAGE_ADAPTER = TypeAdapter(Message)


def encode_payload(message: _Message) -> bytes:
    return json.dumps(message.model_dump(mode="json"), separators=(",", ":")).encode("utf-8")


def encode_message(message: _Message) -> bytes:
    """Frame a message: length header plus JSON payload."""
    payload = encode_payload(message)
    if len(payload) > MAX_MESSAGE_SIZE:
        raise FrameTooLargeError(f"payload of {len(payload)} bytes exceeds {MAX_MESSAGE_SIZE}")
    return HEADER.pack(len(payload)) + payload


def decode_payload(payload: bytes) -> _Message:
    """
    Parse a JSON payload into its message variant.

    Raises:
        MalformedPayloadError: Not UTF-8 JSON, not an object, or a bad field value.
        MissingFieldError: ``type`` or a required field is absent.
        UnknownMessageTypeError: ``type`` names no variant.
    """
    try:
        data = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise MalformedPayloadError(f"payload is not UTF-8 JSON: {e}") from e
    if not isinstance(data, dict):
        raise MalformedPayloadError("payload must be a JSON object")
    if "type" not in data:
        raise MissingFieldError("payload has no 'type' field")
    if data["type"] not in MESSAGE_TYPES:
        raise UnknownMessageTypeError(f"unknown message type {data['type']!r}")
    try:
        return _MESSAGE_ADAPTER.validate_python(data)
    except ValidationError as e:
        missing = [err["loc"] for err in e.errors() if err["type"] == "missing"]
        if missing:
            raise MissingFieldError(f"{data['type']} is missing {missing}") from e
        raise MalformedPayloadError(f"invalid {data['type']}: {e.errors()[0]['msg']}") from e


def decode_message(frame: bytes) -> _Message:
    """
    Decode exactly one complete frame.

    Raises:
        TruncatedFrameError: Header or payload shorter than declared.
        FrameTooLargeError: Declared length above MAX_MESSAGE_SIZE.
        ProtocolError: Bytes left over after the payload, or any payload error.
    """
    if len(frame) < HEADER_SIZE:
        raise TruncatedFrameError(f"frame of {len(frame)} bytes has no complete header")
    (length,) = HEADER.unpack_from(frame)
    if length > MAX_MESSAGE_SIZE:
        raise FrameTooLargeError(f"declared length {length} exceeds {MAX_MESSAGE_SIZE}")
    available = len(frame) - HEADER_SIZE
    if available < length:
        raise TruncatedFrameError(f"frame declares {length} bytes, {available} available")
    if available > length:
        raise ProtocolError(f"{available - length} trailing bytes after frame")
    return decode_payload(frame[HEADER_SIZE:])


async def read_message(reader: asyncio.StreamReader) -> _Message:
    """Read one frame from a stream."""
    try:
        header = await reader.readexactly(HEADER_SIZE)
    except asyncio.IncompleteReadError as e:
        if not e.partial:
            raise TransportError("peer closed the connection") from e
        raise TruncatedFrameError("connection closed inside a frame header") from e
    except (ConnectionError, OSError) as e:
        raise TransportError(f"receive failed: {e}") from e
    (length,) = HEADER.unpack(header)
    if length > MAX_MESSAGE_SIZE:
        raise FrameTooLargeError(f"declared length {length} exceeds {MAX_MESSAGE_SIZE}")
    try:
        payload = await reader.readexactly(length)
    except asyncio.IncompleteReadError as e:
        raise TruncatedFrameError(f"connection closed after {len(e.partial)} of {length} payload bytes") from e
    return decode_payload(payload)


async def write_message(writer: asyncio.StreamWriter, message: _Message) -> None:
    writer.write(encode_message(message))
    try:
        await writer.drain()
    except (ConnectionError, OSError) as e:
        raise TransportError(f"send failed: {e}") from e


def expect(message: _Message, kind: type) -> _Message:
    """Raise unless ``message`` is of the expected variant."""
    if not isinstance(message, kind):
        raise LockstepViolationError(f"expected {kind.__name__}, got {message.type}")
    return message
