"""
Experiment harness: batch runner, networked coordination server and client, CLI.
"""

from .protocol import (
    HEADER_SIZE,
    MAX_MESSAGE_SIZE,
    MESSAGE_TYPES,
    Ack,
    Done,
    Plan,
    Register,
    Update,
    ProtocolError,
    TruncatedFrameError,
    UnknownMessageTypeError,
    MissingFieldError,
    MalformedPayloadError,
    FrameTooLargeError,
    LockstepViolationError,
    TransportError,
    encode_message,
    decode_message,
    read_message,
    write_message,
)
from .server import CoordinationServer, parse_address, serve, serve_with_local_clients
from .client import run_client
from .batch import (
    RESULT_COLUMNS,
    REPORT_COLUMNS,
    AggregateReport,
    BatchCell,
    ExperimentMatrix,
    ScenarioFactory,
    TrialRecord,
    load_experiment_matrix,
    run_batch,
    write_csv,
    write_results_csv,
)
from .plotting import render_trial

__all__ = [
    "HEADER_SIZE",
    "MAX_MESSAGE_SIZE",
    "MESSAGE_TYPES",
    "Ack",
    "Done",
    "Plan",
    "Register",
    "Update",
    "ProtocolError",
    "TruncatedFrameError",
    "UnknownMessageTypeError",
    "MissingFieldError",
    "MalformedPayloadError",
    "FrameTooLargeError",
    "LockstepViolationError",
    "TransportError",
    "encode_message",
    "decode_message",
    "read_message",
    "write_message",
    "CoordinationServer",
    "parse_address",
    "serve",
    "serve_with_local_clients",
    "run_client",
    "RESULT_COLUMNS",
    "REPORT_COLUMNS",
    "AggregateReport",
    "BatchCell",
    "ExperimentMatrix",
    "ScenarioFactory",
    "TrialRecord",
    "load_experiment_matrix",
    "run_batch",
    "write_csv",
    "write_results_csv",
    "render_trial",
]
