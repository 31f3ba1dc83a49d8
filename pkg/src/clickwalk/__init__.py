"""clickwalk: turn recorded click sessions into GraphWalker model files."""

from .eventlog import EventLogRecord, MalformedRecordError, parse_event_log, replay_event_log
from .export import (
    LayoutMissingError,
    StorageError,
    ValidationReport,
    Violation,
    document_to_json,
    parse_model,
    save_mbt_json,
    validate_document,
    write_document,
)
from .layout import LayoutConfig, circle_radius, compute_degree, generate_plane_data
from .model import (
    DEFAULT_GENERATOR,
    DanglingEndpointError,
    DuplicateIdError,
    Edge,
    InvalidTitleError,
    Model,
    Session,
    SessionNotActiveError,
    UnusableNameError,
    Vertex,
    get_or_create_edge,
    get_or_create_vertex,
    new_session,
    sanitize_edge_name,
    sanitize_vertex_name,
)
from .service import RecorderService, ServiceConfig, build_http_server, serve_forever
from .watchdog import (
    InvalidDelayError,
    ManualTimerBackend,
    ThreadTimerBackend,
    WatchdogTimer,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_GENERATOR",
    "DanglingEndpointError",
    "DuplicateIdError",
    "Edge",
    "EventLogRecord",
    "InvalidDelayError",
    "InvalidTitleError",
    "LayoutConfig",
    "LayoutMissingError",
    "MalformedRecordError",
    "ManualTimerBackend",
    "Model",
    "RecorderService",
    "ServiceConfig",
    "Session",
    "SessionNotActiveError",
    "StorageError",
    "ThreadTimerBackend",
    "UnusableNameError",
    "ValidationReport",
    "Vertex",
    "Violation",
    "WatchdogTimer",
    "build_http_server",
    "circle_radius",
    "compute_degree",
    "document_to_json",
    "generate_plane_data",
    "get_or_create_edge",
    "get_or_create_vertex",
    "new_session",
    "parse_event_log",
    "parse_model",
    "replay_event_log",
    "sanitize_edge_name",
    "sanitize_vertex_name",
    "save_mbt_json",
    "serve_forever",
    "validate_document",
    "write_document",
]
