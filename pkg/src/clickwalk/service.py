"""HTTP recording service with an auto-finalizing keep-alive watchdog.

One session may be live at a time. Events mutate it under a single lock;
the watchdog expiry, an explicit stop, or a preempting start all funnel
into the same finalize -> layout -> export -> save pipeline.

The wire protocol is deliberately tiny: five form-encoded POST endpoints
answering fixed plain-text bodies, permissive CORS on everything so the
capture script can post cross-origin from the page under test.
"""

from __future__ import annotations

import logging
import threading
import urllib.parse
from dataclasses import dataclass, field
from email.parser import BytesParser
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .export import StorageError, parse_model, save_mbt_json
from .layout import LayoutConfig, generate_plane_data
from .model import Model, Session, UnusableNameError, new_session
from .watchdog import InvalidDelayError, WatchdogTimer

logger = logging.getLogger(__name__)

DEFAULT_PORT = 8496
DEFAULT_KEEP_ALIVE_TIMEOUT_MS = 10_000


@dataclass
class ServiceConfig:
    port: int = DEFAULT_PORT
    keep_alive_timeout_ms: float = DEFAULT_KEEP_ALIVE_TIMEOUT_MS
    out_dir: Path = Path(".")
    layout: LayoutConfig = field(default_factory=LayoutConfig)


class RecorderService:
    """Owns the single active session and its watchdog.

    All public methods return an (http_status, body) pair so the HTTP
    layer stays a dumb pipe and tests can drive the service directly.
    """

    def __init__(self, config: ServiceConfig, timer_backend=None):
        if config.keep_alive_timeout_ms <= 0:
            raise InvalidDelayError("keep-alive timeout must be greater than 0 ms")
        self.config = config
        self._lock = threading.Lock()
        self._session: Session | None = None
        self._watchdog = WatchdogTimer(
            config.keep_alive_timeout_ms, self._on_expiry, backend=timer_backend
        )
        self.last_saved_path: Path | None = None
        self.last_model: Model | None = None

    def start_recording(self, title: str | None) -> tuple[int, str]:
        if title is None or not title.strip():
            return 400, "MISSING_TITLE"
        with self._lock:
            if self._session is not None and not self._session.finalized:
                # Preemption: flush the interrupted session before starting over.
                try:
                    self._finalize_locked()
                except StorageError:
                    logger.exception("failed to flush preempted session")
            self._session = new_session(title)
            if not self._watchdog.reset():
                self._watchdog.start()
        return 200, "STARTED"

    def vertex_event(self, name: str | None) -> tuple[int, str]:
        return self._record_event(name, kind="vertex")

    def edge_event(self, name: str | None) -> tuple[int, str]:
        return self._record_event(name, kind="edge")

    def _record_event(self, name: str | None, kind: str) -> tuple[int, str]:
        if name is None or not name.strip():
            return 400, "MISSING_NAME"
        with self._lock:
            if self._session is None or self._session.finalized:
                return 409, "NO_SESSION"
            try:
                if kind == "vertex":
                    self._session.record_vertex(name)
                else:
                    self._session.record_edge(name)
            except UnusableNameError:
                return 400, "BAD_NAME"
        return 200, "OK"

    def keepalive(self) -> tuple[int, str]:
        with self._lock:
            if self._session is None or self._session.finalized:
                return 200, "NO_SESSION"
            self._watchdog.reset()
        return 200, "ALIVE"

    def stop_recording(self) -> tuple[int, str]:
        with self._lock:
            if self._session is None or self._session.finalized:
                return 409, "NO_SESSION"
            try:
                self._finalize_locked()
            except StorageError:
                logger.exception("failed to save model on stop")
                return 500, "STORAGE_FAILURE"
        return 200, "STOPPED"

    def shutdown(self) -> None:
        """Flush any live session and disarm the watchdog."""
        with self._lock:
            if self._session is not None and not self._session.finalized:
                try:
                    self._finalize_locked()
                except StorageError:
                    logger.exception("failed to flush session on shutdown")
            self._watchdog.cancel()

    def _on_expiry(self) -> None:
        with self._lock:
            if self._session is None or self._session.finalized:
                return
            logger.info("keep-alive timeout: finalizing session %r", self._session.model.name)
            try:
                self._finalize_locked()
            except StorageError:
                logger.exception("failed to save model on watchdog expiry")

    def _finalize_locked(self) -> None:
        # The session is sealed before any I/O, so a storage failure still
        # leaves it rejecting further events.
        session = self._session
        self._session = None
        self._watchdog.cancel()
        model = session.finalize()
        self.last_model = model
        generate_plane_data(model, self.config.layout)
        document = parse_model(model)
        self.last_saved_path = save_mbt_json(document, model.name, self.config.out_dir)
        logger.info("saved model %r to %s", model.name, self.last_saved_path)


def _parse_multipart_form(body: bytes, content_type: str) -> dict[str, str]:
    header = f"Content-Type: {content_type}\r\nMIME-Version: 1.0\r\n\r\n"
    message = BytesParser().parsebytes(header.encode("ascii") + body)
    fields: dict[str, str] = {}
    if message.is_multipart():
        for part in message.get_payload():
            name = part.get_param("name", header="content-disposition")
            if name:
                payload = part.get_payload(decode=True) or b""
                fields[name] = payload.decode("utf-8", errors="replace")
    return fields


class _RecorderRequestHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    # one buffered write per response; avoids Nagle/delayed-ACK stalls
    wbufsize = -1
    disable_nagle_algorithm = True
    service: RecorderService  # injected by build_http_server

    def _read_form(self) -> dict[str, str]:
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length) if length else b""
        content_type = (self.headers.get("Content-Type") or "").lower()
        fields: dict[str, str] = {}
        query = urllib.parse.urlsplit(self.path).query
        if query:
            fields.update(
                (k, v[-1]) for k, v in urllib.parse.parse_qs(query).items()
            )
        if content_type.startswith("multipart/form-data"):
            fields.update(
                _parse_multipart_form(body, self.headers.get("Content-Type"))
            )
        elif body:
            # urlencoded, or a bare body we can try to read the same way
            parsed = urllib.parse.parse_qs(body.decode("utf-8", errors="replace"))
            fields.update((k, v[-1]) for k, v in parsed.items())
        return fields

    def _respond(self, status: int, body: str) -> None:
        payload = body.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "text/plain; charset=utf-8")
        self.send_header("Content-Length", str(len(payload)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(payload)

    def do_OPTIONS(self):  # noqa: N802 (http.server naming)
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Max-Age", "86400")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_POST(self):  # noqa: N802
        route = urllib.parse.urlsplit(self.path).path
        try:
            form = self._read_form()
            if route == "/startrec":
                status, body = self.service.start_recording(form.get("title"))
            elif route == "/vertex":
                status, body = self.service.vertex_event(form.get("name"))
            elif route == "/edge":
                status, body = self.service.edge_event(form.get("name"))
            elif route == "/keepalive":
                status, body = self.service.keepalive()
            elif route == "/stoprec":
                status, body = self.service.stop_recording()
            else:
                status, body = 404, "NOT_FOUND"
        except Exception:
            logger.exception("unhandled error on %s", route)
            status, body = 500, "INTERNAL_ERROR"
        self._respond(status, body)

    def log_message(self, format, *args):
        logger.debug("%s - %s", self.address_string(), format % args)


def build_http_server(
    service: RecorderService, host: str = "0.0.0.0", port: int | None = None
) -> ThreadingHTTPServer:
    """Bind a threaded HTTP server wired to the given service."""
    handler = type(
        "RecorderRequestHandler", (_RecorderRequestHandler,), {"service": service}
    )
    return ThreadingHTTPServer((host, port if port is not None else service.config.port), handler)


def serve_forever(service: RecorderService, host: str = "0.0.0.0") -> None:
    """Run the service until interrupted, flushing any live session on exit."""
    server = build_http_server(service, host)
    logger.info("recording service listening on port %d", server.server_address[1])
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
        service.shutdown()
