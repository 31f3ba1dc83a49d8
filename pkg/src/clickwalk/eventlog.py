"""Offline event logs: one JSON record per line, replayable into a model.

A log captures a single recording session as the server would have seen
it: a start record, then vertex/edge/keepalive records with millisecond
timestamps, optionally closed by a stop. Replaying honors the keep-alive
deadline arithmetic, so a log with a silent stretch truncates exactly
where the live watchdog would have fired.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

from .model import Model, UnusableNameError, new_session

logger = logging.getLogger(__name__)

RECORD_TYPES = ("start", "vertex", "edge", "keepalive", "stop")
_NAMED_TYPES = ("start", "vertex", "edge")


class MalformedRecordError(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


@dataclass(frozen=True)
class EventLogRecord:
    t: float
    type: str
    name: str | None = None


def parse_event_log(text: str) -> list[EventLogRecord]:
    """Parse and check a newline-delimited event log.

    Enforced: every line is a JSON object with a numeric non-decreasing
    "t" and a known "type"; the first record is the only start; start,
    vertex and edge records carry a "name". Blank lines are skipped.
    """
    records: list[EventLogRecord] = []
    last_t: float | None = None
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecordError(line_no, f"not valid JSON: {exc.msg}") from exc
        if not isinstance(raw, dict):
            raise MalformedRecordError(line_no, "record must be a JSON object")
        rtype = raw.get("type")
        if rtype not in RECORD_TYPES:
            raise MalformedRecordError(line_no, f"unknown record type {rtype!r}")
        t = raw.get("t")
        if not isinstance(t, (int, float)) or isinstance(t, bool) or t < 0:
            raise MalformedRecordError(line_no, '"t" must be a non-negative number')
        if last_t is not None and t < last_t:
            raise MalformedRecordError(line_no, f'"t" decreased from {last_t} to {t}')
        last_t = t
        name = raw.get("name")
        if rtype in _NAMED_TYPES:
            if not isinstance(name, str) or not name.strip():
                raise MalformedRecordError(line_no, f'{rtype} record needs a "name"')
        else:
            name = None
        if not records:
            if rtype != "start":
                raise MalformedRecordError(line_no, "first record must have type start")
        elif rtype == "start":
            raise MalformedRecordError(line_no, "only one start record is allowed")
        records.append(EventLogRecord(t=float(t), type=rtype, name=name))
    if not records:
        raise MalformedRecordError(1, "log is empty: missing start record")
    return records


def replay_event_log(
    records: list[EventLogRecord], keep_alive_timeout_ms: float = 10_000
) -> Model:
    """Batch-replay a parsed log into a finalized model.

    The watchdog is simulated as a deadline: it starts at the start
    record and only a keepalive pushes it out. The first record on or
    past the deadline loses the race — the session is finalized at the
    deadline and everything after it is dropped, mirroring the live
    server's NO_SESSION answers. Labels that sanitize to nothing are
    skipped the same way the server rejects them without killing the
    session.
    """
    start = records[0]
    session = new_session(start.name)
    deadline = start.t + keep_alive_timeout_ms
    for record in records[1:]:
        if record.t >= deadline:
            logger.info(
                "keep-alive deadline %.0f ms passed before record at %.0f ms; truncating",
                deadline,
                record.t,
            )
            break
        if record.type == "keepalive":
            deadline = record.t + keep_alive_timeout_ms
        elif record.type == "vertex":
            try:
                session.record_vertex(record.name)
            except UnusableNameError:
                logger.warning("skipping unusable vertex label %r", record.name)
        elif record.type == "edge":
            try:
                session.record_edge(record.name)
            except UnusableNameError:
                logger.warning("skipping unusable edge label %r", record.name)
        elif record.type == "stop":
            break
    return session.finalize()
