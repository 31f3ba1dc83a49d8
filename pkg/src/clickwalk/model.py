"""Incremental MBT model construction from a stream of vertex/edge events.

A recording session consumes raw UI event labels and stitches them into a
state-transition graph: page states become vertices ("v_" prefix), user
actions become edges ("e_" prefix). States and actions are deduplicated,
and an edge is attached between the previous state and the state that
follows it.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

logger = logging.getLogger(__name__)

VERTEX_PREFIX = "v_"
EDGE_PREFIX = "e_"

#: Traverse edges in random order until every edge has been covered once.
DEFAULT_GENERATOR = "random(edge_coverage(100))"

_LOADED_EDGE_PREFIX = "e_LOADED_"


class InvalidTitleError(ValueError):
    """Session title is empty or whitespace-only."""


class UnusableNameError(ValueError):
    """A raw label sanitizes down to nothing usable."""


class DanglingEndpointError(KeyError):
    """An edge or lookup references a vertex id not present in the model."""


class SessionNotActiveError(RuntimeError):
    """An event arrived for a session that is already finalized."""


class DuplicateIdError(ValueError):
    """An explicitly supplied element id is already taken in the model."""


def sanitize_vertex_name(raw: str) -> str:
    """Normalize a raw page label into a "v_"-prefixed vertex name.

    Each whitespace-separated word is capitalized at its first letter,
    the words are concatenated, and anything outside [A-Za-z0-9] is
    dropped. An input that already carries the "v_" prefix is not
    prefixed twice, which makes the function idempotent.
    """
    if raw.startswith(VERTEX_PREFIX):
        raw = raw[len(VERTEX_PREFIX):]
    words = raw.split()
    camel = "".join(w[:1].upper() + w[1:] for w in words)
    cleaned = re.sub(r"[^A-Za-z0-9]", "", camel)
    if not cleaned:
        raise UnusableNameError(f"label {raw!r} leaves no usable vertex name")
    return VERTEX_PREFIX + cleaned


def sanitize_edge_name(raw: str) -> str:
    """Normalize a raw action label into an "e_"-prefixed edge name.

    The label is uppercased and anything outside [A-Z0-9] is dropped.
    Idempotent on already-prefixed input.
    """
    if raw.startswith(EDGE_PREFIX):
        raw = raw[len(EDGE_PREFIX):]
    cleaned = re.sub(r"[^A-Z0-9]", "", raw.upper())
    if not cleaned:
        raise UnusableNameError(f"label {raw!r} leaves no usable edge name")
    return EDGE_PREFIX + cleaned


@dataclass
class Vertex:
    """A UI state. Coordinates stay unset until layout runs."""

    id: str
    name: str
    x: float | None = None
    y: float | None = None
    degree: int = 0


@dataclass
class Edge:
    """A user action from one state to another (self-loops allowed)."""

    id: str
    name: str
    source_vertex_id: str
    target_vertex_id: str


class Model:
    """A named graph of vertices and edges plus traversal metadata.

    Vertices are unique by name; edges are unique by the
    (name, source, target) triple. Element ids are unique across both
    kinds. Generated ids are sequential ("n1", "n2", ... / "e1", "e2",
    ...) in creation order; explicit ids are accepted as opaque strings.
    """

    def __init__(self, name: str, generator: str = DEFAULT_GENERATOR):
        self.name = name
        self.generator = generator
        self.start_element_id: str | None = None
        self.vertices: list[Vertex] = []
        self.edges: list[Edge] = []
        self._vertices_by_name: dict[str, Vertex] = {}
        self._vertices_by_id: dict[str, Vertex] = {}
        self._edges_by_triple: dict[tuple[str, str, str], Edge] = {}
        self._used_ids: set[str] = set()
        self._next_vertex = 1
        self._next_edge = 1

    def vertex_by_id(self, vertex_id: str) -> Vertex:
        try:
            return self._vertices_by_id[vertex_id]
        except KeyError:
            raise DanglingEndpointError(f"unknown vertex id {vertex_id!r}") from None

    def vertex_by_name(self, name: str) -> Vertex | None:
        return self._vertices_by_name.get(name)

    def add_vertex(self, name: str, vertex_id: str | None = None) -> Vertex:
        """Fetch the vertex with this name, or create it.

        The name must already be sanitized. When ``vertex_id`` is given it
        is used verbatim for a newly created vertex; otherwise the next
        sequential "n<k>" id is assigned.
        """
        if not name.startswith(VERTEX_PREFIX) or len(name) <= len(VERTEX_PREFIX):
            raise ValueError(f"vertex name must be 'v_<something>', got {name!r}")
        existing = self._vertices_by_name.get(name)
        if existing is not None:
            return existing
        vid = self._claim_id(vertex_id, "n")
        vertex = Vertex(id=vid, name=name)
        self.vertices.append(vertex)
        self._vertices_by_name[name] = vertex
        self._vertices_by_id[vid] = vertex
        return vertex

    def add_edge(
        self,
        name: str,
        source_vertex_id: str,
        target_vertex_id: str,
        edge_id: str | None = None,
    ) -> Edge:
        """Fetch the edge with this (name, source, target), or create it.

        Both endpoints must already exist in the model. Degrees of the
        endpoint vertices are bumped only when a new edge is created; a
        self-loop contributes 2 to its vertex.
        """
        if not name.startswith(EDGE_PREFIX):
            raise ValueError(f"edge name must be 'e_<something>', got {name!r}")
        source = self.vertex_by_id(source_vertex_id)
        target = self.vertex_by_id(target_vertex_id)
        triple = (name, source_vertex_id, target_vertex_id)
        existing = self._edges_by_triple.get(triple)
        if existing is not None:
            return existing
        eid = self._claim_id(edge_id, "e")
        edge = Edge(
            id=eid,
            name=name,
            source_vertex_id=source_vertex_id,
            target_vertex_id=target_vertex_id,
        )
        self.edges.append(edge)
        self._edges_by_triple[triple] = edge
        source.degree += 1
        target.degree += 1
        return edge

    def _claim_id(self, explicit: str | None, prefix: str) -> str:
        if explicit is not None:
            if explicit in self._used_ids:
                raise DuplicateIdError(f"id {explicit!r} already used in model")
            self._bump_counter_past(explicit, prefix)
            self._used_ids.add(explicit)
            return explicit
        while True:
            if prefix == "n":
                candidate = f"n{self._next_vertex}"
                self._next_vertex += 1
            else:
                candidate = f"e{self._next_edge}"
                self._next_edge += 1
            if candidate not in self._used_ids:
                self._used_ids.add(candidate)
                return candidate

    def _bump_counter_past(self, explicit: str, prefix: str) -> None:
        # Keep generated ids from colliding with explicit "n<k>"/"e<k>" ids.
        m = re.fullmatch(re.escape(prefix) + r"(\d+)", explicit)
        if not m:
            return
        ordinal = int(m.group(1))
        if prefix == "n":
            self._next_vertex = max(self._next_vertex, ordinal + 1)
        else:
            self._next_edge = max(self._next_edge, ordinal + 1)


def get_or_create_vertex(model: Model, name: str) -> Vertex:
    return model.add_vertex(name)


def get_or_create_edge(
    model: Model, name: str, source_vertex_id: str, target_vertex_id: str
) -> Edge:
    return model.add_edge(name, source_vertex_id, target_vertex_id)


@dataclass
class Session:
    """Live recording context around a model under construction.

    The session keeps a cursor on the most recent state and buffers the
    latest action label until the state it leads to arrives. State only
    moves Recording -> Finalized, never back.
    """

    model: Model
    current_vertex_id: str | None = None
    pending_edge_label: str | None = None
    finalized: bool = field(default=False)

    def _require_active(self):
        if self.finalized:
            raise SessionNotActiveError("session already finalized")

    def record_vertex(self, raw_label: str) -> str:
        """Register a page state and stitch it to the previous one.

        Rules, in order:
          - a buffered action becomes the edge into this state (a
            self-loop when no state preceded it);
          - with nothing buffered, arriving at a *different* state
            synthesizes an "e_LOADED_<STATE>" navigation edge so the
            model stays traversable;
          - re-observing the current state with nothing buffered is a
            no-op.
        The first state ever recorded becomes the model's start element.
        Returns the id of the (possibly pre-existing) vertex.
        """
        self._require_active()
        name = sanitize_vertex_name(raw_label)
        first_vertex = self.current_vertex_id is None
        vertex = self.model.add_vertex(name)
        if self.pending_edge_label is not None:
            source = self.current_vertex_id or vertex.id
            self.model.add_edge(self.pending_edge_label, source, vertex.id)
            self.pending_edge_label = None
        elif self.current_vertex_id is not None and self.current_vertex_id != vertex.id:
            loaded = _LOADED_EDGE_PREFIX + vertex.name[len(VERTEX_PREFIX):].upper()
            self.model.add_edge(loaded, self.current_vertex_id, vertex.id)
        if first_vertex:
            self.model.start_element_id = vertex.id
        self.current_vertex_id = vertex.id
        return vertex.id

    def record_edge(self, raw_label: str) -> None:
        """Buffer a user action until the state it leads to arrives.

        Two actions in a row mean the first one changed no state: it is
        resolved as a self-loop on the current vertex before the new
        label is buffered. With no state recorded yet there is nothing
        to loop on, so an older buffered label is dropped.
        """
        self._require_active()
        name = sanitize_edge_name(raw_label)
        self._flush_pending_edge()
        self.pending_edge_label = name

    def finalize(self) -> Model:
        """Resolve any buffered action and seal the session.

        A second call is rejected rather than double-finalized.
        """
        self._require_active()
        self._flush_pending_edge()
        self.finalized = True
        return self.model

    def _flush_pending_edge(self):
        if self.pending_edge_label is None:
            return
        if self.current_vertex_id is not None:
            self.model.add_edge(
                self.pending_edge_label, self.current_vertex_id, self.current_vertex_id
            )
        else:
            logger.warning(
                "discarding action %r: no state to attach it to",
                self.pending_edge_label,
            )
        self.pending_edge_label = None


def new_session(title: str) -> Session:
    """Open a Recording session around an empty model named ``title``."""
    title = title.strip()
    if not title:
        raise InvalidTitleError("session title must be non-empty")
    return Session(model=Model(name=title))
