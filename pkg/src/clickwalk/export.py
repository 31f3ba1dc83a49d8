"""Serialization of laid-out models into GraphWalker-style JSON files.

The on-disk document is a {"models": [...]} object holding exactly one
model: its vertices carry coordinates under "properties", its edges
reference vertex ids via "sourceVertexId"/"targetVertexId".
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .model import EDGE_PREFIX, VERTEX_PREFIX, Model


class LayoutMissingError(RuntimeError):
    """The model still has vertices without coordinates."""


class StorageError(OSError):
    """Writing the model file failed."""


def parse_model(model: Model) -> dict:
    """Map a finalized, laid-out model onto its file document.

    Vertex and edge order is creation order. Raises when any vertex is
    missing coordinates, since a model file without geometry cannot be
    visualized.
    """
    vertices = []
    for v in model.vertices:
        if v.x is None or v.y is None:
            raise LayoutMissingError(f"vertex {v.id} has no coordinates; run layout first")
        vertices.append(
            {"id": v.id, "name": v.name, "properties": {"x": v.x, "y": v.y}}
        )
    edges = [
        {
            "id": e.id,
            "name": e.name,
            "sourceVertexId": e.source_vertex_id,
            "targetVertexId": e.target_vertex_id,
        }
        for e in model.edges
    ]
    doc_model: dict = {"name": model.name, "generator": model.generator}
    if model.start_element_id is not None:
        doc_model["startElementId"] = model.start_element_id
    doc_model["vertices"] = vertices
    doc_model["edges"] = edges
    return {"models": [doc_model]}


def document_to_json(document: dict) -> str:
    """Render a document deterministically; floats keep full precision."""
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def write_document(document: dict, path: Path) -> Path:
    path = Path(path)
    try:
        path.write_text(document_to_json(document), encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot write model file {path}: {exc}") from exc
    return path


def sanitize_file_name(model_name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_-]", "_", model_name)


def save_mbt_json(document: dict, model_name: str, out_dir: Path | str) -> Path:
    """Persist the document as "<sanitized model name>.json" under out_dir.

    An existing file of the same name is overwritten.
    """
    out_dir = Path(out_dir)
    return write_document(document, out_dir / (sanitize_file_name(model_name) + ".json"))


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self):
        return f"{self.code}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation]

    @property
    def is_valid(self) -> bool:
        return not self.violations


def validate_document(text: str) -> ValidationReport:
    """Check raw file contents against the model-file schema.

    All failures come back as report entries; an empty report means the
    file is accepted.
    """
    violations: list[Violation] = []

    def flag(code: str, message: str):
        violations.append(Violation(code, message))

    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        flag("syntax", f"not valid JSON: {exc}")
        return ValidationReport(violations)

    if not isinstance(document, dict) or "models" not in document:
        flag("missing_field", 'document must be an object with a "models" list')
        return ValidationReport(violations)
    models = document["models"]
    if not isinstance(models, list) or not models:
        flag("missing_field", '"models" must be a non-empty list')
        return ValidationReport(violations)
    if len(models) != 1:
        flag("model_count", f"expected exactly one model, found {len(models)}")

    for model in models:
        if not isinstance(model, dict):
            flag("missing_field", "model entry must be an object")
            continue
        _validate_model(model, flag)
    return ValidationReport(violations)


def _validate_model(model: dict, flag) -> None:
    for field_name in ("name", "generator"):
        if not isinstance(model.get(field_name), str):
            flag("missing_field", f'model is missing string field "{field_name}"')
    vertices = model.get("vertices")
    edges = model.get("edges")
    if not isinstance(vertices, list):
        flag("missing_field", 'model is missing list field "vertices"')
        vertices = []
    if not isinstance(edges, list):
        flag("missing_field", 'model is missing list field "edges"')
        edges = []

    seen_ids: set[str] = set()
    vertex_ids: set[str] = set()

    def check_id(element_id, what: str) -> None:
        if not isinstance(element_id, str) or not element_id:
            flag("missing_field", f"{what} has no id")
            return
        if element_id in seen_ids:
            flag("duplicate_id", f"id {element_id!r} used more than once")
        seen_ids.add(element_id)

    for i, vertex in enumerate(vertices):
        what = f"vertex #{i}"
        if not isinstance(vertex, dict):
            flag("missing_field", f"{what} must be an object")
            continue
        check_id(vertex.get("id"), what)
        if isinstance(vertex.get("id"), str):
            vertex_ids.add(vertex["id"])
        name = vertex.get("name")
        if not isinstance(name, str):
            flag("missing_field", f"{what} has no name")
        elif not (name.startswith(VERTEX_PREFIX) and len(name) > len(VERTEX_PREFIX)):
            flag("name_prefix", f"vertex name {name!r} lacks the \"v_\" prefix")
        props = vertex.get("properties")
        if not isinstance(props, dict):
            flag("missing_field", f"{what} has no properties object")
        else:
            for axis in ("x", "y"):
                if not isinstance(props.get(axis), (int, float)) or isinstance(
                    props.get(axis), bool
                ):
                    flag("missing_field", f"{what} properties lack numeric {axis!r}")

    for i, edge in enumerate(edges):
        what = f"edge #{i}"
        if not isinstance(edge, dict):
            flag("missing_field", f"{what} must be an object")
            continue
        check_id(edge.get("id"), what)
        name = edge.get("name")
        if not isinstance(name, str):
            flag("missing_field", f"{what} has no name")
        elif not name.startswith(EDGE_PREFIX):
            flag("name_prefix", f"edge name {name!r} lacks the \"e_\" prefix")
        for endpoint in ("sourceVertexId", "targetVertexId"):
            value = edge.get(endpoint)
            if not isinstance(value, str):
                flag("missing_field", f"{what} has no {endpoint}")
            elif value not in vertex_ids:
                edge_id = edge.get("id", f"#{i}")
                flag(
                    "dangling_endpoint",
                    f"edge {edge_id!r} {endpoint}={value!r} matches no vertex",
                )

    start = model.get("startElementId")
    if start is not None and start not in vertex_ids:
        flag("start_element", f"startElementId {start!r} matches no vertex")
