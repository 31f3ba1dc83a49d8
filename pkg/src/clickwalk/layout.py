"""Circular coordinate assignment for model vertices.

Vertices are placed on a single origin-centered circle, ordered by how
many edge endpoints touch them, with the circle sized so that two
adjacent vertices sit a fixed minimum distance apart.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .model import DanglingEndpointError, Model

__all__ = ["LayoutConfig", "compute_degree", "circle_radius", "generate_plane_data"]


@dataclass(frozen=True)
class LayoutConfig:
    minimum_separation: float = 400.0
    rotation_offset: float = 90.0

    def __post_init__(self):
        if self.minimum_separation <= 0:
            raise ValueError("minimum_separation must be > 0")
        if not 0.0 <= self.rotation_offset < 360.0:
            raise ValueError("rotation_offset must be in [0, 360)")


def compute_degree(model: Model, vertex_id: str) -> int:
    """Count edge endpoints incident to a vertex; a self-loop counts 2.

    The count is also cached on the vertex itself.
    """
    vertex = model.vertex_by_id(vertex_id)
    degree = 0
    for edge in model.edges:
        if edge.source_vertex_id == vertex_id:
            degree += 1
        if edge.target_vertex_id == vertex_id:
            degree += 1
    vertex.degree = degree
    return degree


def circle_radius(n: int, config: LayoutConfig | None = None) -> float:
    """Smallest radius at which n equidistant points keep the minimum chord.

    Adjacent points on a circle of radius r are 2*r*sin(pi/n) apart, so
    the separation constraint pins r = s / (2*sin(pi/n)). Zero or one
    point needs no circle at all.
    """
    config = config or LayoutConfig()
    if n <= 1:
        return 0.0
    return config.minimum_separation / (2.0 * math.sin(math.pi / n))


def _id_sort_key(vertex_id: str) -> tuple:
    # Natural order: digit runs compare numerically, so n2 < n10.
    parts = re.split(r"(\d+)", vertex_id)
    return tuple(int(p) if p.isdigit() else p for p in parts)


def generate_plane_data(model: Model, config: LayoutConfig | None = None) -> Model:
    """Assign circle coordinates to every vertex of the model.

    Vertices are sorted ascending by degree (ties broken by id) and the
    i-th one lands at angle rotation + i * 360/n, measured
    counterclockwise from the +x axis. Graph structure is untouched;
    only coordinates and the degree caches change.
    """
    config = config or LayoutConfig()
    for vertex in model.vertices:
        compute_degree(model, vertex.id)
    ordered = sorted(model.vertices, key=lambda v: (v.degree, _id_sort_key(v.id)))
    n = len(ordered)
    if n == 0:
        return model
    radius = circle_radius(n, config)
    step = 360.0 / n
    for i, vertex in enumerate(ordered):
        if radius == 0.0:
            vertex.x = 0.0
            vertex.y = 0.0
            continue
        theta = math.radians(config.rotation_offset + i * step)
        vertex.x = radius * math.cos(theta)
        vertex.y = radius * math.sin(theta)
    return model
