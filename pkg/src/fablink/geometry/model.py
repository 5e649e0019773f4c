"""Typed B-rep model produced from the parsed entity graph."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from fablink.errors import ValidationError
from fablink.geometry.vec import Vec3


class GeometryError(ValidationError):
    """An entity carries geometry we cannot accept (zero radius, ...)."""

    def __init__(self, entity_id: int, reason: str):
        self.entity_id = entity_id
        self.reason = reason
        super().__init__(f"entity #{entity_id}: {reason}")


@dataclass(frozen=True, slots=True)
class LineCurve:
    pass


@dataclass(frozen=True, slots=True)
class CircleCurve:
    center: Vec3
    axis: Vec3
    radius: float


@dataclass(frozen=True, slots=True)
class OtherCurve:
    entity_name: str


Curve = Union[LineCurve, CircleCurve, OtherCurve]


@dataclass(frozen=True, slots=True)
class Edge:
    curve: Curve
    start_vertex: int
    end_vertex: int


@dataclass(frozen=True, slots=True)
class PlaneSurface:
    origin: Vec3
    normal: Vec3


@dataclass(frozen=True, slots=True)
class CylinderSurface:
    axis_point: Vec3
    axis_dir: Vec3
    radius: float


@dataclass(frozen=True, slots=True)
class OtherSurface:
    entity_name: str


Surface = Union[PlaneSurface, CylinderSurface, OtherSurface]


@dataclass(frozen=True, slots=True)
class FaceLoop:
    kind: str  # "outer" | "inner"
    edge_uses: tuple[tuple[int, bool], ...]  # (edge id, used in edge direction?)


@dataclass(frozen=True, slots=True)
class Face:
    surface: Surface
    same_sense: bool
    loops: tuple[FaceLoop, ...]

    def effective_normal_sign(self) -> int:
        """+1 when the face normal equals the surface's natural normal."""
        return 1 if self.same_sense else -1


@dataclass
class BrepModel:
    """Everything reachable from the shells of one exchange file."""

    vertices: dict[int, Vec3] = field(default_factory=dict)
    edges: dict[int, Edge] = field(default_factory=dict)
    faces: dict[int, Face] = field(default_factory=dict)
    shells: list[list[int]] = field(default_factory=list)

    def planar_faces(self) -> list[tuple[int, Face]]:
        return [(fid, f) for fid, f in sorted(self.faces.items()) if isinstance(f.surface, PlaneSurface)]

    def cylindrical_faces(self) -> list[tuple[int, Face]]:
        return [(fid, f) for fid, f in sorted(self.faces.items()) if isinstance(f.surface, CylinderSurface)]
