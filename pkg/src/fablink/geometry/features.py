"""Design feature extraction: the fixed 14-field "f1" vector.

The two domain-motivated features are hole count and material thickness;
topology counts, bounding box and total edge (cut) length round the vector
out so downstream process quantities are predictable from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Iterator

from fablink.errors import ValidationError
from fablink.geometry.model import (
    BrepModel,
    CircleCurve,
    CylinderSurface,
    Edge,
    GeometryError,
    LineCurve,
    PlaneSurface,
)
from fablink.geometry.tolerances import TOLERANCES, GeometryTolerances
from fablink.geometry.vec import Vec3

FEATURE_SCHEMA = "f1"

FEATURE_FIELDS = (
    "face_count_total",
    "face_count_planar",
    "face_count_cylindrical",
    "face_count_other",
    "edge_count",
    "vertex_count",
    "shell_count",
    "hole_count",
    "mean_hole_diameter",
    "material_thickness",
    "bbox_a",
    "bbox_b",
    "bbox_c",
    "total_edge_length",
)

_COUNT_FIELDS = FEATURE_FIELDS[:8]


@dataclass(frozen=True, slots=True)
class FeatureVector:
    """Fixed-order design descriptor, schema "f1".

    Lengths in mm; bbox extents sorted descending; mean_hole_diameter is 0
    when there are no holes, material_thickness 0 when undeterminable.
    """

    face_count_total: int = 0
    face_count_planar: int = 0
    face_count_cylindrical: int = 0
    face_count_other: int = 0
    edge_count: int = 0
    vertex_count: int = 0
    shell_count: int = 0
    hole_count: int = 0
    mean_hole_diameter: float = 0.0
    material_thickness: float = 0.0
    bbox_a: float = 0.0
    bbox_b: float = 0.0
    bbox_c: float = 0.0
    total_edge_length: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if v < 0:
                raise ValidationError(f"feature {f.name} must be >= 0, got {v}")
        if not self.bbox_a >= self.bbox_b >= self.bbox_c:
            raise ValidationError("bbox extents must be sorted descending")
        if self.hole_count == 0 and self.mean_hole_diameter != 0.0:
            raise ValidationError("mean_hole_diameter must be 0 without holes")

    def values(self) -> Iterator[float]:
        for name in FEATURE_FIELDS:
            yield float(getattr(self, name))

    def to_list(self) -> list[float]:
        return list(self.values())

    def to_dict(self) -> dict:
        out = {"schema": FEATURE_SCHEMA}
        for name in FEATURE_FIELDS:
            out[name] = getattr(self, name)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureVector":
        if not isinstance(data, dict):
            raise ValidationError("feature vector must be an object")
        schema = data.get("schema", FEATURE_SCHEMA)
        if schema != FEATURE_SCHEMA:
            raise ValidationError(f"unsupported feature schema {schema!r}")
        kwargs = {}
        for name in FEATURE_FIELDS:
            if name not in data:
                raise ValidationError(f"feature vector missing field {name!r}")
            value = data[name]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(f"feature {name} must be a number")
            if name in _COUNT_FIELDS:
                if value != int(value):
                    raise ValidationError(f"feature {name} must be an integer count")
                kwargs[name] = int(value)
            else:
                kwargs[name] = float(value)
        return cls(**kwargs)

    def replace_thickness(self, thickness_mm: float) -> "FeatureVector":
        """Copy with material_thickness overridden (PDM-supplied value)."""
        d = self.to_dict()
        d["material_thickness"] = float(thickness_mm)
        return FeatureVector.from_dict(d)


@dataclass(frozen=True, slots=True)
class Hole:
    """A coaxial group of inward-material cylindrical faces."""

    axis_point: Vec3
    axis_dir: Vec3
    radius: float


def edge_length(edge: Edge, model: BrepModel, tol: GeometryTolerances = TOLERANCES) -> float:
    """Length of one edge in mm.

    Lines measure the vertex distance, circles the full circumference or the
    arc swept from start to end about the axis (right-hand rule), and
    unrecognized curves the chord distance (documented lower bound).
    """
    start = model.vertices[edge.start_vertex]
    end = model.vertices[edge.end_vertex]
    curve = edge.curve
    if isinstance(curve, LineCurve):
        return start.dist(end)
    if isinstance(curve, CircleCurve):
        r = curve.radius
        axis = curve.axis
        for p in (start, end):
            rel = p - curve.center
            h = rel.dot(axis)
            radial = rel - axis.scaled(h)
            off = math.hypot(radial.norm() - r, h)
            if off > tol.bin_mm:
                raise GeometryError(
                    edge.start_vertex, f"circle endpoint off the curve by {off:.6g} mm"
                )
        if start.dist(end) <= tol.group_mm:
            return 2.0 * math.pi * r
        u1 = _radial_component(start, curve)
        u2 = _radial_component(end, curve)
        theta = math.atan2(u1.cross(u2).dot(axis), u1.dot(u2))
        if theta <= 0.0:
            theta += 2.0 * math.pi
        return r * theta
    return start.dist(end)


def _radial_component(p: Vec3, curve: CircleCurve) -> Vec3:
    rel = p - curve.center
    radial = rel - curve.axis.scaled(rel.dot(curve.axis))
    return radial.normalized()


def detect_holes(model: BrepModel, tol: GeometryTolerances = TOLERANCES) -> list[Hole]:
    """Group coaxial cylindrical faces and keep the inward-material groups.

    Faces are coaxial when radii agree within tol.group_mm, axes are
    parallel up to sign within tol.group_mm and the axis lines are within
    tol.group_mm of each other.  A group is a hole only when every member
    face's material-side normal points toward the axis, i.e. the natural
    outward radial normal of the cylinder is flipped by same_sense.
    """
    groups: list[list[tuple[int, CylinderSurface, bool]]] = []
    for fid, face in model.cylindrical_faces():
        surf = face.surface
        placed = False
        for group in groups:
            _, ref, _ = group[0]
            if abs(surf.radius - ref.radius) > tol.group_mm:
                continue
            if surf.axis_dir.cross(ref.axis_dir).norm() > tol.group_mm:
                continue
            offset = surf.axis_point - ref.axis_point
            perp = offset - ref.axis_dir.scaled(offset.dot(ref.axis_dir))
            if perp.norm() > tol.group_mm:
                continue
            group.append((fid, surf, face.same_sense))
            placed = True
            break
        if not placed:
            groups.append([(fid, surf, face.same_sense)])

    holes = []
    for group in groups:
        if all(not same_sense for _, _, same_sense in group):
            _, surf, _ = group[0]
            holes.append(Hole(axis_point=surf.axis_point, axis_dir=surf.axis_dir, radius=surf.radius))
    return holes


def estimate_thickness(model: BrepModel, tol: GeometryTolerances = TOLERANCES) -> float:
    """Modal distance between antiparallel planar face pairs.

    Pairs further apart than the cap (exclusive) or coincident are dropped;
    remaining distances are binned with tol.bin_mm and the most frequent
    bin's smallest member wins, ties broken toward the smaller distance.
    Returns 0 when no qualifying pair exists.
    """
    planes = []
    for _, face in model.planar_faces():
        surf = face.surface
        normal = surf.normal if face.same_sense else -surf.normal
        planes.append((surf.origin, normal))

    distances = []
    for i in range(len(planes)):
        oi, ni = planes[i]
        for j in range(i + 1, len(planes)):
            oj, nj = planes[j]
            if ni.dot(nj) > -1.0 + tol.group_mm:
                continue
            d = abs((oj - oi).dot(ni))
            if 0.0 < d < tol.thickness_cap_mm:
                distances.append(d)
    if not distances:
        return 0.0

    distances.sort()
    bins: list[tuple[float, int]] = []  # (smallest member, count)
    for d in distances:
        if bins and d - bins[-1][0] <= tol.bin_mm:
            bins[-1] = (bins[-1][0], bins[-1][1] + 1)
        else:
            bins.append((d, 1))
    best = max(bins, key=lambda b: (b[1], -b[0]))
    return best[0]


def extract_features(model: BrepModel, tol: GeometryTolerances = TOLERANCES) -> FeatureVector:
    """Compute the full f1 vector; degenerate models yield zeros, never fail."""
    total = len(model.faces)
    planar = len(model.planar_faces())
    cylindrical = len(model.cylindrical_faces())

    holes = detect_holes(model, tol)
    mean_d = sum(2.0 * h.radius for h in holes) / len(holes) if holes else 0.0

    if model.vertices:
        xs = [v.x for v in model.vertices.values()]
        ys = [v.y for v in model.vertices.values()]
        zs = [v.z for v in model.vertices.values()]
        extents = sorted(
            (max(xs) - min(xs), max(ys) - min(ys), max(zs) - min(zs)), reverse=True
        )
    else:
        extents = [0.0, 0.0, 0.0]

    total_len = 0.0
    for edge in model.edges.values():
        try:
            total_len += edge_length(edge, model, tol)
        except GeometryError:
            # off-curve endpoints degrade to the chord, keeping extraction total
            total_len += model.vertices[edge.start_vertex].dist(model.vertices[edge.end_vertex])

    return FeatureVector(
        face_count_total=total,
        face_count_planar=planar,
        face_count_cylindrical=cylindrical,
        face_count_other=total - planar - cylindrical,
        edge_count=len(model.edges),
        vertex_count=len(model.vertices),
        shell_count=len(model.shells),
        hole_count=len(holes),
        mean_hole_diameter=mean_d,
        material_thickness=estimate_thickness(model, tol),
        bbox_a=extents[0],
        bbox_b=extents[1],
        bbox_c=extents[2],
        total_edge_length=total_len,
    )
