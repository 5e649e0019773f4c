"""Synthetic STEP fixture generator: rectangular plate with through-holes.

Writes one MANIFOLD_SOLID_BREP using only the entity set the traversal
recognizes.  Output is deterministic for identical inputs, which makes the
generated files usable as geometric test oracles and as simulator input.
Loop windings follow the outward-normal convention but are not consumed by
the extractor.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

from fablink.errors import ValidationError
from fablink.geometry.vec import Vec3


class InvalidGeometryError(ValidationError):
    """Requested plate parameters describe impossible geometry."""


RigidTransform = tuple[Sequence[Sequence[float]], Sequence[float]]  # (3x3 rotation rows, translation)


def _fmt(x: float) -> str:
    """Round-tripping Part 21 real literal (always contains a '.')."""
    r = repr(float(x))
    if "e" in r:
        mant, _, exp = r.partition("e")
        if "." not in mant:
            mant += "."
        return f"{mant}E{int(exp)}"
    if "." not in r:
        r += "."
    return r


class _Emitter:
    def __init__(self, transform: RigidTransform | None):
        self.lines: list[str] = []
        self._next = 1
        if transform is None:
            self._rot = None
            self._trans = Vec3(0.0, 0.0, 0.0)
        else:
            rot, trans = transform
            self._rot = tuple(Vec3(*row) for row in rot)
            self._trans = Vec3(*trans)

    def add(self, body: str) -> int:
        eid = self._next
        self._next += 1
        self.lines.append(f"#{eid}={body};")
        return eid

    def _map_point(self, p: Vec3) -> Vec3:
        if self._rot is None:
            return p
        r = self._rot
        return Vec3(r[0].dot(p), r[1].dot(p), r[2].dot(p)) + self._trans

    def _map_dir(self, d: Vec3) -> Vec3:
        if self._rot is None:
            return d
        r = self._rot
        return Vec3(r[0].dot(d), r[1].dot(d), r[2].dot(d))

    def point(self, p: Vec3) -> int:
        q = self._map_point(p)
        return self.add(f"CARTESIAN_POINT('',({_fmt(q.x)},{_fmt(q.y)},{_fmt(q.z)}))")

    def direction(self, d: Vec3) -> int:
        q = self._map_dir(d)
        return self.add(f"DIRECTION('',({_fmt(q.x)},{_fmt(q.y)},{_fmt(q.z)}))")

    def vertex(self, p: Vec3) -> int:
        return self.add(f"VERTEX_POINT('',#{self.point(p)})")

    def placement(self, loc: Vec3, axis: Vec3, ref: Vec3) -> int:
        loc_id = self.point(loc)
        axis_id = self.direction(axis)
        ref_id = self.direction(ref)
        return self.add(f"AXIS2_PLACEMENT_3D('',#{loc_id},#{axis_id},#{ref_id})")

    def line_edge(self, v1: int, p1: Vec3, v2: int, p2: Vec3) -> int:
        d = p2 - p1
        length = d.norm()
        dir_id = self.direction(d.normalized())
        vec_id = self.add(f"VECTOR('',#{dir_id},{_fmt(length)})")
        line_id = self.add(f"LINE('',#{self.point(p1)},#{vec_id})")
        return self.add(f"EDGE_CURVE('',#{v1},#{v2},#{line_id},.T.)")

    def circle_edge(self, vertex: int, center: Vec3, radius: float) -> int:
        pl = self.placement(center, Vec3(0, 0, 1), Vec3(1, 0, 0))
        circ = self.add(f"CIRCLE('',#{pl},{_fmt(radius)})")
        return self.add(f"EDGE_CURVE('',#{vertex},#{vertex},#{circ},.T.)")

    def loop(self, uses: Iterable[tuple[int, bool]]) -> int:
        oriented = [
            self.add(f"ORIENTED_EDGE('',*,*,#{edge},{'.T.' if fwd else '.F.'})")
            for edge, fwd in uses
        ]
        return self.add(f"EDGE_LOOP('',({','.join(f'#{o}' for o in oriented)}))")

    def face(self, bounds: Iterable[tuple[int, bool]], surface: int, same_sense: bool) -> int:
        bound_ids = [
            self.add(f"{'FACE_OUTER_BOUND' if outer else 'FACE_BOUND'}('',#{loop_id},.T.)")
            for loop_id, outer in bounds
        ]
        refs = ",".join(f"#{b}" for b in bound_ids)
        sense = ".T." if same_sense else ".F."
        return self.add(f"ADVANCED_FACE('',({refs}),#{surface},{sense})")

    def plane(self, origin: Vec3, normal: Vec3, ref: Vec3) -> int:
        return self.add(f"PLANE('',#{self.placement(origin, normal, ref)})")

    def cylinder(self, axis_point: Vec3, radius: float) -> int:
        pl = self.placement(axis_point, Vec3(0, 0, 1), Vec3(1, 0, 0))
        return self.add(f"CYLINDRICAL_SURFACE('',#{pl},{_fmt(radius)})")


def _validate(length: float, width: float, thickness: float, holes) -> list[tuple[float, float, float]]:
    if length <= 0 or width <= 0 or thickness <= 0:
        raise InvalidGeometryError("plate dimensions must be > 0")
    cleaned = []
    for cx, cy, d in holes:
        if d <= 0:
            raise InvalidGeometryError(f"hole diameter must be > 0, got {d}")
        r = d / 2.0
        if not (cx - r > 0 and cx + r < length and cy - r > 0 and cy + r < width):
            raise InvalidGeometryError(
                f"hole at ({cx}, {cy}) d={d} does not lie strictly inside the outline"
            )
        cleaned.append((float(cx), float(cy), float(d)))
    for i in range(len(cleaned)):
        for j in range(i + 1, len(cleaned)):
            xi, yi, di = cleaned[i]
            xj, yj, dj = cleaned[j]
            if math.hypot(xi - xj, yi - yj) <= (di + dj) / 2.0:
                raise InvalidGeometryError(f"holes {i} and {j} overlap")
    return cleaned


def generate_plate_step(
    length: float,
    width: float,
    thickness: float,
    holes: Iterable[tuple[float, float, float]] = (),
    transform: RigidTransform | None = None,
) -> bytes:
    """Emit Part 21 bytes for a length x width x thickness plate.

    ``holes`` are (cx, cy, diameter) through-holes; ``transform`` applies a
    rigid rotation+translation to every coordinate before writing.
    """
    hole_list = _validate(length, width, thickness, holes)
    em = _Emitter(transform)
    L, W, T = float(length), float(width), float(thickness)

    pb = [Vec3(0, 0, 0), Vec3(L, 0, 0), Vec3(L, W, 0), Vec3(0, W, 0)]
    pt = [Vec3(p.x, p.y, T) for p in pb]
    vb = [em.vertex(p) for p in pb]
    vt = [em.vertex(p) for p in pt]

    eb = [em.line_edge(vb[k], pb[k], vb[(k + 1) % 4], pb[(k + 1) % 4]) for k in range(4)]
    et = [em.line_edge(vt[k], pt[k], vt[(k + 1) % 4], pt[(k + 1) % 4]) for k in range(4)]
    ev = [em.line_edge(vb[k], pb[k], vt[k], pt[k]) for k in range(4)]

    circ_b, circ_t, centers = [], [], []
    for cx, cy, d in hole_list:
        r = d / 2.0
        bottom_center = Vec3(cx, cy, 0.0)
        top_center = Vec3(cx, cy, T)
        vertex_b = em.vertex(Vec3(cx + r, cy, 0.0))
        vertex_t = em.vertex(Vec3(cx + r, cy, T))
        circ_b.append(em.circle_edge(vertex_b, bottom_center, r))
        circ_t.append(em.circle_edge(vertex_t, top_center, r))
        centers.append(bottom_center)

    faces = []

    bottom_outer = em.loop([(eb[3], False), (eb[2], False), (eb[1], False), (eb[0], False)])
    bottom_bounds = [(bottom_outer, True)] + [(em.loop([(c, True)]), False) for c in circ_b]
    faces.append(em.face(bottom_bounds, em.plane(Vec3(0, 0, 0), Vec3(0, 0, -1), Vec3(1, 0, 0)), True))

    top_outer = em.loop([(et[0], True), (et[1], True), (et[2], True), (et[3], True)])
    top_bounds = [(top_outer, True)] + [(em.loop([(c, False)]), False) for c in circ_t]
    faces.append(em.face(top_bounds, em.plane(Vec3(0, 0, T), Vec3(0, 0, 1), Vec3(1, 0, 0)), True))

    side_normals = [Vec3(0, -1, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(-1, 0, 0)]
    for k in range(4):
        loop_id = em.loop(
            [(eb[k], True), (ev[(k + 1) % 4], True), (et[k], False), (ev[k], False)]
        )
        ref = Vec3(0, 0, 1)
        surf = em.plane(pb[k], side_normals[k], ref)
        faces.append(em.face([(loop_id, True)], surf, True))

    for idx, (cx, cy, d) in enumerate(hole_list):
        r = d / 2.0
        loop_bot = em.loop([(circ_b[idx], True)])
        loop_top = em.loop([(circ_t[idx], False)])
        surf = em.cylinder(centers[idx], r)
        # same_sense .F.: material normal points toward the axis -> a hole
        faces.append(em.face([(loop_bot, False), (loop_top, False)], surf, False))

    shell = em.add(f"CLOSED_SHELL('',({','.join(f'#{f}' for f in faces)}))")
    em.add(f"MANIFOLD_SOLID_BREP('plate',#{shell})")

    out = [
        "ISO-10303-21;",
        "HEADER;",
        "FILE_DESCRIPTION((''),'2;1');",
        "FILE_NAME('plate','',('fablink'),(''),'fablink plate generator','','');",
        "FILE_SCHEMA(('AUTOMOTIVE_DESIGN'));",
        "ENDSEC;",
        "DATA;",
        *em.lines,
        "ENDSEC;",
        "END-ISO-10303-21;",
        "",
    ]
    return "\n".join(out).encode("ascii")
