"""Traverse a parsed exchange structure into a BrepModel.

Recognized entities: CARTESIAN_POINT, DIRECTION, AXIS2_PLACEMENT_3D,
VERTEX_POINT, LINE, VECTOR, CIRCLE, EDGE_CURVE, ORIENTED_EDGE, EDGE_LOOP,
FACE_BOUND, FACE_OUTER_BOUND, PLANE, CYLINDRICAL_SURFACE, ADVANCED_FACE,
CLOSED_SHELL, OPEN_SHELL, MANIFOLD_SOLID_BREP.  Unrecognized surface/curve
entities become kind "other"; anything not reachable from a shell is
ignored.
"""

from __future__ import annotations

from fablink.geometry.model import (
    BrepModel,
    CircleCurve,
    CylinderSurface,
    Edge,
    Face,
    FaceLoop,
    GeometryError,
    LineCurve,
    OtherCurve,
    OtherSurface,
    PlaneSurface,
)
from fablink.geometry.tolerances import TOLERANCES, GeometryTolerances
from fablink.geometry.vec import Vec3
from fablink.step import (
    Derived,
    Enum,
    Instance,
    Integer,
    ListArg,
    Real,
    Ref,
    StepFile,
    Unset,
    resolve_ref,
)

_SHELL_NAMES = ("CLOSED_SHELL", "OPEN_SHELL")


def build_brep(step: StepFile, tol: GeometryTolerances = TOLERANCES) -> BrepModel:
    """Link every shell of the file into one BrepModel."""
    return _Builder(step, tol).run()


def _num(arg, inst_id: int, what: str) -> float:
    if isinstance(arg, Real):
        return arg.value
    if isinstance(arg, Integer):
        return float(arg.value)
    raise GeometryError(inst_id, f"{what} must be numeric")


def _ref_id(arg, inst_id: int, what: str) -> int:
    if isinstance(arg, Ref):
        return arg.target
    raise GeometryError(inst_id, f"{what} must be an entity reference")


def _bool(arg, inst_id: int, what: str) -> bool:
    if isinstance(arg, Enum) and arg.value in ("T", "F"):
        return arg.value == "T"
    raise GeometryError(inst_id, f"{what} must be .T. or .F.")


def _list_items(arg, inst_id: int, what: str):
    if isinstance(arg, ListArg):
        return arg.items
    raise GeometryError(inst_id, f"{what} must be a list")


class _Builder:
    def __init__(self, step: StepFile, tol: GeometryTolerances):
        self.step = step
        self.tol = tol
        self.model = BrepModel()
        self._points: dict[int, Vec3] = {}
        self._dirs: dict[int, Vec3] = {}
        self._placements: dict[int, tuple[Vec3, Vec3]] = {}
        self._loops: dict[int, tuple[tuple[int, bool], ...]] = {}
        self._built_faces: set[int] = set()

    def run(self) -> BrepModel:
        for inst_id, inst in sorted(self.step.instances.items()):
            if inst.records[0].name in _SHELL_NAMES:
                self._build_shell(inst_id, inst)
        return self.model

    def _get(self, inst_id: int) -> Instance:
        return resolve_ref(self.step, inst_id)

    def _args(self, inst: Instance, n: int, what: str):
        args = inst.records[0].args
        if len(args) < n:
            raise GeometryError(inst.id, f"{what} needs {n} arguments, has {len(args)}")
        return args

    # geometric primitives -------------------------------------------------

    def _point(self, inst_id: int) -> Vec3:
        cached = self._points.get(inst_id)
        if cached is not None:
            return cached
        inst = self._get(inst_id)
        if inst.name != "CARTESIAN_POINT":
            raise GeometryError(inst_id, f"expected CARTESIAN_POINT, found {inst.name}")
        coords = _list_items(self._args(inst, 2, "CARTESIAN_POINT")[1], inst_id, "coordinates")
        if not 1 <= len(coords) <= 3:
            raise GeometryError(inst_id, "CARTESIAN_POINT needs 1..3 coordinates")
        vals = [_num(c, inst_id, "coordinate") for c in coords]
        while len(vals) < 3:
            vals.append(0.0)
        p = Vec3(*vals)
        self._points[inst_id] = p
        return p

    def _direction(self, inst_id: int) -> Vec3:
        cached = self._dirs.get(inst_id)
        if cached is not None:
            return cached
        inst = self._get(inst_id)
        if inst.name != "DIRECTION":
            raise GeometryError(inst_id, f"expected DIRECTION, found {inst.name}")
        ratios = _list_items(self._args(inst, 2, "DIRECTION")[1], inst_id, "direction ratios")
        vals = [_num(c, inst_id, "direction ratio") for c in ratios]
        while len(vals) < 3:
            vals.append(0.0)
        v = Vec3(*vals[:3])
        try:
            d = v.normalized(self.tol.direction_eps)
        except ValueError:
            raise GeometryError(inst_id, "zero-length direction") from None
        self._dirs[inst_id] = d
        return d

    def _placement(self, inst_id: int) -> tuple[Vec3, Vec3]:
        """AXIS2_PLACEMENT_3D -> (location, axis); axis defaults to +z."""
        cached = self._placements.get(inst_id)
        if cached is not None:
            return cached
        inst = self._get(inst_id)
        if inst.name != "AXIS2_PLACEMENT_3D":
            raise GeometryError(inst_id, f"expected AXIS2_PLACEMENT_3D, found {inst.name}")
        args = self._args(inst, 2, "AXIS2_PLACEMENT_3D")
        location = self._point(_ref_id(args[1], inst_id, "location"))
        axis = Vec3(0.0, 0.0, 1.0)
        if len(args) > 2 and not isinstance(args[2], (Unset, Derived)):
            axis = self._direction(_ref_id(args[2], inst_id, "axis"))
        out = (location, axis)
        self._placements[inst_id] = out
        return out

    def _vertex(self, inst_id: int) -> int:
        if inst_id in self.model.vertices:
            return inst_id
        inst = self._get(inst_id)
        if inst.name != "VERTEX_POINT":
            raise GeometryError(inst_id, f"expected VERTEX_POINT, found {inst.name}")
        args = self._args(inst, 2, "VERTEX_POINT")
        self.model.vertices[inst_id] = self._point(_ref_id(args[1], inst_id, "vertex geometry"))
        return inst_id

    # topology -------------------------------------------------------------

    def _curve(self, inst_id: int):
        inst = self._get(inst_id)
        name = inst.records[0].name
        if inst.is_complex:
            return OtherCurve(name)
        if name == "LINE":
            return LineCurve()
        if name == "CIRCLE":
            args = self._args(inst, 3, "CIRCLE")
            center, axis = self._placement(_ref_id(args[1], inst_id, "circle placement"))
            radius = _num(args[2], inst_id, "circle radius")
            if radius <= 0:
                raise GeometryError(inst_id, "circle radius must be > 0")
            return CircleCurve(center=center, axis=axis, radius=radius)
        return OtherCurve(name)

    def _edge(self, inst_id: int) -> int:
        if inst_id in self.model.edges:
            return inst_id
        inst = self._get(inst_id)
        if inst.name != "EDGE_CURVE":
            raise GeometryError(inst_id, f"expected EDGE_CURVE, found {inst.name}")
        args = self._args(inst, 5, "EDGE_CURVE")
        start = self._vertex(_ref_id(args[1], inst_id, "edge start"))
        end = self._vertex(_ref_id(args[2], inst_id, "edge end"))
        curve = self._curve(_ref_id(args[3], inst_id, "edge geometry"))
        self.model.edges[inst_id] = Edge(curve=curve, start_vertex=start, end_vertex=end)
        return inst_id

    def _edge_use(self, inst_id: int) -> tuple[int, bool]:
        inst = self._get(inst_id)
        if inst.name == "ORIENTED_EDGE":
            args = self._args(inst, 5, "ORIENTED_EDGE")
            edge_id = self._edge(_ref_id(args[3], inst_id, "oriented edge element"))
            orientation = _bool(args[4], inst_id, "oriented edge orientation")
            return (edge_id, orientation)
        if inst.name == "EDGE_CURVE":  # tolerated: loop referencing the edge directly
            return (self._edge(inst_id), True)
        raise GeometryError(inst_id, f"expected ORIENTED_EDGE, found {inst.name}")

    def _edge_loop(self, inst_id: int) -> tuple[tuple[int, bool], ...]:
        cached = self._loops.get(inst_id)
        if cached is not None:
            return cached
        inst = self._get(inst_id)
        if inst.name != "EDGE_LOOP":
            raise GeometryError(inst_id, f"expected EDGE_LOOP, found {inst.name}")
        args = self._args(inst, 2, "EDGE_LOOP")
        uses = tuple(
            self._edge_use(_ref_id(item, inst_id, "loop edge"))
            for item in _list_items(args[1], inst_id, "loop edges")
        )
        self._loops[inst_id] = uses
        return uses

    def _surface(self, inst_id: int):
        inst = self._get(inst_id)
        name = inst.records[0].name
        if inst.is_complex:
            return OtherSurface(name)
        if name == "PLANE":
            args = self._args(inst, 2, "PLANE")
            origin, normal = self._placement(_ref_id(args[1], inst_id, "plane placement"))
            return PlaneSurface(origin=origin, normal=normal)
        if name == "CYLINDRICAL_SURFACE":
            args = self._args(inst, 3, "CYLINDRICAL_SURFACE")
            axis_point, axis_dir = self._placement(_ref_id(args[1], inst_id, "cylinder placement"))
            radius = _num(args[2], inst_id, "cylinder radius")
            if radius <= 0:
                raise GeometryError(inst_id, "cylinder radius must be > 0")
            return CylinderSurface(axis_point=axis_point, axis_dir=axis_dir, radius=radius)
        return OtherSurface(name)

    def _face(self, inst_id: int) -> int | None:
        if inst_id in self._built_faces:
            return inst_id if inst_id in self.model.faces else None
        self._built_faces.add(inst_id)
        inst = self._get(inst_id)
        if inst.records[0].name != "ADVANCED_FACE":
            return None  # unrecognized face entity: not linkable, ignored
        args = self._args(inst, 4, "ADVANCED_FACE")
        loops = []
        for bound_ref in _list_items(args[1], inst_id, "face bounds"):
            bound = self._get(_ref_id(bound_ref, inst_id, "face bound"))
            if bound.name not in ("FACE_BOUND", "FACE_OUTER_BOUND"):
                raise GeometryError(bound.id, f"expected FACE_BOUND, found {bound.name}")
            bargs = self._args(bound, 3, bound.name)
            uses = self._edge_loop(_ref_id(bargs[1], bound.id, "bound loop"))
            kind = "outer" if bound.name == "FACE_OUTER_BOUND" else "inner"
            loops.append(FaceLoop(kind=kind, edge_uses=uses))
        surface = self._surface(_ref_id(args[2], inst_id, "face surface"))
        same_sense = _bool(args[3], inst_id, "face sense")
        self.model.faces[inst_id] = Face(surface=surface, same_sense=same_sense, loops=tuple(loops))
        return inst_id

    def _build_shell(self, inst_id: int, inst: Instance):
        args = self._args(inst, 2, inst.records[0].name)
        face_ids = []
        for face_ref in _list_items(args[1], inst_id, "shell faces"):
            fid = self._face(_ref_id(face_ref, inst_id, "shell face"))
            if fid is not None:
                face_ids.append(fid)
        self.model.shells.append(face_ids)
