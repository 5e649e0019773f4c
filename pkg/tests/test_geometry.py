"""Feature extraction against closed-form plate oracles.

All expected values are derived on paper (box topology, rectangle
perimeters, circle circumferences), never from the extractor itself.
"""

from __future__ import annotations

import math
import random

import pytest

from conftest import (
    AXIS_ALIGNED_ROTATIONS,
    features_of,
    plate_oracle,
    random_plate_spec,
    rotation_axis_angle,
)
from fablink.errors import ValidationError
from fablink.geometry.build import build_brep
from fablink.geometry.features import (
    FeatureVector,
    detect_holes,
    edge_length,
    estimate_thickness,
    extract_features,
)
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
    PlaneSurface,
)
from fablink.geometry.plategen import InvalidGeometryError, generate_plate_step
from fablink.geometry.vec import Vec3
from fablink.step.parser import parse_step

REL = 1e-9


def assert_matches_oracle(fv: FeatureVector, oracle: dict):
    assert fv.face_count_total == oracle["face_count_total"]
    assert fv.face_count_planar == oracle["face_count_planar"]
    assert fv.face_count_cylindrical == oracle["face_count_cylindrical"]
    assert fv.face_count_other == oracle["face_count_other"]
    assert fv.edge_count == oracle["edge_count"]
    assert fv.vertex_count == oracle["vertex_count"]
    assert fv.shell_count == oracle["shell_count"]
    assert fv.hole_count == oracle["hole_count"]
    assert fv.mean_hole_diameter == pytest.approx(oracle["mean_hole_diameter"], abs=1e-9)
    assert fv.material_thickness == pytest.approx(oracle["material_thickness"], abs=1e-9)
    assert [fv.bbox_a, fv.bbox_b, fv.bbox_c] == pytest.approx(oracle["bbox"], abs=1e-9)
    assert fv.total_edge_length == pytest.approx(oracle["total_edge_length"], rel=1e-6)


def test_plain_plate_features(plain_plate):
    fv = features_of(plain_plate)
    assert_matches_oracle(fv, plate_oracle(100.0, 100.0, 2.0))
    # 100x100x2 plate: cut length = 4*(100+100) + 4*2 = 808 exactly
    assert fv.total_edge_length == pytest.approx(808.0, rel=1e-12)


def test_four_hole_plate_features(four_hole_plate):
    holes = [(25.0, 25.0, 10.0), (75.0, 25.0, 10.0), (25.0, 75.0, 10.0), (75.0, 75.0, 10.0)]
    fv = features_of(four_hole_plate)
    assert_matches_oracle(fv, plate_oracle(100.0, 100.0, 2.0, holes))
    # 808 + 4 holes x 2 circles x pi*10
    assert fv.total_edge_length == pytest.approx(808.0 + 80.0 * math.pi, rel=1e-12)
    assert fv.hole_count == 4
    assert fv.mean_hole_diameter == pytest.approx(10.0)


def test_mixed_hole_diameters():
    holes = [(30.0, 30.0, 5.0), (70.0, 30.0, 10.0), (50.0, 70.0, 15.0)]
    fv = features_of(generate_plate_step(100.0, 100.0, 3.0, holes))
    assert fv.hole_count == 3
    assert fv.mean_hole_diameter == pytest.approx(10.0, abs=1e-9)


def test_closure_over_random_plates():
    rng = random.Random(4242)
    for _ in range(12):
        length, width, thickness, holes = random_plate_spec(rng)
        fv = features_of(generate_plate_step(length, width, thickness, holes))
        assert_matches_oracle(fv, plate_oracle(length, width, thickness, holes))


def test_plategen_deterministic():
    args = (120.0, 80.0, 2.0, [(40.0, 40.0, 12.0)])
    assert generate_plate_step(*args) == generate_plate_step(*args)


def test_bbox_invariant_under_axis_aligned_rotation():
    base = plate_oracle(200.0, 100.0, 3.0, [(50.0, 50.0, 10.0)])
    for rot in AXIS_ALIGNED_ROTATIONS:
        data = generate_plate_step(
            200.0, 100.0, 3.0, [(50.0, 50.0, 10.0)],
            transform=(rot, (5.0, -40.0, 17.0)),
        )
        fv = features_of(data)
        assert [fv.bbox_a, fv.bbox_b, fv.bbox_c] == pytest.approx(base["bbox"], abs=1e-9)


def test_features_invariant_under_arbitrary_rigid_motion():
    """Everything except the bbox is preserved by any rotation+translation."""
    length, width, thickness = 150.0, 90.0, 2.0
    holes = [(40.0, 40.0, 8.0), (100.0, 60.0, 14.0)]
    oracle = plate_oracle(length, width, thickness, holes)
    rot = rotation_axis_angle((1.0, 2.0, 3.0), 0.7)
    fv = features_of(generate_plate_step(
        length, width, thickness, holes, transform=(rot, (-3.0, 12.0, 9.0))
    ))
    assert fv.face_count_total == oracle["face_count_total"]
    assert fv.edge_count == oracle["edge_count"]
    assert fv.vertex_count == oracle["vertex_count"]
    assert fv.hole_count == oracle["hole_count"]
    assert fv.mean_hole_diameter == pytest.approx(oracle["mean_hole_diameter"], abs=1e-9)
    assert fv.material_thickness == pytest.approx(oracle["material_thickness"], abs=1e-9)
    assert fv.total_edge_length == pytest.approx(oracle["total_edge_length"], rel=1e-9)


def test_boss_is_not_a_hole(four_hole_plate):
    """Flipping every cylindrical face sense turns holes into bosses."""
    flipped = four_hole_plate.replace(
        b",.F.);", b",.T.);"
    )
    fv = features_of(flipped)
    assert fv.face_count_cylindrical == 4
    assert fv.hole_count == 0
    assert fv.mean_hole_diameter == 0.0


# ---------------------------------------------------------------- direct models


def box_plate_model() -> BrepModel:
    """Hand-built 10 x 6 x 2 plate (top/bottom faces only, 4 vertices)."""
    m = BrepModel()
    m.vertices = {
        1: Vec3(0, 0, 0), 2: Vec3(10, 0, 0), 3: Vec3(10, 6, 0), 4: Vec3(0, 6, 0),
    }
    m.faces = {
        10: Face(surface=PlaneSurface(origin=Vec3(0, 0, 0), normal=Vec3(0, 0, -1)),
                 same_sense=True, loops=()),
        11: Face(surface=PlaneSurface(origin=Vec3(0, 0, 2), normal=Vec3(0, 0, 1)),
                 same_sense=True, loops=()),
    }
    m.shells = [[10, 11]]
    return m


def test_split_hole_counts_once():
    """Two coaxial half-cylinder faces of one bore are a single hole."""
    m = BrepModel()
    surf_a = CylinderSurface(axis_point=Vec3(5, 5, 0), axis_dir=Vec3(0, 0, 1), radius=3.0)
    surf_b = CylinderSurface(axis_point=Vec3(5, 5, 2), axis_dir=Vec3(0, 0, -1), radius=3.0)
    m.faces = {
        1: Face(surface=surf_a, same_sense=False, loops=()),
        2: Face(surface=surf_b, same_sense=False, loops=()),
    }
    holes = detect_holes(m)
    assert len(holes) == 1
    assert holes[0].radius == pytest.approx(3.0)


def test_mixed_sense_group_is_not_a_hole():
    m = BrepModel()
    surf = CylinderSurface(axis_point=Vec3(0, 0, 0), axis_dir=Vec3(0, 0, 1), radius=2.0)
    m.faces = {
        1: Face(surface=surf, same_sense=False, loops=()),
        2: Face(surface=surf, same_sense=True, loops=()),
    }
    assert detect_holes(m) == []


def test_distinct_axes_count_separately():
    m = BrepModel()
    m.faces = {
        1: Face(surface=CylinderSurface(Vec3(0, 0, 0), Vec3(0, 0, 1), 2.0),
                same_sense=False, loops=()),
        2: Face(surface=CylinderSurface(Vec3(9, 0, 0), Vec3(0, 0, 1), 2.0),
                same_sense=False, loops=()),
        3: Face(surface=CylinderSurface(Vec3(0, 0, 0), Vec3(0, 0, 1), 2.5),
                same_sense=False, loops=()),
    }
    assert len(detect_holes(m)) == 3


def test_antiparallel_axis_same_group():
    m = BrepModel()
    m.faces = {
        1: Face(surface=CylinderSurface(Vec3(1, 1, 0), Vec3(0, 0, 1), 4.0),
                same_sense=False, loops=()),
        2: Face(surface=CylinderSurface(Vec3(1, 1, 9), Vec3(0, 0, -1), 4.0),
                same_sense=False, loops=()),
    }
    assert len(detect_holes(m)) == 1


def test_thickness_modal_rule():
    """Most frequent antiparallel pair distance wins, not the smallest."""
    m = BrepModel()

    def plane(fid, z, up):
        m.faces[fid] = Face(
            surface=PlaneSurface(origin=Vec3(0, 0, z), normal=Vec3(0, 0, 1 if up else -1)),
            same_sense=True, loops=(),
        )

    # one pair 2 mm apart, but three pairs 5 mm apart via parallel walls in x
    plane(1, 0, False)
    plane(2, 2, True)
    for i, x in enumerate((0.0, 20.0, 40.0)):
        m.faces[10 + 2 * i] = Face(
            surface=PlaneSurface(origin=Vec3(x, 0, 0), normal=Vec3(-1, 0, 0)),
            same_sense=True, loops=())
        m.faces[11 + 2 * i] = Face(
            surface=PlaneSurface(origin=Vec3(x + 5.0, 0, 0), normal=Vec3(1, 0, 0)),
            same_sense=True, loops=())
    assert estimate_thickness(m) == pytest.approx(5.0)


def test_thickness_tie_breaks_to_smaller():
    m = BrepModel()
    m.faces = {
        1: Face(surface=PlaneSurface(Vec3(0, 0, 0), Vec3(0, 0, -1)), same_sense=True, loops=()),
        2: Face(surface=PlaneSurface(Vec3(0, 0, 3), Vec3(0, 0, 1)), same_sense=True, loops=()),
        3: Face(surface=PlaneSurface(Vec3(0, 0, 0), Vec3(0, -1, 0)), same_sense=True, loops=()),
        4: Face(surface=PlaneSurface(Vec3(0, 7, 0), Vec3(0, 1, 0)), same_sense=True, loops=()),
    }
    # one pair at 3 mm and one at 7 mm: tie on count, smaller distance wins
    assert estimate_thickness(m) == pytest.approx(3.0)


def test_thickness_cap_excludes_wide_pairs():
    fv = features_of(generate_plate_step(150.0, 120.0, 2.0))
    assert fv.material_thickness == pytest.approx(2.0)
    # a cube-like 120 mm "plate": every gap >= 100 is dropped, leaving none
    m = BrepModel()
    m.faces = {
        1: Face(surface=PlaneSurface(Vec3(0, 0, 0), Vec3(0, 0, -1)), same_sense=True, loops=()),
        2: Face(surface=PlaneSurface(Vec3(0, 0, 120.0), Vec3(0, 0, 1)), same_sense=True, loops=()),
    }
    assert estimate_thickness(m) == 0.0


def test_thickness_same_sense_flip_respected():
    """same_sense .F. flips the plane normal before pairing."""
    m = BrepModel()
    m.faces = {
        1: Face(surface=PlaneSurface(Vec3(0, 0, 0), Vec3(0, 0, 1)), same_sense=False, loops=()),
        2: Face(surface=PlaneSurface(Vec3(0, 0, 4), Vec3(0, 0, 1)), same_sense=True, loops=()),
    }
    assert estimate_thickness(m) == pytest.approx(4.0)
    # without the flip the normals are parallel, so no pair forms
    m.faces[1] = Face(surface=PlaneSurface(Vec3(0, 0, 0), Vec3(0, 0, 1)),
                      same_sense=True, loops=())
    assert estimate_thickness(m) == 0.0


def test_edge_length_line():
    m = BrepModel()
    m.vertices = {1: Vec3(0, 0, 0), 2: Vec3(3, 4, 0)}
    e = Edge(curve=LineCurve(), start_vertex=1, end_vertex=2)
    assert edge_length(e, m) == pytest.approx(5.0)


def test_edge_length_full_circle():
    m = BrepModel()
    m.vertices = {1: Vec3(5, 0, 0)}
    curve = CircleCurve(center=Vec3(0, 0, 0), axis=Vec3(0, 0, 1), radius=5.0)
    e = Edge(curve=curve, start_vertex=1, end_vertex=1)
    assert edge_length(e, m) == pytest.approx(10.0 * math.pi, rel=1e-12)


def test_edge_length_arc_right_hand_rule():
    """Quarter arcs: length follows the right-hand sweep about the axis."""
    m = BrepModel()
    m.vertices = {1: Vec3(5, 0, 0), 2: Vec3(0, 5, 0)}
    curve = CircleCurve(center=Vec3(0, 0, 0), axis=Vec3(0, 0, 1), radius=5.0)
    quarter = Edge(curve=curve, start_vertex=1, end_vertex=2)
    assert edge_length(quarter, m) == pytest.approx(5.0 * math.pi / 2.0, rel=1e-12)
    # swapped endpoints sweep the complementary three-quarter arc
    three_quarter = Edge(curve=curve, start_vertex=2, end_vertex=1)
    assert edge_length(three_quarter, m) == pytest.approx(15.0 * math.pi / 2.0, rel=1e-12)


def test_edge_length_arc_matches_dense_polyline():
    """Arc formula vs an independent 1e5-segment polyline quadrature."""
    r = 7.0
    a0, a1 = 0.3, 2.6
    m = BrepModel()
    m.vertices = {
        1: Vec3(r * math.cos(a0), r * math.sin(a0), 0.0),
        2: Vec3(r * math.cos(a1), r * math.sin(a1), 0.0),
    }
    curve = CircleCurve(center=Vec3(0, 0, 0), axis=Vec3(0, 0, 1), radius=r)
    got = edge_length(Edge(curve=curve, start_vertex=1, end_vertex=2), m)
    n = 100_000
    poly = sum(
        math.dist(
            (r * math.cos(a0 + (a1 - a0) * i / n), r * math.sin(a0 + (a1 - a0) * i / n)),
            (r * math.cos(a0 + (a1 - a0) * (i + 1) / n), r * math.sin(a0 + (a1 - a0) * (i + 1) / n)),
        )
        for i in range(n)
    )
    assert got == pytest.approx(poly, rel=1e-9)


def test_edge_length_off_curve_endpoint_raises():
    m = BrepModel()
    m.vertices = {1: Vec3(9.0, 0, 0)}  # 4 mm off the radius-5 circle
    curve = CircleCurve(center=Vec3(0, 0, 0), axis=Vec3(0, 0, 1), radius=5.0)
    with pytest.raises(GeometryError) as exc:
        edge_length(Edge(curve=curve, start_vertex=1, end_vertex=1), m)
    assert "off the curve" in str(exc.value)


def test_extract_degrades_off_curve_edge_to_chord():
    m = BrepModel()
    m.vertices = {1: Vec3(9.0, 0, 0), 2: Vec3(0.0, 9.0, 0)}
    curve = CircleCurve(center=Vec3(0, 0, 0), axis=Vec3(0, 0, 1), radius=5.0)
    m.edges = {100: Edge(curve=curve, start_vertex=1, end_vertex=2)}
    fv = extract_features(m)
    assert fv.total_edge_length == pytest.approx(math.hypot(9.0, 9.0))


def test_unknown_curve_measures_chord():
    m = BrepModel()
    m.vertices = {1: Vec3(0, 0, 0), 2: Vec3(1, 1, 1)}
    e = Edge(curve=OtherCurve("B_SPLINE_CURVE"), start_vertex=1, end_vertex=2)
    assert edge_length(e, m) == pytest.approx(math.sqrt(3.0))


def test_empty_model_yields_zero_vector():
    fv = extract_features(BrepModel())
    assert fv.to_list() == [0.0] * 14


def test_feature_vector_validation():
    with pytest.raises(ValidationError):
        FeatureVector(bbox_a=1.0, bbox_b=2.0, bbox_c=0.0)  # not sorted
    with pytest.raises(ValidationError):
        FeatureVector(hole_count=0, mean_hole_diameter=3.0)
    with pytest.raises(ValidationError):
        FeatureVector(edge_count=-1)


def test_feature_vector_dict_round_trip(four_hole_plate):
    fv = features_of(four_hole_plate)
    d = fv.to_dict()
    assert d["schema"] == "f1"
    assert FeatureVector.from_dict(d) == fv
    with pytest.raises(ValidationError):
        FeatureVector.from_dict({**d, "schema": "f2"})
    missing = dict(d)
    del missing["edge_count"]
    with pytest.raises(ValidationError):
        FeatureVector.from_dict(missing)


def test_replace_thickness():
    fv = FeatureVector(material_thickness=2.0, bbox_a=1.0, bbox_b=1.0, bbox_c=1.0)
    fv2 = fv.replace_thickness(5.0)
    assert fv2.material_thickness == 5.0
    assert fv.material_thickness == 2.0  # original untouched


# ------------------------------------------------------------------ plategen


def test_hole_outside_outline_rejected():
    with pytest.raises(InvalidGeometryError):
        generate_plate_step(50.0, 50.0, 2.0, [(48.0, 25.0, 10.0)])


def test_hole_touching_border_rejected():
    with pytest.raises(InvalidGeometryError):
        generate_plate_step(50.0, 50.0, 2.0, [(5.0, 25.0, 10.0)])


def test_overlapping_holes_rejected():
    with pytest.raises(InvalidGeometryError) as exc:
        generate_plate_step(100.0, 100.0, 2.0, [(40.0, 50.0, 20.0), (55.0, 50.0, 20.0)])
    assert "overlap" in str(exc.value)


def test_tangent_holes_rejected():
    with pytest.raises(InvalidGeometryError):
        generate_plate_step(100.0, 100.0, 2.0, [(40.0, 50.0, 10.0), (50.0, 50.0, 10.0)])


def test_nonpositive_dimensions_rejected():
    for bad in ((0.0, 50.0, 2.0), (50.0, -1.0, 2.0), (50.0, 50.0, 0.0)):
        with pytest.raises(InvalidGeometryError):
            generate_plate_step(*bad)
    with pytest.raises(InvalidGeometryError):
        generate_plate_step(50.0, 50.0, 2.0, [(25.0, 25.0, 0.0)])


def test_generated_file_is_valid_step(four_hole_plate):
    step = parse_step(four_hole_plate)
    names = {inst.name for inst in step.instances.values()}
    assert "MANIFOLD_SOLID_BREP" in names
    assert "CLOSED_SHELL" in names
    model = build_brep(step)
    assert len(model.shells) == 1
