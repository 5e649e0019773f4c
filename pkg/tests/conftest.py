"""Shared fixtures and closed-form oracles for the fablink test suite.

The plate oracle values are computed here from first principles
(rectangle perimeters, circle circumferences, box topology counts) so
the geometry tests never compare the extractor against itself.
"""

from __future__ import annotations

import math
import random

import pytest

from fablink.geometry.build import build_brep
from fablink.geometry.features import FeatureVector, extract_features
from fablink.geometry.plategen import generate_plate_step
from fablink.step.parser import parse_step
from fablink.store.store import LinkageStore


def features_of(data: bytes) -> FeatureVector:
    """Full parse -> traverse -> extract pipeline on raw STEP bytes."""
    return extract_features(build_brep(parse_step(data)))


def plate_oracle(length: float, width: float, thickness: float, holes=()) -> dict:
    """Expected f1 values for a generated plate, from closed forms.

    Box topology: 6 faces, 12 edges, 8 vertices; each through-hole adds
    one cylindrical face and two circular edges with one seam vertex
    each.  Cut length = both outer rectangles + 4 vertical edges + two
    circles of circumference pi*d per hole.
    """
    holes = list(holes)
    h = len(holes)
    diameters = [d for _, _, d in holes]
    return {
        "face_count_total": 6 + h,
        "face_count_planar": 6,
        "face_count_cylindrical": h,
        "face_count_other": 0,
        "edge_count": 12 + 2 * h,
        "vertex_count": 8 + 2 * h,
        "shell_count": 1,
        "hole_count": h,
        "mean_hole_diameter": sum(diameters) / h if h else 0.0,
        "material_thickness": float(thickness),
        "bbox": sorted([float(length), float(width), float(thickness)], reverse=True),
        "total_edge_length": (
            4.0 * (length + width) + 4.0 * thickness + sum(2.0 * math.pi * d for d in diameters)
        ),
    }


def random_plate_spec(rng: random.Random) -> tuple[float, float, float, list[tuple[float, float, float]]]:
    """One random plate within the fixture envelope.

    L, W in [50, 300] mm, thickness in {1, 2, 3}, up to 8 holes with
    diameters 5..20 mm placed by rejection sampling so they stay
    strictly inside the outline and clear of each other.
    """
    length = rng.uniform(50.0, 300.0)
    width = rng.uniform(50.0, 300.0)
    thickness = float(rng.choice((1, 2, 3)))
    want = rng.randint(0, 8)
    holes: list[tuple[float, float, float]] = []
    for _ in range(want):
        for _attempt in range(50):
            d = rng.uniform(5.0, 20.0)
            r = d / 2.0
            if 2 * r + 2.0 >= min(length, width):
                continue
            cx = rng.uniform(r + 1.0, length - r - 1.0)
            cy = rng.uniform(r + 1.0, width - r - 1.0)
            if all(
                math.hypot(cx - ox, cy - oy) > (d + od) / 2.0 + 0.5
                for ox, oy, od in holes
            ):
                holes.append((cx, cy, d))
                break
    return length, width, thickness, holes


def rotation_axis_angle(axis: tuple[float, float, float], angle: float):
    """Rodrigues rotation matrix (rows) about a unit axis."""
    x, y, z = axis
    n = math.sqrt(x * x + y * y + z * z)
    x, y, z = x / n, y / n, z / n
    c, s = math.cos(angle), math.sin(angle)
    t = 1.0 - c
    return (
        (t * x * x + c, t * x * y - s * z, t * x * z + s * y),
        (t * x * y + s * z, t * y * y + c, t * y * z - s * x),
        (t * x * z - s * y, t * y * z + s * x, t * z * z + c),
    )


# Proper rotations that keep the box axis-aligned (signed permutations
# with determinant +1): these preserve the bounding box exactly.
AXIS_ALIGNED_ROTATIONS = (
    ((0, -1, 0), (1, 0, 0), (0, 0, 1)),  # 90 deg about Z
    ((1, 0, 0), (0, 0, -1), (0, 1, 0)),  # 90 deg about X
    ((0, 0, 1), (0, 1, 0), (-1, 0, 0)),  # 90 deg about Y
    ((0, 1, 0), (0, 0, 1), (1, 0, 0)),  # cyclic axes permutation
)


@pytest.fixture()
def plain_plate() -> bytes:
    return generate_plate_step(100.0, 100.0, 2.0)


@pytest.fixture()
def four_hole_plate() -> bytes:
    """The canonical fixture: 100 x 100 x 2 plate with 4 corner holes."""
    return generate_plate_step(
        100.0, 100.0, 2.0,
        holes=[(25.0, 25.0, 10.0), (75.0, 25.0, 10.0),
               (25.0, 75.0, 10.0), (75.0, 75.0, 10.0)],
    )


@pytest.fixture()
def store(tmp_path):
    s = LinkageStore(tmp_path / "data")
    yield s
    try:
        s.close()
    except Exception:
        pass


def simple_features(edge_length: float = 500.0, holes: int = 0) -> FeatureVector:
    """Minimal plausible f1 vector for simulator/predictor tests."""
    return FeatureVector(
        face_count_total=6 + holes,
        face_count_planar=6,
        face_count_cylindrical=holes,
        face_count_other=0,
        edge_count=12 + 2 * holes,
        vertex_count=8 + 2 * holes,
        shell_count=1,
        hole_count=holes,
        mean_hole_diameter=8.0 if holes else 0.0,
        material_thickness=2.0,
        bbox_a=100.0,
        bbox_b=80.0,
        bbox_c=2.0,
        total_edge_length=edge_length,
    )
