"""B-rep traversal, design-feature extraction and plate fixture generation."""

from fablink.geometry.build import build_brep
from fablink.geometry.features import (
    FEATURE_FIELDS,
    FEATURE_SCHEMA,
    FeatureVector,
    Hole,
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
    OtherSurface,
    PlaneSurface,
)
from fablink.geometry.plategen import InvalidGeometryError, generate_plate_step
from fablink.geometry.tolerances import TOLERANCES, GeometryTolerances
from fablink.geometry.vec import Vec3

__all__ = [
    "build_brep",
    "extract_features",
    "detect_holes",
    "estimate_thickness",
    "edge_length",
    "generate_plate_step",
    "FeatureVector",
    "FEATURE_FIELDS",
    "FEATURE_SCHEMA",
    "Hole",
    "BrepModel",
    "Edge",
    "Face",
    "FaceLoop",
    "LineCurve",
    "CircleCurve",
    "OtherCurve",
    "PlaneSurface",
    "CylinderSurface",
    "OtherSurface",
    "GeometryError",
    "InvalidGeometryError",
    "Vec3",
    "GeometryTolerances",
    "TOLERANCES",
]
