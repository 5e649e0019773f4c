"""Inference and model serialization.

A saved model is one JSON document (conventional file name suffix
``.fablink-model.json``) holding the layer dims, row-major weight
arrays, both standardizers, and the training metadata.  load(save(a))
yields bit-identical predictions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from fablink.errors import FablinkError
from fablink.geometry.features import FeatureVector
from fablink.predictor.mlp import Mlp, ShapeError, forward
from fablink.predictor.train import (
    ARTIFACT_SCHEMA_VERSION,
    ModelArtifact,
    Standardizer,
)

MODEL_FILE_SUFFIX = ".fablink-model.json"


class SchemaMismatch(FablinkError):
    pass


class FormatError(FablinkError):
    pass


@dataclass(frozen=True, slots=True)
class Prediction:
    energy_wh: float
    production_time_s: float
    co2_kg: Optional[float] = None

    def to_dict(self) -> dict:
        out = {"energy_wh": self.energy_wh, "production_time_s": self.production_time_s}
        if self.co2_kg is not None:
            out["co2_kg"] = self.co2_kg
        return out


def predict(
    artifact: ModelArtifact,
    features: FeatureVector,
    emission_factor: float | None = None,
) -> Prediction:
    """Standardize, run the network, destandardize, clamp at zero.

    co2_kg = energy_wh / 1000 × emission_factor (kg per kWh) when a
    factor is supplied.
    """
    if artifact.feature_schema != features.to_dict()["schema"]:
        raise SchemaMismatch(
            f"model expects feature schema {artifact.feature_schema!r}"
        )
    x = artifact.x_standardizer.transform(np.asarray(features.to_list()))
    y = artifact.y_standardizer.inverse(forward(artifact.mlp, x))
    energy_wh = max(0.0, float(y[0]))
    production_time_s = max(0.0, float(y[1]))
    co2_kg = None
    if emission_factor is not None:
        if emission_factor < 0:
            raise SchemaMismatch("emission_factor must be >= 0")
        co2_kg = energy_wh / 1000.0 * emission_factor
    return Prediction(
        energy_wh=energy_wh, production_time_s=production_time_s, co2_kg=co2_kg
    )


def save_model(artifact: ModelArtifact) -> bytes:
    doc = {
        "schema_version": artifact.schema_version,
        "feature_schema": artifact.feature_schema,
        "dims": list(artifact.mlp.dims),
        "weights": [w.tolist() for w in artifact.mlp.weights],
        "biases": [b.tolist() for b in artifact.mlp.biases],
        "x_standardizer": artifact.x_standardizer.to_json_obj(),
        "y_standardizer": artifact.y_standardizer.to_json_obj(),
        "metadata": artifact.metadata,
    }
    return (json.dumps(doc, sort_keys=True) + "\n").encode("utf-8")


def load_model(data: bytes) -> ModelArtifact:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"not a model file: {exc}") from None
    if not isinstance(doc, dict):
        raise FormatError("model file must hold a JSON object")
    if doc.get("schema_version") != ARTIFACT_SCHEMA_VERSION:
        raise FormatError(
            f"unsupported model schema version {doc.get('schema_version')!r}"
        )
    try:
        dims = tuple(int(d) for d in doc["dims"])
        weights = [np.asarray(w, dtype=np.float64) for w in doc["weights"]]
        biases = [np.asarray(b, dtype=np.float64) for b in doc["biases"]]
        x_std = Standardizer.from_json_obj(doc["x_standardizer"])
        y_std = Standardizer.from_json_obj(doc["y_standardizer"])
        feature_schema = doc["feature_schema"]
        metadata = doc.get("metadata", {})
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed model file: {exc}") from None
    try:
        mlp = Mlp(dims=dims, weights=weights, biases=biases)
    except ShapeError as exc:
        raise FormatError(str(exc)) from None
    if x_std.mean.shape != (dims[0],) or y_std.mean.shape != (dims[-1],):
        raise FormatError("standardizer dims do not match the network")
    if not (np.all(np.isfinite(x_std.mean)) and np.all(np.isfinite(x_std.std))
            and np.all(np.isfinite(y_std.mean)) and np.all(np.isfinite(y_std.std))):
        raise FormatError("standardizer values must be finite")
    return ModelArtifact(
        feature_schema=feature_schema,
        x_standardizer=x_std,
        y_standardizer=y_std,
        mlp=mlp,
        metadata=metadata,
        schema_version=doc["schema_version"],
    )
