"""Neural regression from design features to process outcome predictions."""

from fablink.predictor.artifact import (
    MODEL_FILE_SUFFIX,
    FormatError,
    Prediction,
    SchemaMismatch,
    load_model,
    predict,
    save_model,
)
from fablink.predictor.mlp import (
    DEFAULT_DIMS,
    Mlp,
    ShapeError,
    forward,
    forward_batch,
    init_mlp,
    loss_and_grad,
)
from fablink.predictor.train import (
    ARTIFACT_SCHEMA_VERSION,
    TARGET_FIELDS,
    DatasetTooSmall,
    ModelArtifact,
    NonFiniteLoss,
    Standardizer,
    TrainConfig,
    train,
)

__all__ = [
    "ARTIFACT_SCHEMA_VERSION",
    "DEFAULT_DIMS",
    "MODEL_FILE_SUFFIX",
    "TARGET_FIELDS",
    "DatasetTooSmall",
    "FormatError",
    "Mlp",
    "ModelArtifact",
    "NonFiniteLoss",
    "Prediction",
    "SchemaMismatch",
    "ShapeError",
    "Standardizer",
    "TrainConfig",
    "forward",
    "forward_batch",
    "init_mlp",
    "load_model",
    "loss_and_grad",
    "predict",
    "save_model",
    "train",
]
