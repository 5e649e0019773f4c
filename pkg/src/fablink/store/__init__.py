"""Article-keyed persistence, aggregation, and dataset assembly."""

from fablink.store.aggregate import (
    EmptyDataset,
    InsufficientData,
    assemble_outcomes,
    build_dataset,
    integrate_power,
)
from fablink.store.records import (
    ARTICLE_ID_RE,
    FEEDBACK_CATEGORIES,
    FEEDBACK_SEVERITIES,
    RECORD_SCHEMA,
    USER_ROLES,
    Article,
    ConflictError,
    DesignVariant,
    Feedback,
    IntegrityError,
    MachineEvent,
    MachineStatus,
    NotFoundError,
    ProcessOutcome,
    StoreError,
    TrainingPair,
    User,
)
from fablink.store.store import LinkageStore

__all__ = [
    "ARTICLE_ID_RE",
    "FEEDBACK_CATEGORIES",
    "FEEDBACK_SEVERITIES",
    "RECORD_SCHEMA",
    "USER_ROLES",
    "Article",
    "ConflictError",
    "DesignVariant",
    "EmptyDataset",
    "Feedback",
    "InsufficientData",
    "IntegrityError",
    "LinkageStore",
    "MachineEvent",
    "MachineStatus",
    "NotFoundError",
    "ProcessOutcome",
    "StoreError",
    "TrainingPair",
    "User",
    "assemble_outcomes",
    "build_dataset",
    "integrate_power",
]
