"""Persisted record types for the three on-disk stores.

Every record serializes to one JSON line carrying a ``schema`` version
and a ``kind`` discriminator, and validates its own invariants on
construction.  Natural keys drive the store's idempotence rules.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from fablink.errors import FablinkError, ValidationError
from fablink.geometry.features import FeatureVector
from fablink.telemetry.protocol import EVENT_TYPES, MACHINE_STATES

RECORD_SCHEMA = "r1"

ARTICLE_ID_RE = re.compile(r"^[A-Za-z0-9_-]{1,64}$")
KEY_RE = re.compile(r"^[A-Za-z0-9_.:-]{1,160}$")

FEEDBACK_CATEGORIES = ("dimensional", "surface", "material", "process", "other")
FEEDBACK_SEVERITIES = ("minor", "major", "scrap")

USER_ROLES = ("designer", "manufacturer", "admin")


class StoreError(FablinkError):
    pass


class IntegrityError(StoreError):
    """A record references an article (or blob) that does not exist."""


class ConflictError(StoreError):
    """A record reuses an existing natural key with different content."""


class NotFoundError(StoreError):
    pass


def _require_ts(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ValidationError(f"{name} must be a non-negative integer")
    return value


def _require_key(name: str, value, pattern: re.Pattern) -> str:
    if not isinstance(value, str) or not pattern.match(value):
        raise ValidationError(f"{name} {value!r} does not match {pattern.pattern}")
    return value


@dataclass(frozen=True, slots=True)
class Article:
    article_id: str
    name: str
    material: str
    created_ts_ms: int

    def __post_init__(self):
        _require_key("article_id", self.article_id, ARTICLE_ID_RE)
        if not isinstance(self.name, str) or not isinstance(self.material, str):
            raise ValidationError("name and material must be strings")
        _require_ts("created_ts_ms", self.created_ts_ms)

    @property
    def key(self) -> str:
        return self.article_id

    def to_json_obj(self) -> dict:
        return {
            "schema": RECORD_SCHEMA,
            "kind": "article",
            "article_id": self.article_id,
            "name": self.name,
            "material": self.material,
            "created_ts_ms": self.created_ts_ms,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Article":
        return cls(
            article_id=obj["article_id"],
            name=obj["name"],
            material=obj["material"],
            created_ts_ms=obj["created_ts_ms"],
        )


@dataclass(frozen=True, slots=True)
class DesignVariant:
    variant_id: str
    article_id: str
    step_blob_hash: str
    features: FeatureVector
    created_ts_ms: int
    uploaded_by: str
    thickness_override: Optional[float] = None

    def __post_init__(self):
        _require_key("variant_id", self.variant_id, KEY_RE)
        _require_key("article_id", self.article_id, ARTICLE_ID_RE)
        if not re.fullmatch(r"[0-9a-f]{64}", self.step_blob_hash or ""):
            raise ValidationError("step_blob_hash must be lowercase SHA-256 hex")
        if not isinstance(self.features, FeatureVector):
            raise ValidationError("features must be a FeatureVector")
        _require_ts("created_ts_ms", self.created_ts_ms)
        if not isinstance(self.uploaded_by, str) or not self.uploaded_by:
            raise ValidationError("uploaded_by must be a non-empty string")
        if self.thickness_override is not None:
            v = self.thickness_override
            if isinstance(v, bool) or not isinstance(v, (int, float)) or v <= 0:
                raise ValidationError("thickness_override must be > 0")

    @property
    def key(self) -> str:
        return self.variant_id

    def effective_features(self) -> FeatureVector:
        """Features with the manual thickness override applied, if any."""
        if self.thickness_override is None:
            return self.features
        return self.features.replace_thickness(float(self.thickness_override))

    def to_json_obj(self) -> dict:
        obj = {
            "schema": RECORD_SCHEMA,
            "kind": "variant",
            "variant_id": self.variant_id,
            "article_id": self.article_id,
            "step_blob_hash": self.step_blob_hash,
            "features": self.features.to_dict(),
            "created_ts_ms": self.created_ts_ms,
            "uploaded_by": self.uploaded_by,
        }
        if self.thickness_override is not None:
            obj["thickness_override"] = self.thickness_override
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "DesignVariant":
        return cls(
            variant_id=obj["variant_id"],
            article_id=obj["article_id"],
            step_blob_hash=obj["step_blob_hash"],
            features=FeatureVector.from_dict(obj["features"]),
            created_ts_ms=obj["created_ts_ms"],
            uploaded_by=obj["uploaded_by"],
            thickness_override=obj.get("thickness_override"),
        )


@dataclass(frozen=True, slots=True)
class MachineEvent:
    machine_id: str
    seq: int
    ts_ms: int
    article_id: str
    event_type: str
    ingest_ts_ms: int
    code: Optional[str] = None
    message: Optional[str] = None

    def __post_init__(self):
        if not self.machine_id or not isinstance(self.machine_id, str):
            raise ValidationError("machine_id must be a non-empty string")
        if isinstance(self.seq, bool) or not isinstance(self.seq, int) or self.seq < 1:
            raise ValidationError("seq must be a positive integer")
        _require_ts("ts_ms", self.ts_ms)
        if not isinstance(self.article_id, str) or not self.article_id:
            raise ValidationError("article_id must be a non-empty string")
        if self.event_type not in EVENT_TYPES:
            raise ValidationError(f"unknown event_type {self.event_type!r}")
        _require_ts("ingest_ts_ms", self.ingest_ts_ms)

    @property
    def key(self) -> tuple[str, int]:
        return (self.machine_id, self.seq)

    def to_json_obj(self) -> dict:
        obj = {
            "schema": RECORD_SCHEMA,
            "kind": "event",
            "machine_id": self.machine_id,
            "seq": self.seq,
            "ts_ms": self.ts_ms,
            "article_id": self.article_id,
            "event_type": self.event_type,
            "ingest_ts_ms": self.ingest_ts_ms,
        }
        if self.code is not None:
            obj["code"] = self.code
        if self.message is not None:
            obj["message"] = self.message
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "MachineEvent":
        return cls(
            machine_id=obj["machine_id"],
            seq=obj["seq"],
            ts_ms=obj["ts_ms"],
            article_id=obj["article_id"],
            event_type=obj["event_type"],
            ingest_ts_ms=obj["ingest_ts_ms"],
            code=obj.get("code"),
            message=obj.get("message"),
        )


@dataclass(frozen=True, slots=True)
class MachineStatus:
    machine_id: str
    seq: int
    ts_ms: int
    article_id: str
    power_w: float
    tool_wear: float
    state: str
    ingest_ts_ms: int

    def __post_init__(self):
        if not self.machine_id or not isinstance(self.machine_id, str):
            raise ValidationError("machine_id must be a non-empty string")
        if isinstance(self.seq, bool) or not isinstance(self.seq, int) or self.seq < 1:
            raise ValidationError("seq must be a positive integer")
        _require_ts("ts_ms", self.ts_ms)
        if not isinstance(self.article_id, str) or not self.article_id:
            raise ValidationError("article_id must be a non-empty string")
        if not isinstance(self.power_w, (int, float)) or self.power_w < 0:
            raise ValidationError("power_w must be >= 0")
        if not 0.0 <= self.tool_wear <= 1.0:
            raise ValidationError("tool_wear must lie in [0, 1]")
        if self.state not in MACHINE_STATES:
            raise ValidationError(f"unknown machine state {self.state!r}")
        _require_ts("ingest_ts_ms", self.ingest_ts_ms)

    @property
    def key(self) -> tuple[str, int]:
        return (self.machine_id, self.seq)

    def to_json_obj(self) -> dict:
        return {
            "schema": RECORD_SCHEMA,
            "kind": "status",
            "machine_id": self.machine_id,
            "seq": self.seq,
            "ts_ms": self.ts_ms,
            "article_id": self.article_id,
            "power_w": float(self.power_w),
            "tool_wear": float(self.tool_wear),
            "state": self.state,
            "ingest_ts_ms": self.ingest_ts_ms,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "MachineStatus":
        return cls(
            machine_id=obj["machine_id"],
            seq=obj["seq"],
            ts_ms=obj["ts_ms"],
            article_id=obj["article_id"],
            power_w=obj["power_w"],
            tool_wear=obj["tool_wear"],
            state=obj["state"],
            ingest_ts_ms=obj["ingest_ts_ms"],
        )


@dataclass(frozen=True, slots=True)
class Feedback:
    feedback_id: str
    article_id: str
    reporter: str
    category: str
    severity: str
    text: str
    created_ts_ms: int

    def __post_init__(self):
        _require_key("feedback_id", self.feedback_id, KEY_RE)
        _require_key("article_id", self.article_id, ARTICLE_ID_RE)
        if not isinstance(self.reporter, str) or not self.reporter:
            raise ValidationError("reporter must be a non-empty string")
        if self.category not in FEEDBACK_CATEGORIES:
            raise ValidationError(f"unknown feedback category {self.category!r}")
        if self.severity not in FEEDBACK_SEVERITIES:
            raise ValidationError(f"unknown feedback severity {self.severity!r}")
        if not isinstance(self.text, str):
            raise ValidationError("text must be a string")
        _require_ts("created_ts_ms", self.created_ts_ms)

    @property
    def key(self) -> str:
        return self.feedback_id

    def to_json_obj(self) -> dict:
        return {
            "schema": RECORD_SCHEMA,
            "kind": "feedback",
            "feedback_id": self.feedback_id,
            "article_id": self.article_id,
            "reporter": self.reporter,
            "category": self.category,
            "severity": self.severity,
            "text": self.text,
            "created_ts_ms": self.created_ts_ms,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Feedback":
        return cls(
            feedback_id=obj["feedback_id"],
            article_id=obj["article_id"],
            reporter=obj["reporter"],
            category=obj["category"],
            severity=obj["severity"],
            text=obj["text"],
            created_ts_ms=obj["created_ts_ms"],
        )


@dataclass(frozen=True, slots=True)
class User:
    user_id: str
    role: str
    token_sha256: str
    created_ts_ms: int

    def __post_init__(self):
        _require_key("user_id", self.user_id, KEY_RE)
        if self.role not in USER_ROLES:
            raise ValidationError(f"unknown role {self.role!r}")
        if not re.fullmatch(r"[0-9a-f]{64}", self.token_sha256 or ""):
            raise ValidationError("token_sha256 must be lowercase SHA-256 hex")
        _require_ts("created_ts_ms", self.created_ts_ms)

    @property
    def key(self) -> str:
        return self.user_id

    def to_json_obj(self) -> dict:
        return {
            "schema": RECORD_SCHEMA,
            "kind": "user",
            "user_id": self.user_id,
            "role": self.role,
            "token_sha256": self.token_sha256,
            "created_ts_ms": self.created_ts_ms,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "User":
        return cls(
            user_id=obj["user_id"],
            role=obj["role"],
            token_sha256=obj["token_sha256"],
            created_ts_ms=obj["created_ts_ms"],
        )


@dataclass(frozen=True, slots=True)
class ProcessOutcome:
    """Aggregated result of one job; derived, never persisted."""

    article_id: str
    job_index: int
    machine_id: str
    production_time_s: float
    energy_wh: float
    tool_wear_delta: float
    error_count: int
    complete: bool
    start_ts_ms: int
    end_ts_ms: Optional[int]

    def __post_init__(self):
        if self.complete and not (self.production_time_s > 0 and self.energy_wh >= 0):
            raise ValidationError(
                "complete outcome requires production_time_s > 0 and energy_wh >= 0"
            )

    def to_json_obj(self) -> dict:
        return {
            "article_id": self.article_id,
            "job_index": self.job_index,
            "machine_id": self.machine_id,
            "production_time_s": self.production_time_s,
            "energy_wh": self.energy_wh,
            "tool_wear_delta": self.tool_wear_delta,
            "error_count": self.error_count,
            "complete": self.complete,
            "start_ts_ms": self.start_ts_ms,
            "end_ts_ms": self.end_ts_ms,
        }


@dataclass(frozen=True, slots=True)
class TrainingPair:
    article_id: str
    features: FeatureVector
    targets: tuple[float, float]  # (energy_wh, production_time_s)

    def to_json_obj(self) -> dict:
        return {
            "article_id": self.article_id,
            "features": self.features.to_dict(),
            "targets": {"energy_wh": self.targets[0], "production_time_s": self.targets[1]},
        }


KIND_TO_TYPE = {
    "article": Article,
    "variant": DesignVariant,
    "event": MachineEvent,
    "status": MachineStatus,
    "feedback": Feedback,
    "user": User,
}


def record_from_json_obj(obj: dict):
    if not isinstance(obj, dict):
        raise ValidationError("record line must hold a JSON object")
    if obj.get("schema") != RECORD_SCHEMA:
        raise ValidationError(f"unsupported record schema {obj.get('schema')!r}")
    kind = obj.get("kind")
    cls = KIND_TO_TYPE.get(kind)
    if cls is None:
        raise ValidationError(f"unknown record kind {kind!r}")
    try:
        return cls.from_json_obj(obj)
    except KeyError as exc:
        raise ValidationError(f"{kind} record missing field {exc.args[0]!r}") from None
