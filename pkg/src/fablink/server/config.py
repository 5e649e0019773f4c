"""Platform configuration.

One JSON file holds every deployment setting; the ``FABLINK_CONFIG``
environment variable points at it.  Missing keys take defaults, unknown
keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fablink.errors import ValidationError

ENV_VAR = "FABLINK_CONFIG"

DEFAULT_HTTP_PORT = 7700
DEFAULT_TELEMETRY_PORT = 7701


@dataclass(frozen=True, slots=True)
class TrainDefaults:
    epochs: int = 500
    batch_size: int = 32
    learning_rate: float = 1e-3
    seed: int = 0
    validation_fraction: float = 0.2

    @classmethod
    def from_json_obj(cls, obj: dict) -> "TrainDefaults":
        _check_keys("train", obj, {f for f in cls.__dataclass_fields__})
        return cls(**obj)


@dataclass(frozen=True, slots=True)
class PlatformConfig:
    data_dir: Path = Path("fablink-data")
    http_port: int = DEFAULT_HTTP_PORT
    telemetry_port: int = DEFAULT_TELEMETRY_PORT
    drop_folder: Optional[Path] = None
    poll_interval_s: float = 5.0
    emission_factor_kg_per_kwh: float = 0.4
    train: TrainDefaults = field(default_factory=TrainDefaults)

    def __post_init__(self):
        if not 0 < self.http_port < 65536 or not 0 < self.telemetry_port < 65536:
            raise ValidationError("ports must lie in 1..65535")
        if self.poll_interval_s <= 0:
            raise ValidationError("poll_interval_s must be > 0")
        if self.emission_factor_kg_per_kwh < 0:
            raise ValidationError("emission_factor_kg_per_kwh must be >= 0")

    @classmethod
    def from_json_obj(cls, obj: dict) -> "PlatformConfig":
        if not isinstance(obj, dict):
            raise ValidationError("config must be a JSON object")
        _check_keys("config", obj, {f for f in cls.__dataclass_fields__})
        kwargs = dict(obj)
        try:
            if "data_dir" in kwargs:
                kwargs["data_dir"] = Path(kwargs["data_dir"])
            if kwargs.get("drop_folder") is not None:
                kwargs["drop_folder"] = Path(kwargs["drop_folder"])
            if "train" in kwargs:
                kwargs["train"] = TrainDefaults.from_json_obj(kwargs["train"])
            return cls(**kwargs)
        except TypeError as exc:
            raise ValidationError(f"bad config value: {exc}") from None


def _check_keys(where: str, obj: dict, allowed: set[str]):
    unknown = set(obj) - allowed
    if unknown:
        raise ValidationError(f"unknown {where} key {sorted(unknown)[0]!r}")


def load_config(path: str | Path | None = None) -> PlatformConfig:
    """Load the config file, or defaults when none is configured."""
    if path is None:
        path = os.environ.get(ENV_VAR)
    if path is None:
        return PlatformConfig()
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"config file {path} does not exist")
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config file {path} is not valid JSON: {exc.msg}") from None
    return PlatformConfig.from_json_obj(obj)
