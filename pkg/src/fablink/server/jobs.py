"""Model registry (atomic active-model swap) and the training-job
coordinator (single flight: at most one running job per platform)."""

from __future__ import annotations

import hashlib
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fablink.errors import FablinkError
from fablink.predictor.artifact import (
    MODEL_FILE_SUFFIX,
    FormatError,
    load_model,
    save_model,
)
from fablink.predictor.train import ModelArtifact, TrainConfig, train
from fablink.store.aggregate import build_dataset
from fablink.store.records import NotFoundError


class NoActiveModel(FablinkError):
    """Prediction requested before any model was trained (HTTP 503)."""


class JobAlreadyRunning(FablinkError):
    """A training job is already in flight (HTTP 409)."""


class ModelRegistry:
    """Content-addressed model files plus an ``active`` pointer file.

    The in-memory (model_id, artifact) pair is replaced in one
    assignment, so concurrent readers always see exactly one model.
    """

    def __init__(self, models_dir: str | Path):
        self.models_dir = Path(models_dir)
        self.models_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._active: tuple[str, ModelArtifact] | None = None
        self._load_active_pointer()

    def _pointer_path(self) -> Path:
        return self.models_dir / "active"

    def _model_path(self, model_id: str) -> Path:
        return self.models_dir / f"{model_id}{MODEL_FILE_SUFFIX}"

    def _load_active_pointer(self):
        pointer = self._pointer_path()
        if not pointer.exists():
            return
        model_id = pointer.read_text(encoding="utf-8").strip()
        path = self._model_path(model_id)
        if not model_id or not path.exists():
            return
        try:
            self._active = (model_id, load_model(path.read_bytes()))
        except FormatError:
            self._active = None

    def save_and_activate(self, artifact: ModelArtifact) -> str:
        data = save_model(artifact)
        model_id = hashlib.sha256(data).hexdigest()[:16]
        with self._lock:
            path = self._model_path(model_id)
            if not path.exists():
                tmp = path.with_suffix(".tmp")
                tmp.write_bytes(data)
                tmp.replace(path)
            pointer_tmp = self._pointer_path().with_suffix(".tmp")
            pointer_tmp.write_text(model_id + "\n", encoding="utf-8")
            pointer_tmp.replace(self._pointer_path())
            self._active = (model_id, artifact)
        return model_id

    def active(self) -> tuple[str, ModelArtifact]:
        active = self._active
        if active is None:
            raise NoActiveModel("no trained model is active yet")
        return active

    def has_active(self) -> bool:
        return self._active is not None

    def get(self, model_id: str) -> ModelArtifact:
        path = self._model_path(model_id)
        if not path.exists():
            raise NotFoundError(f"no model {model_id!r}")
        return load_model(path.read_bytes())

    def list_models(self) -> list[dict]:
        active_id = self._active[0] if self._active is not None else None
        out = []
        for path in sorted(self.models_dir.glob(f"*{MODEL_FILE_SUFFIX}")):
            model_id = path.name[: -len(MODEL_FILE_SUFFIX)]
            try:
                artifact = load_model(path.read_bytes())
            except FormatError:
                continue
            out.append({
                "model_id": model_id,
                "active": model_id == active_id,
                "feature_schema": artifact.feature_schema,
                "metadata": artifact.metadata,
            })
        return out


@dataclass(slots=True)
class TrainJob:
    job_id: str
    state: str  # queued | running | succeeded | failed
    started_ts_ms: int
    finished_ts_ms: Optional[int] = None
    result: Optional[str] = None  # model id
    error: Optional[str] = None

    def to_dict(self) -> dict:
        out = {
            "job_id": self.job_id,
            "state": self.state,
            "started_ts_ms": self.started_ts_ms,
        }
        if self.finished_ts_ms is not None:
            out["finished_ts_ms"] = self.finished_ts_ms
        if self.result is not None:
            out["result"] = self.result
        if self.error is not None:
            out["error"] = self.error
        return out


@dataclass(slots=True)
class TrainJobManager:
    store: object
    registry: ModelRegistry
    _lock: threading.Lock = field(default_factory=threading.Lock)
    _jobs: dict[str, TrainJob] = field(default_factory=dict)
    _threads: dict[str, threading.Thread] = field(default_factory=dict)
    _counter: int = 0

    def start(self, cfg: TrainConfig) -> TrainJob:
        """Queue and launch one training job; 409 while one is in flight."""
        with self._lock:
            for job in self._jobs.values():
                if job.state in ("queued", "running"):
                    raise JobAlreadyRunning(f"job {job.job_id} is {job.state}")
            self._counter += 1
            job = TrainJob(
                job_id=f"job-{self._counter}",
                state="queued",
                started_ts_ms=int(time.time() * 1000),
            )
            self._jobs[job.job_id] = job
            thread = threading.Thread(
                target=self._run, args=(job, cfg), name=job.job_id, daemon=True
            )
            self._threads[job.job_id] = thread
            thread.start()
        return job

    def _run(self, job: TrainJob, cfg: TrainConfig):
        with self._lock:
            job.state = "running"
        try:
            pairs = build_dataset(self.store)
            artifact = train(pairs, cfg)
            model_id = self.registry.save_and_activate(artifact)
        except FablinkError as exc:
            with self._lock:
                job.state = "failed"
                job.error = f"{type(exc).__name__}: {exc}"
                job.finished_ts_ms = int(time.time() * 1000)
            return
        except Exception as exc:  # keep the job record honest on bugs too
            with self._lock:
                job.state = "failed"
                job.error = f"{type(exc).__name__}: {exc}"
                job.finished_ts_ms = int(time.time() * 1000)
            return
        with self._lock:
            job.state = "succeeded"
            job.result = model_id
            job.finished_ts_ms = int(time.time() * 1000)

    def get(self, job_id: str) -> TrainJob:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                raise NotFoundError(f"no train job {job_id!r}")
            return job

    def wait(self, job_id: str, timeout: float | None = None) -> TrainJob:
        thread = self._threads.get(job_id)
        if thread is not None:
            thread.join(timeout)
        return self.get(job_id)
