"""Append-only on-disk store with a startup-rebuilt in-memory index.

Three directories mirror the platform's dedicated databases: ``users/``
(accounts), ``cad/`` (content-addressed STEP blobs plus article/variant
records), and ``process/`` (machine events, statuses, feedback).  Every
record is one JSON line; appends are idempotent on the record's natural
key.  A single OS-level lock guards the directory, and appends within
the process serialize through one mutex, so readers always see a
consistent snapshot.
"""

from __future__ import annotations

import fcntl
import hashlib
import json
import os
import threading
from pathlib import Path
from typing import Optional

from fablink.errors import ValidationError
from fablink.store.records import (
    Article,
    ConflictError,
    DesignVariant,
    Feedback,
    IntegrityError,
    MachineEvent,
    MachineStatus,
    NotFoundError,
    User,
    record_from_json_obj,
)
from fablink.telemetry.protocol import WireMessage

_FILES = {
    "user": ("users", "users.ndjson"),
    "article": ("cad", "records.ndjson"),
    "variant": ("cad", "records.ndjson"),
    "event": ("process", "events.ndjson"),
    "status": ("process", "status.ndjson"),
    "feedback": ("process", "feedback.ndjson"),
}

_VOLATILE = ("ingest_ts_ms",)  # excluded when comparing re-appended content


def _content_key(obj: dict) -> str:
    trimmed = {k: v for k, v in obj.items() if k not in _VOLATILE}
    return json.dumps(trimmed, sort_keys=True, separators=(",", ":"))


class LinkageStore:
    """Single-writer, multi-reader store over append-only NDJSON files."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        for sub in ("users", "cad/blobs", "process"):
            (self.data_dir / sub).mkdir(parents=True, exist_ok=True)

        self._lock_file = open(self.data_dir / ".lock", "w")
        try:
            fcntl.flock(self._lock_file, fcntl.LOCK_EX | fcntl.LOCK_NB)
        except OSError:
            self._lock_file.close()
            raise ConflictError(
                f"store at {self.data_dir} is locked by another process"
            ) from None

        self._mutex = threading.RLock()
        self.articles: dict[str, Article] = {}
        self.variants: dict[str, DesignVariant] = {}
        self.feedback: dict[str, Feedback] = {}
        self.users: dict[str, User] = {}
        self.events: dict[tuple[str, int], MachineEvent] = {}
        self.statuses: dict[tuple[str, int], MachineStatus] = {}
        self._content: dict[tuple, str] = {}
        self._latest_status: dict[str, MachineStatus] = {}
        self._handles: dict[Path, object] = {}

        self._rebuild()

    # ------------------------------------------------------------------ setup

    def _path_for(self, kind: str) -> Path:
        sub, name = _FILES[kind]
        return self.data_dir / sub / name

    def _rebuild(self):
        for path in sorted(set(self._path_for(k) for k in _FILES)):
            if not path.exists():
                continue
            with open(path, "r", encoding="utf-8") as f:
                for line in f:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        record = record_from_json_obj(json.loads(line))
                    except (json.JSONDecodeError, ValidationError):
                        continue  # torn or foreign line; append-only files self-heal
                    self._index(record)

    def _handle(self, kind: str):
        path = self._path_for(kind)
        h = self._handles.get(path)
        if h is None:
            h = open(path, "a", encoding="utf-8")
            self._handles[path] = h
        return h

    def close(self):
        with self._mutex:
            for h in self._handles.values():
                h.flush()
                os.fsync(h.fileno())
                h.close()
            self._handles.clear()
            fcntl.flock(self._lock_file, fcntl.LOCK_UN)
            self._lock_file.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # ------------------------------------------------------------ indexing

    @staticmethod
    def _kind_of(record) -> str:
        return record.to_json_obj()["kind"]

    def _index(self, record):
        kind = self._kind_of(record)
        obj = record.to_json_obj()
        if kind == "article":
            self.articles[record.article_id] = record
            key = ("article", record.article_id)
        elif kind == "variant":
            self.variants[record.variant_id] = record
            key = ("variant", record.variant_id)
        elif kind == "feedback":
            self.feedback[record.feedback_id] = record
            key = ("feedback", record.feedback_id)
        elif kind == "user":
            self.users[record.user_id] = record
            key = ("user", record.user_id)
        elif kind == "event":
            self.events[record.key] = record
            key = ("wire",) + record.key
        elif kind == "status":
            self.statuses[record.key] = record
            prev = self._latest_status.get(record.machine_id)
            if prev is None or (record.ts_ms, record.seq) >= (prev.ts_ms, prev.seq):
                self._latest_status[record.machine_id] = record
            key = ("wire",) + record.key
        else:  # pragma: no cover - records module enforces known kinds
            raise ValidationError(f"unknown record kind {kind!r}")
        self._content[key] = _content_key(obj)

    def _index_key(self, record) -> tuple:
        kind = self._kind_of(record)
        if kind in ("event", "status"):
            return ("wire",) + record.key
        return (kind, record.key)

    # ------------------------------------------------------------- appends

    def append_record(self, record) -> str:
        """Durably append; idempotent on natural key.

        Returns the stored record id.  Re-appending an identical-key,
        identical-content record is a no-op; same key with different
        content raises ConflictError.  Variants and feedback must
        reference an existing article (IntegrityError otherwise), and a
        variant's blob must already be in the blob store.
        """
        kind = self._kind_of(record)
        with self._mutex:
            if kind == "variant":
                if record.article_id not in self.articles:
                    raise IntegrityError(f"unknown article_id {record.article_id!r}")
                if not self.has_blob(record.step_blob_hash):
                    raise IntegrityError(
                        f"blob {record.step_blob_hash} is not in the blob store"
                    )
            elif kind == "feedback":
                if record.article_id not in self.articles:
                    raise IntegrityError(f"unknown article_id {record.article_id!r}")

            key = self._index_key(record)
            existing = self._content.get(key)
            if existing is not None:
                if existing != _content_key(record.to_json_obj()):
                    raise ConflictError(
                        f"{kind} key {record.key!r} already stored with different content"
                    )
                return self._record_id(record)

            h = self._handle(kind)
            h.write(json.dumps(record.to_json_obj(), sort_keys=True,
                               separators=(",", ":")) + "\n")
            h.flush()
            self._index(record)
            return self._record_id(record)

    @staticmethod
    def _record_id(record) -> str:
        key = record.key
        if isinstance(key, tuple):
            return f"{key[0]}:{key[1]}"
        return key

    # Telemetry sink: duplicates detected by natural key alone, per the
    # subscriber's dedupe rule.
    def add_machine_event(self, msg: WireMessage, ingest_ts_ms: int) -> bool:
        record = MachineEvent(
            machine_id=msg.machine_id, seq=msg.seq, ts_ms=msg.ts_ms,
            article_id=msg.article_id, event_type=msg.payload.event_type,
            code=msg.payload.code, message=msg.payload.message,
            ingest_ts_ms=ingest_ts_ms,
        )
        return self._add_wire(record)

    def add_machine_status(self, msg: WireMessage, ingest_ts_ms: int) -> bool:
        record = MachineStatus(
            machine_id=msg.machine_id, seq=msg.seq, ts_ms=msg.ts_ms,
            article_id=msg.article_id, power_w=msg.payload.power_w,
            tool_wear=msg.payload.tool_wear, state=msg.payload.state,
            ingest_ts_ms=ingest_ts_ms,
        )
        return self._add_wire(record)

    def _add_wire(self, record) -> bool:
        with self._mutex:
            if self._index_key(record) in self._content:
                return False
            kind = self._kind_of(record)
            h = self._handle(kind)
            h.write(json.dumps(record.to_json_obj(), sort_keys=True,
                               separators=(",", ":")) + "\n")
            h.flush()
            self._index(record)
            return True

    # ---------------------------------------------------------------- blobs

    def put_blob(self, data: bytes) -> str:
        """Store raw STEP bytes content-addressed; returns the SHA-256 hex."""
        digest = hashlib.sha256(data).hexdigest()
        path = self.data_dir / "cad" / "blobs" / f"{digest}.step"
        if not path.exists():
            tmp = path.with_suffix(".tmp")
            tmp.write_bytes(data)
            os.replace(tmp, path)
        return digest

    def has_blob(self, digest: str) -> bool:
        return (self.data_dir / "cad" / "blobs" / f"{digest}.step").exists()

    def get_blob(self, digest: str) -> bytes:
        path = self.data_dir / "cad" / "blobs" / f"{digest}.step"
        if not path.exists():
            raise NotFoundError(f"no blob {digest}")
        data = path.read_bytes()
        if hashlib.sha256(data).hexdigest() != digest:
            raise IntegrityError(f"blob {digest} content does not match its name")
        return data

    # --------------------------------------------------------------- queries

    def get_article(self, article_id: str) -> Article:
        article = self.articles.get(article_id)
        if article is None:
            raise NotFoundError(f"no article {article_id!r}")
        return article

    def list_articles(self) -> list[Article]:
        return sorted(self.articles.values(), key=lambda a: a.article_id)

    def variants_for(self, article_id: str) -> list[DesignVariant]:
        out = [v for v in self.variants.values() if v.article_id == article_id]
        out.sort(key=lambda v: (v.created_ts_ms, v.variant_id))
        return out

    def events_for(self, article_id: str) -> list[MachineEvent]:
        out = [e for e in self.events.values() if e.article_id == article_id]
        out.sort(key=lambda e: (e.ts_ms, e.machine_id, e.seq))
        return out

    def statuses_for(self, article_id: str) -> list[MachineStatus]:
        out = [s for s in self.statuses.values() if s.article_id == article_id]
        out.sort(key=lambda s: (s.ts_ms, s.machine_id, s.seq))
        return out

    def feedback_for(self, article_id: str) -> list[Feedback]:
        out = [f for f in self.feedback.values() if f.article_id == article_id]
        out.sort(key=lambda f: (f.created_ts_ms, f.feedback_id))
        return out

    def query_by_article(self, article_id: str) -> dict:
        """All records linked to one article, plus derived outcomes."""
        from fablink.store.aggregate import assemble_outcomes

        article = self.get_article(article_id)
        return {
            "article": article,
            "variants": self.variants_for(article_id),
            "events": self.events_for(article_id),
            "statuses": self.statuses_for(article_id),
            "feedback": self.feedback_for(article_id),
            "outcomes": assemble_outcomes(self, article_id),
        }

    def latest_status(self, machine_id: str) -> MachineStatus:
        status = self._latest_status.get(machine_id)
        if status is None:
            raise NotFoundError(f"no status for machine {machine_id!r}")
        return status

    def machine_ids(self) -> list[str]:
        return sorted(self._latest_status)

    def unknown_article_ids(self) -> list[str]:
        """Article ids referenced by process data but never registered."""
        referenced = {e.article_id for e in self.events.values()}
        referenced.update(s.article_id for s in self.statuses.values())
        return sorted(referenced - set(self.articles))

    # ----------------------------------------------------------------- users

    def get_user(self, user_id: str) -> User:
        user = self.users.get(user_id)
        if user is None:
            raise NotFoundError(f"no user {user_id!r}")
        return user

    def user_by_token_sha256(self, token_sha256: str) -> Optional[User]:
        for user in self.users.values():
            if user.token_sha256 == token_sha256:
                return user
        return None

    def list_users(self) -> list[User]:
        return sorted(self.users.values(), key=lambda u: u.user_id)
