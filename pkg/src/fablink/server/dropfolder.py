"""Drop-folder ingestion: the platform's PDM-interface stand-in.

Files named ``<article_id>__<variant_label>.step`` placed in the
configured folder are featurized and stored as design variants under a
system user, auto-creating unknown articles.  Successes move to
``processed/``, failures to ``rejected/`` with a ``.error.txt`` sidecar
explaining why.
"""

from __future__ import annotations

import re
import threading
import time
from pathlib import Path

from fablink.errors import FablinkError
from fablink.geometry.build import build_brep
from fablink.geometry.features import extract_features
from fablink.step.parser import parse_step
from fablink.store.records import ARTICLE_ID_RE, Article, DesignVariant
from fablink.store.store import LinkageStore

SYSTEM_USER = "dropfolder"

_NAME_RE = re.compile(r"^(?P<article>[A-Za-z0-9_-]{1,64})__(?P<label>[A-Za-z0-9_.-]{1,64})\.step$")


def ingest_variant(
    store: LinkageStore,
    article_id: str,
    label: str,
    data: bytes,
    uploaded_by: str,
    thickness_override: float | None = None,
    auto_create_article: bool = False,
    now_ms=lambda: int(time.time() * 1000),
) -> DesignVariant:
    """Shared upload path: parse, featurize, blob-store, append.

    Raises the originating error (StepError subclass, GeometryError,
    Store errors) unchanged; callers map them to their surface.
    """
    if not ARTICLE_ID_RE.match(article_id):
        raise FablinkError(f"invalid article_id {article_id!r}")
    features = extract_features(build_brep(parse_step(data)))
    if auto_create_article and article_id not in store.articles:
        store.append_record(Article(
            article_id=article_id, name=article_id, material="unspecified",
            created_ts_ms=now_ms(),
        ))
    store.get_article(article_id)  # NotFoundError when absent and not auto-created
    blob_hash = store.put_blob(data)
    variant = DesignVariant(
        variant_id=f"{article_id}__{label}",
        article_id=article_id,
        step_blob_hash=blob_hash,
        features=features,
        created_ts_ms=now_ms(),
        uploaded_by=uploaded_by,
        thickness_override=thickness_override,
    )
    existing = store.variants.get(variant.variant_id)
    if existing is not None:
        # Idempotent re-upload of identical content; metadata drift conflicts.
        if existing.step_blob_hash == blob_hash and existing.features == features \
                and existing.thickness_override == variant.thickness_override:
            return existing
        from fablink.store.records import ConflictError

        raise ConflictError(
            f"variant {variant.variant_id!r} already exists with different content"
        )
    store.append_record(variant)
    return variant


def poll_drop_folder(store: LinkageStore, folder: str | Path) -> dict:
    """One poll pass over the folder; returns the ingest report."""
    folder = Path(folder)
    processed_dir = folder / "processed"
    rejected_dir = folder / "rejected"
    report = {"processed": [], "rejected": []}
    if not folder.exists():
        return report

    for path in sorted(p for p in folder.iterdir() if p.is_file()):
        if path.name.startswith("."):
            continue
        match = _NAME_RE.match(path.name)
        if match is None:
            _reject(rejected_dir, path, report,
                    "file name must look like <article_id>__<variant_label>.step")
            continue
        try:
            data = path.read_bytes()
            variant = ingest_variant(
                store,
                article_id=match.group("article"),
                label=match.group("label"),
                data=data,
                uploaded_by=SYSTEM_USER,
                auto_create_article=True,
            )
        except FablinkError as exc:
            _reject(rejected_dir, path, report, f"{type(exc).__name__}: {exc}")
            continue
        processed_dir.mkdir(parents=True, exist_ok=True)
        path.replace(processed_dir / path.name)
        report["processed"].append({
            "file": path.name,
            "article_id": variant.article_id,
            "variant_id": variant.variant_id,
        })
    return report


def _reject(rejected_dir: Path, path: Path, report: dict, reason: str):
    rejected_dir.mkdir(parents=True, exist_ok=True)
    target = rejected_dir / path.name
    path.replace(target)
    target.with_name(target.name + ".error.txt").write_text(reason + "\n", encoding="utf-8")
    report["rejected"].append({"file": path.name, "error": reason})


class DropFolderPoller:
    """Background thread running poll passes at a fixed interval."""

    def __init__(self, store: LinkageStore, folder: str | Path, interval_s: float):
        self.store = store
        self.folder = Path(folder)
        self.interval_s = interval_s
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    def start(self):
        self.folder.mkdir(parents=True, exist_ok=True)
        self._thread = threading.Thread(target=self._loop, name="dropfolder", daemon=True)
        self._thread.start()

    def _loop(self):
        while not self._stop.is_set():
            try:
                poll_drop_folder(self.store, self.folder)
            except Exception:
                pass  # a bad pass must not kill the poller
            self._stop.wait(self.interval_s)

    def stop(self):
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
