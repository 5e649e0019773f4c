"""HTTP API: the central-server layer over the store and predictor.

Every route lives under ``/api/v1``.  Mutating routes enforce
authenticate → authorize before touching the store; error classes map
onto 401/403/404/409/422/503 with a uniform JSON error body.
"""

from __future__ import annotations

import hashlib
import json
import secrets
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from fastapi import Depends, FastAPI, Request
from fastapi.responses import JSONResponse, RedirectResponse
from fastapi.staticfiles import StaticFiles

from fablink import __version__
from fablink.errors import FablinkError, ValidationError
from fablink.geometry.build import build_brep
from fablink.geometry.features import FeatureVector, extract_features
from fablink.predictor.artifact import SchemaMismatch, predict
from fablink.predictor.train import TrainConfig
from fablink.server.auth import (
    ForbiddenError,
    UnauthorizedError,
    authenticate,
    authorize,
    create_user,
)
from fablink.server.config import PlatformConfig
from fablink.server.dropfolder import ingest_variant
from fablink.server.jobs import (
    JobAlreadyRunning,
    ModelRegistry,
    NoActiveModel,
    TrainJobManager,
)
from fablink.step.errors import StepSyntaxError
from fablink.step.parser import parse_step
from fablink.store.records import (
    Article,
    ConflictError,
    Feedback,
    IntegrityError,
    NotFoundError,
    User,
)
from fablink.store.store import LinkageStore


@dataclass(slots=True)
class Platform:
    """Everything one running platform instance owns."""

    config: PlatformConfig
    store: LinkageStore
    registry: ModelRegistry
    jobs: TrainJobManager

    @classmethod
    def open(cls, config: PlatformConfig) -> "Platform":
        store = LinkageStore(config.data_dir)
        registry = ModelRegistry(Path(config.data_dir) / "models")
        jobs = TrainJobManager(store=store, registry=registry)
        return cls(config=config, store=store, registry=registry, jobs=jobs)

    def close(self):
        self.store.close()

    def train_config(self, overrides: dict | None = None) -> TrainConfig:
        t = self.config.train
        base = {
            "epochs": t.epochs,
            "batch_size": t.batch_size,
            "learning_rate": t.learning_rate,
            "seed": t.seed,
            "validation_fraction": t.validation_fraction,
        }
        if overrides:
            allowed = {"epochs", "batch_size", "learning_rate", "seed",
                       "validation_fraction"}
            unknown = set(overrides) - allowed
            if unknown:
                raise ValidationError(f"unknown train option {sorted(unknown)[0]!r}")
            base.update(overrides)
        return TrainConfig(**base)


_STATUS_BY_TYPE = (
    (UnauthorizedError, 401),
    (ForbiddenError, 403),
    (NotFoundError, 404),
    (ConflictError, 409),
    (JobAlreadyRunning, 409),
    (IntegrityError, 409),
    (NoActiveModel, 503),
    (SchemaMismatch, 422),
    (ValidationError, 422),
    (FablinkError, 400),
)


def _error_response(exc: FablinkError) -> JSONResponse:
    for cls, status in _STATUS_BY_TYPE:
        if isinstance(exc, cls):
            break
    else:  # pragma: no cover - FablinkError is the final catch
        status = 400
    detail: dict = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, StepSyntaxError):
        detail["line"] = exc.line
        detail["column"] = exc.column
    headers = {"WWW-Authenticate": "Bearer"} if status == 401 else None
    return JSONResponse({"error": detail}, status_code=status, headers=headers)


def _public(obj: dict) -> dict:
    return {k: v for k, v in obj.items() if k not in ("schema", "kind")}


def _variant_json(variant) -> dict:
    obj = _public(variant.to_json_obj())
    obj["effective_features"] = variant.effective_features().to_dict()
    return obj


def _now_ms() -> int:
    return int(time.time() * 1000)


async def _json_body(request: Request) -> dict:
    try:
        body = await request.json()
    except (json.JSONDecodeError, UnicodeDecodeError):
        raise ValidationError("request body must be valid JSON") from None
    if not isinstance(body, dict):
        raise ValidationError("request body must be a JSON object")
    return body


def _require_str(body: dict, field: str) -> str:
    value = body.get(field)
    if not isinstance(value, str) or not value:
        raise ValidationError(f"field {field!r} must be a non-empty string")
    return value


def create_app(platform: Platform, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="fablink", version=__version__, docs_url=None, redoc_url=None)

    @app.exception_handler(FablinkError)
    async def _handle_fablink_error(_request, exc: FablinkError):
        return _error_response(exc)

    def require(action: str):
        async def dependency(request: Request) -> User:
            user = authenticate(platform.store, request.headers.get("authorization"))
            authorize(user, action)
            return user

        return Depends(dependency)

    # ------------------------------------------------------------- system

    @app.get("/api/v1/health")
    async def health():
        from fablink.step import SCANNER_BACKEND

        return {"status": "ok", "version": __version__, "scanner": SCANNER_BACKEND}

    @app.get("/api/v1/me")
    async def me(user: User = require("read")):
        return {"user_id": user.user_id, "role": user.role}

    # ----------------------------------------------------------- articles

    @app.post("/api/v1/articles")
    async def create_article(request: Request, user: User = require("create_article")):
        body = await _json_body(request)
        article_id = _require_str(body, "article_id")
        name = body.get("name", article_id)
        material = body.get("material", "unspecified")
        existing = platform.store.articles.get(article_id)
        if existing is not None:
            if existing.name == name and existing.material == material:
                return JSONResponse(
                    {"article": _public(existing.to_json_obj()), "created": False},
                    status_code=200,
                )
            raise ConflictError(
                f"article {article_id!r} already exists with different content"
            )
        article = Article(
            article_id=article_id, name=name, material=material,
            created_ts_ms=_now_ms(),
        )
        platform.store.append_record(article)
        return JSONResponse(
            {"article": _public(article.to_json_obj()), "created": True},
            status_code=201,
        )

    @app.get("/api/v1/articles")
    async def list_articles(user: User = require("read")):
        articles = []
        for article in platform.store.list_articles():
            obj = _public(article.to_json_obj())
            obj["variant_count"] = len(platform.store.variants_for(article.article_id))
            articles.append(obj)
        return {"articles": articles}

    @app.get("/api/v1/articles/{article_id}")
    async def get_article(article_id: str, user: User = require("read")):
        q = platform.store.query_by_article(article_id)
        complete = [o for o in q["outcomes"] if o.complete]
        summary = {
            "job_count": len(q["outcomes"]),
            "complete_count": len(complete),
            "mean_energy_wh": (
                sum(o.energy_wh for o in complete) / len(complete) if complete else None
            ),
            "mean_production_time_s": (
                sum(o.production_time_s for o in complete) / len(complete)
                if complete else None
            ),
        }
        return {
            "article": _public(q["article"].to_json_obj()),
            "variants": [_variant_json(v) for v in q["variants"]],
            "events": [_public(e.to_json_obj()) for e in q["events"]],
            "statuses": [_public(s.to_json_obj()) for s in q["statuses"]],
            "feedback": [_public(f.to_json_obj()) for f in q["feedback"]],
            "outcomes": [o.to_json_obj() for o in q["outcomes"]],
            "outcomes_summary": summary,
        }

    @app.post("/api/v1/articles/{article_id}/variants")
    async def upload_variant(
        article_id: str,
        request: Request,
        label: Optional[str] = None,
        thickness_override: Optional[float] = None,
        user: User = require("upload_variant"),
    ):
        platform.store.get_article(article_id)  # 404 before reading the body
        data = await request.body()
        if not data:
            raise ValidationError("request body must contain STEP bytes")
        if label is None:
            label = hashlib.sha256(data).hexdigest()[:12]
        before = set(platform.store.variants)
        variant = ingest_variant(
            platform.store,
            article_id=article_id,
            label=label,
            data=data,
            uploaded_by=user.user_id,
            thickness_override=thickness_override,
            auto_create_article=False,
        )
        created = variant.variant_id not in before
        return JSONResponse(
            {"variant": _variant_json(variant), "created": created},
            status_code=201 if created else 200,
        )

    # ----------------------------------------------------------- feedback

    @app.post("/api/v1/feedback")
    async def post_feedback(request: Request, user: User = require("post_feedback")):
        body = await _json_body(request)
        article_id = _require_str(body, "article_id")
        platform.store.get_article(article_id)  # 404 on unknown article
        feedback_id = body.get("feedback_id") or f"fb-{secrets.token_hex(8)}"
        feedback = Feedback(
            feedback_id=feedback_id,
            article_id=article_id,
            reporter=user.user_id,
            category=_require_str(body, "category"),
            severity=_require_str(body, "severity"),
            text=body.get("text", ""),
            created_ts_ms=_now_ms(),
        )
        platform.store.append_record(feedback)
        return JSONResponse(
            {"feedback": _public(feedback.to_json_obj())}, status_code=201
        )

    # ----------------------------------------------------------- training

    @app.post("/api/v1/train")
    async def start_train(request: Request, user: User = require("train")):
        overrides = None
        body_bytes = await request.body()
        if body_bytes:
            body = await _json_body(request)
            overrides = body or None
        cfg = platform.train_config(overrides)
        job = platform.jobs.start(cfg)
        return JSONResponse({"job": job.to_dict()}, status_code=202)

    @app.get("/api/v1/train/{job_id}")
    async def get_train_job(job_id: str, user: User = require("read")):
        return {"job": platform.jobs.get(job_id).to_dict()}

    @app.get("/api/v1/models")
    async def list_models(user: User = require("read")):
        models = platform.registry.list_models()
        active = next((m["model_id"] for m in models if m["active"]), None)
        return {"models": models, "active": active}

    # --------------------------------------------------------- prediction

    @app.post("/api/v1/predict")
    async def predict_route(
        request: Request,
        emission_factor: Optional[float] = None,
        user: User = require("predict"),
    ):
        model_id, artifact = platform.registry.active()
        body = await request.body()
        if not body:
            raise ValidationError("request body must contain features or STEP bytes")

        factor = emission_factor
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("application/json"):
            obj = await _json_body(request)
            if factor is None and "emission_factor" in obj:
                factor = obj["emission_factor"]
                if not isinstance(factor, (int, float)) or factor < 0:
                    raise ValidationError("emission_factor must be a number >= 0")
            if "features" in obj:
                features = FeatureVector.from_dict(obj["features"])
            elif "step" in obj:
                step_text = obj["step"]
                if not isinstance(step_text, str):
                    raise ValidationError("field 'step' must be a string")
                features = extract_features(
                    build_brep(parse_step(step_text.encode("utf-8")))
                )
            else:
                raise ValidationError("body must carry 'features' or 'step'")
        else:
            features = extract_features(build_brep(parse_step(body)))

        if factor is None:
            factor = platform.config.emission_factor_kg_per_kwh
        prediction = predict(artifact, features, emission_factor=factor)
        return {
            "prediction": prediction.to_dict(),
            "features": features.to_dict(),
            "model_id": model_id,
        }

    # ------------------------------------------------------------ machines

    @app.get("/api/v1/machines/{machine_id}/status")
    async def machine_status(machine_id: str, user: User = require("read")):
        status = platform.store.latest_status(machine_id)
        return {"status": _public(status.to_json_obj())}

    # --------------------------------------------------------------- users

    @app.post("/api/v1/users")
    async def add_user(request: Request, user: User = require("manage_users")):
        body = await _json_body(request)
        user_id = _require_str(body, "user_id")
        role = _require_str(body, "role")
        if user_id in platform.store.users:
            raise ConflictError(f"user {user_id!r} already exists")
        new_user, token = create_user(platform.store, user_id, role)
        return JSONResponse(
            {"user_id": new_user.user_id, "role": new_user.role, "token": token},
            status_code=201,
        )

    # ------------------------------------------------------------------ UI

    if ui_dir is not None and Path(ui_dir).exists():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

        @app.get("/")
        async def root():
            return RedirectResponse("/ui/")

    return app
