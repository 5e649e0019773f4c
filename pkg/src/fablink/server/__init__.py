"""Platform server: HTTP API, auth, train jobs, drop folder, config."""

from fablink.server.app import Platform, create_app
from fablink.server.auth import (
    POLICY,
    ForbiddenError,
    UnauthorizedError,
    authenticate,
    authorize,
    bootstrap_admin,
    create_user,
    token_sha256,
)
from fablink.server.config import (
    DEFAULT_HTTP_PORT,
    DEFAULT_TELEMETRY_PORT,
    ENV_VAR,
    PlatformConfig,
    TrainDefaults,
    load_config,
)
from fablink.server.dropfolder import (
    SYSTEM_USER,
    DropFolderPoller,
    ingest_variant,
    poll_drop_folder,
)
from fablink.server.jobs import (
    JobAlreadyRunning,
    ModelRegistry,
    NoActiveModel,
    TrainJob,
    TrainJobManager,
)
from fablink.server.serve import run_platform

__all__ = [
    "DEFAULT_HTTP_PORT",
    "DEFAULT_TELEMETRY_PORT",
    "ENV_VAR",
    "POLICY",
    "SYSTEM_USER",
    "DropFolderPoller",
    "ForbiddenError",
    "JobAlreadyRunning",
    "ModelRegistry",
    "NoActiveModel",
    "Platform",
    "PlatformConfig",
    "TrainDefaults",
    "TrainJob",
    "TrainJobManager",
    "UnauthorizedError",
    "authenticate",
    "authorize",
    "bootstrap_admin",
    "create_app",
    "create_user",
    "ingest_variant",
    "load_config",
    "poll_drop_folder",
    "run_platform",
    "token_sha256",
]
