"""Run the whole platform: HTTP API, telemetry listener, drop-folder
poller, and first-run admin bootstrap."""

from __future__ import annotations

import sys
from pathlib import Path

import uvicorn

from fablink.server.app import Platform, create_app
from fablink.server.auth import bootstrap_admin
from fablink.server.config import PlatformConfig
from fablink.server.dropfolder import DropFolderPoller
from fablink.telemetry.subscriber import TelemetryServer


def run_platform(config: PlatformConfig, ui_dir: str | Path | None = None):
    """Blocking entry point used by ``fablink serve``."""
    platform = Platform.open(config)
    try:
        bootstrap = bootstrap_admin(platform.store)
        if bootstrap is not None:
            _user, token = bootstrap
            print(f"bootstrap admin token: {token}", flush=True)
            print("store it now; only its hash is retained", file=sys.stderr, flush=True)

        telemetry = TelemetryServer("0.0.0.0", config.telemetry_port, platform.store)
        telemetry.start()

        poller = None
        if config.drop_folder is not None:
            poller = DropFolderPoller(
                platform.store, config.drop_folder, config.poll_interval_s
            )
            poller.start()

        if ui_dir is None:
            default_ui = Path("frontend") / "dist"
            ui_dir = default_ui if default_ui.exists() else None

        app = create_app(platform, ui_dir=ui_dir)
        try:
            uvicorn.run(app, host="0.0.0.0", port=config.http_port, log_level="warning")
        finally:
            telemetry.stop()
            if poller is not None:
                poller.stop()
    finally:
        platform.close()
