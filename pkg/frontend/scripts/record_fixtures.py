"""Re-record the webui's API contract fixtures.

Boots the platform in-process, seeds it with generated plates and
simulated telemetry, trains a model, and snapshots the exact HTTP
responses the webui consumes into frontend/tests/fixtures/.  Run from
the repo root with the package installed:

    python3 frontend/scripts/record_fixtures.py
"""

from __future__ import annotations

import json
import random
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from fablink.predictor.train import TrainConfig, train as run_train
from fablink.geometry.plategen import generate_plate_step
from fablink.server.app import Platform, create_app
from fablink.server.auth import create_user
from fablink.server.config import PlatformConfig
from fablink.server.dropfolder import ingest_variant
from fablink.store.aggregate import build_dataset
from fablink.telemetry.protocol import encode_message
from fablink.telemetry.simulator import MachineProfile, MachineSimulator
from fablink.telemetry.subscriber import subscriber_ingest

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
T0 = 1_700_000_000_000


def random_plate(rng: random.Random) -> bytes:
    length = rng.uniform(50.0, 300.0)
    width = rng.uniform(50.0, 300.0)
    thickness = float(rng.choice((1, 2, 3)))
    holes = []
    for _ in range(rng.randint(0, 8)):
        for _attempt in range(50):
            d = rng.uniform(5.0, 20.0)
            r = d / 2.0
            if 2 * r + 2.0 >= min(length, width):
                continue
            cx = rng.uniform(r + 1.0, length - r - 1.0)
            cy = rng.uniform(r + 1.0, width - r - 1.0)
            if all(((cx - ox) ** 2 + (cy - oy) ** 2) ** 0.5 > (d + od) / 2.0 + 0.5
                   for ox, oy, od in holes):
                holes.append((cx, cy, d))
                break
    return generate_plate_step(length, width, thickness, holes=holes)


def simulate_jobs(store, machine_id: str, jobs: list[tuple[str, object]], seed: int):
    """One stream per machine: hello + each (article, features) job."""
    sim = MachineSimulator(MachineProfile(
        machine_id=machine_id, noise_sigma=0.005, rng_seed=seed))
    lines = [encode_message(sim.hello(T0))]
    t = T0
    for article_id, features in jobs:
        job = sim.run_job(article_id, features, t)
        lines.extend(encode_message(m) for m in job)
        t = job[-1].ts_ms + 60_000
    summary = subscriber_ingest(lines, store)
    assert summary.rejected == 0, summary


def main() -> None:
    fixtures: dict[str, dict] = {}
    with tempfile.TemporaryDirectory() as tmp:
        platform = Platform.open(PlatformConfig(data_dir=Path(tmp) / "data"))
        try:
            tokens = {}
            for role in ("designer", "manufacturer", "admin"):
                _, tokens[role] = create_user(platform.store, f"{role}-1", role)
            client = TestClient(create_app(platform))

            def snap(name: str, response) -> dict:
                body = response.json()
                fixtures[name] = {"status": response.status_code, "body": body}
                return body

            def auth(role: str) -> dict:
                return {"Authorization": f"Bearer {tokens[role]}"}

            # The demo article and its two variants, created through the API.
            client.post("/api/v1/articles", headers=auth("designer"),
                        json={"article_id": "demo-plate",
                              "name": "Demo mounting plate",
                              "material": "aluminium 5754"})
            plain = generate_plate_step(100.0, 100.0, 2.0)
            four_hole = generate_plate_step(
                100.0, 100.0, 2.0,
                holes=[(25.0, 25.0, 10.0), (75.0, 25.0, 10.0),
                       (25.0, 75.0, 10.0), (75.0, 75.0, 10.0)])
            up_plain = snap("upload_plain", client.post(
                "/api/v1/articles/demo-plate/variants?label=base",
                headers=auth("designer"), content=plain))
            up_four = snap("upload_four_hole", client.post(
                "/api/v1/articles/demo-plate/variants?label=four-hole",
                headers=auth("designer"), content=four_hole))

            # Training diversity: 60 generated plates with one job each.
            # The model trains on these alone; the demo article's jobs are
            # ingested afterwards so they show up as outcomes without
            # dominating the local fit around the demo features.
            rng = random.Random(11)
            plan = []
            for i in range(60):
                ingest_variant(platform.store, f"t{i:02d}", "v1",
                               random_plate(rng), "recorder",
                               auto_create_article=True)
                variant = platform.store.variants_for(f"t{i:02d}")[-1]
                plan.append((f"t{i:02d}", variant.effective_features()))
            simulate_jobs(platform.store, "m1", plan, seed=3)

            artifact = run_train(build_dataset(platform.store),
                                 TrainConfig(epochs=1500, seed=0))
            platform.registry.save_and_activate(artifact)

            demo_feats = platform.store.variants_for("demo-plate")[-1].effective_features()
            simulate_jobs(platform.store, "m2",
                          [("demo-plate", demo_feats)] * 3, seed=4)

            client.post("/api/v1/feedback", headers=auth("manufacturer"),
                        json={"article_id": "demo-plate", "category": "surface",
                              "severity": "minor",
                              "text": "light burr on hole edges"})

            snap("health", client.get("/api/v1/health"))
            snap("me", client.get("/api/v1/me", headers=auth("designer")))
            snap("articles", client.get("/api/v1/articles", headers=auth("designer")))
            snap("article_detail", client.get("/api/v1/articles/demo-plate",
                                              headers=auth("designer")))
            snap("predict_plain", client.post(
                "/api/v1/predict", headers=auth("designer"),
                json={"features": up_plain["variant"]["effective_features"]}))
            snap("predict_four_hole", client.post(
                "/api/v1/predict", headers=auth("designer"),
                json={"features": up_four["variant"]["effective_features"]}))
            snap("error_unauthorized", client.get("/api/v1/articles"))
        finally:
            platform.close()

    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    for name, payload in sorted(fixtures.items()):
        path = FIXTURE_DIR / f"{name}.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
