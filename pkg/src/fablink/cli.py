"""Command-line entry point wrapping every subsystem.

Exit codes: 0 success, 1 runtime error, 2 usage error, 3 validation or
integrity error.  Data goes to stdout (JSON with ``--json``),
diagnostics to stderr.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from fablink.errors import FablinkError, ValidationError
from fablink.geometry.build import build_brep
from fablink.geometry.features import FEATURE_FIELDS, extract_features
from fablink.geometry.plategen import generate_plate_step
from fablink.predictor.artifact import FormatError, SchemaMismatch, predict as run_predict
from fablink.predictor.train import TrainConfig, train as run_train
from fablink.server.config import PlatformConfig, load_config
from fablink.server.jobs import ModelRegistry, NoActiveModel
from fablink.step.model import step_to_jsonable
from fablink.step.parser import parse_step
from fablink.store.aggregate import build_dataset
from fablink.store.records import ConflictError, IntegrityError, USER_ROLES
from fablink.store.store import LinkageStore
from fablink.telemetry.protocol import ProtocolError, encode_message
from fablink.telemetry.simulator import MachineProfile, MachineSimulator
from fablink.telemetry.subscriber import HandshakeError, subscriber_ingest

EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3

_VALIDATION_ERRORS = (
    ValidationError,
    ProtocolError,
    HandshakeError,
    ConflictError,
    IntegrityError,
    SchemaMismatch,
    FormatError,
)


def _handle_errors(fn):
    """Map error classes onto the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except _VALIDATION_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)
        except (FablinkError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_RUNTIME)

    return wrapper


def _load_platform_config(config_path: str | None, data_dir: str | None) -> PlatformConfig:
    cfg = load_config(config_path)
    if data_dir is not None:
        cfg = PlatformConfig(
            data_dir=Path(data_dir),
            http_port=cfg.http_port,
            telemetry_port=cfg.telemetry_port,
            drop_folder=cfg.drop_folder,
            poll_interval_s=cfg.poll_interval_s,
            emission_factor_kg_per_kwh=cfg.emission_factor_kg_per_kwh,
            train=cfg.train,
        )
    return cfg


def _read_file(path: str) -> bytes:
    p = Path(path)
    if not p.exists():
        raise FablinkError(f"no such file: {path}")
    return p.read_bytes()


def _emit(obj: dict, as_json: bool, text_lines):
    if as_json:
        click.echo(json.dumps(obj, sort_keys=True))
    else:
        for line in text_lines:
            click.echo(line)


@click.group()
def main():
    """fablink: link CAD design features with machine process data."""


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="Config file (default: $FABLINK_CONFIG).")
@_handle_errors
def serve(config_path):
    """Run the API server, telemetry listener, and drop-folder poller."""
    from fablink.server.serve import run_platform

    run_platform(load_config(config_path))


@main.command()
@click.argument("file", type=click.Path())
@click.option("--dump-json", is_flag=True, help="Dump the full entity graph as JSON.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable summary.")
@_handle_errors
def parse(file, dump_json, as_json):
    """Parse a STEP file and report its structure."""
    step = parse_step(_read_file(file))
    if dump_json:
        click.echo(json.dumps(step_to_jsonable(step), sort_keys=True))
        return
    summary = {
        "file": file,
        "schema": step.schema_names(),
        "instances": len(step.instances),
        "source_hash": step.source_hash,
    }
    _emit(summary, as_json, [
        f"schema: {', '.join(step.schema_names())}",
        f"instances: {len(step.instances)}",
        f"source_hash: {step.source_hash}",
    ])


@main.command()
@click.argument("file", type=click.Path())
@click.option("--json", "as_json", is_flag=True, help="Print the f1 vector as JSON.")
@_handle_errors
def extract(file, as_json):
    """Extract the f1 feature vector from a STEP file."""
    features = extract_features(build_brep(parse_step(_read_file(file))))
    obj = features.to_dict()
    _emit(obj, as_json, [f"{name}: {obj[name]}" for name in FEATURE_FIELDS])


def _parse_hole(value: str) -> tuple[float, float, float]:
    parts = value.split(",")
    if len(parts) != 3:
        raise click.BadParameter("hole must be cx,cy,d")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise click.BadParameter("hole coordinates must be numbers") from None


@main.command()
@click.option("--length", type=float, required=True, help="Plate length (mm, X).")
@click.option("--width", type=float, required=True, help="Plate width (mm, Y).")
@click.option("--thickness", type=float, required=True, help="Plate thickness (mm, Z).")
@click.option("--hole", "holes", multiple=True, metavar="CX,CY,D",
              help="Through-hole centre and diameter; repeatable.")
@click.option("-o", "--out", type=click.Path(), default="-",
              help="Output path (default: stdout).")
@_handle_errors
def genplate(length, width, thickness, holes, out):
    """Generate a rectangular plate fixture as a STEP file."""
    data = generate_plate_step(
        length, width, thickness, holes=tuple(_parse_hole(h) for h in holes)
    )
    if out == "-":
        sys.stdout.buffer.write(data)
    else:
        Path(out).write_bytes(data)
        click.echo(f"wrote {out} ({len(data)} bytes)", err=True)


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--data-dir", type=click.Path(), default=None,
              help="Override the configured data directory.")
@click.option("--machines", type=int, default=1, show_default=True,
              help="Number of simulated machines.")
@click.option("--articles", default="all", show_default=True,
              help="Comma-separated article ids, or 'all'.")
@click.option("--noise", type=float, default=0.02, show_default=True,
              help="Multiplicative Gaussian noise sigma.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--t0-ms", type=int, default=1_700_000_000_000, show_default=True,
              help="Timestamp of the first job.")
@click.option("--connect", default=None, metavar="HOST:PORT",
              help="Stream to a live telemetry listener.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write the NDJSON stream to a file.")
@click.option("--json", "as_json", is_flag=True)
@_handle_errors
def simulate(config_path, data_dir, machines, articles, noise, seed, t0_ms,
             connect, out_path, as_json):
    """Simulate one job per stored article and publish the stream."""
    if machines < 1:
        raise click.BadParameter("--machines must be >= 1")
    if connect is not None and out_path is not None:
        raise click.UsageError("--connect and --out are mutually exclusive")
    if connect is None and out_path is None:
        raise click.UsageError("one of --connect or --out is required")

    cfg = _load_platform_config(config_path, data_dir)
    with LinkageStore(cfg.data_dir) as store:
        if articles == "all":
            chosen = [a.article_id for a in store.list_articles()]
        else:
            chosen = [a.strip() for a in articles.split(",") if a.strip()]
        if not chosen:
            raise FablinkError("no articles to simulate")
        plan: list[tuple[str, object]] = []
        for article_id in chosen:
            variants = store.variants_for(article_id)
            if not variants:
                raise FablinkError(f"article {article_id!r} has no design variant")
            plan.append((article_id, variants[-1].effective_features()))

    streams: list[list[bytes]] = []
    counts = []
    for m in range(machines):
        profile = MachineProfile(
            machine_id=f"m{m + 1}", noise_sigma=noise, rng_seed=seed,
        )
        sim = MachineSimulator(profile)
        lines = [encode_message(sim.hello(t0_ms))]
        t = t0_ms
        for article_id, features in plan[m::machines]:
            job = sim.run_job(article_id, features, t)
            lines.extend(encode_message(msg) for msg in job)
            t = job[-1].ts_ms + 60_000
        streams.append(lines)
        counts.append({"machine_id": profile.machine_id, "messages": len(lines)})

    if out_path is not None:
        with open(out_path, "wb") as f:
            for lines in streams:
                for line in lines:
                    f.write(line)
    else:
        import socket

        host, _, port = connect.rpartition(":")
        if not host or not port.isdigit():
            raise click.BadParameter("--connect must be HOST:PORT")
        for lines in streams:
            with socket.create_connection((host, int(port))) as sock:
                for line in lines:
                    sock.sendall(line)

    _emit({"machines": counts, "articles": len(plan)}, as_json,
          [f"{c['machine_id']}: {c['messages']} messages" for c in counts])


@main.command(name="ingest-ndjson")
@click.argument("file", type=click.Path())
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--data-dir", type=click.Path(), default=None)
@click.option("--json", "as_json", is_flag=True)
@_handle_errors
def ingest_ndjson(file, config_path, data_dir, as_json):
    """Replay a recorded telemetry NDJSON file into the store."""
    cfg = _load_platform_config(config_path, data_dir)
    data = _read_file(file)
    with LinkageStore(cfg.data_dir) as store:
        summary = subscriber_ingest(data.splitlines(), store)
    obj = summary.to_dict()
    _emit(obj, as_json, [f"{k}: {v}" for k, v in obj.items()])


@main.command(name="train")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--data-dir", type=click.Path(), default=None)
@click.option("--epochs", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
@_handle_errors
def train_command(config_path, data_dir, epochs, seed, as_json):
    """Train a model on the stored dataset and activate it."""
    cfg = _load_platform_config(config_path, data_dir)
    t = cfg.train
    train_cfg = TrainConfig(
        epochs=epochs if epochs is not None else t.epochs,
        batch_size=t.batch_size,
        learning_rate=t.learning_rate,
        seed=seed if seed is not None else t.seed,
        validation_fraction=t.validation_fraction,
    )
    with LinkageStore(cfg.data_dir) as store:
        pairs = build_dataset(store)
        artifact = run_train(pairs, train_cfg)
    registry = ModelRegistry(Path(cfg.data_dir) / "models")
    model_id = registry.save_and_activate(artifact)
    meta = artifact.metadata
    obj = {"model_id": model_id, "dataset_size": meta["dataset_size"],
           "r2": meta["r2"], "final_val_mse": meta["final_val_mse"]}
    _emit(obj, as_json, [
        f"model_id: {model_id}",
        f"dataset_size: {meta['dataset_size']}",
        f"r2 energy_wh: {meta['r2']['energy_wh']:.4f}",
        f"r2 production_time_s: {meta['r2']['production_time_s']:.4f}",
    ])


@main.command(name="predict")
@click.argument("file", type=click.Path())
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--data-dir", type=click.Path(), default=None)
@click.option("--co2-factor", type=float, default=None,
              help="Emission factor kg CO2 per kWh (default: configured value).")
@click.option("--json", "as_json", is_flag=True)
@_handle_errors
def predict_command(file, config_path, data_dir, co2_factor, as_json):
    """Predict energy, time, and CO2 for a STEP file with the active model."""
    cfg = _load_platform_config(config_path, data_dir)
    registry = ModelRegistry(Path(cfg.data_dir) / "models")
    if not registry.has_active():
        raise NoActiveModel("no trained model; run 'fablink train' first")
    model_id, artifact = registry.active()
    features = extract_features(build_brep(parse_step(_read_file(file))))
    factor = co2_factor if co2_factor is not None else cfg.emission_factor_kg_per_kwh
    prediction = run_predict(artifact, features, emission_factor=factor)
    obj = {"prediction": prediction.to_dict(), "features": features.to_dict(),
           "model_id": model_id}
    p = prediction.to_dict()
    _emit(obj, as_json, [f"{k}: {v}" for k, v in p.items()] + [f"model_id: {model_id}"])


@main.group()
def users():
    """Manage platform users."""


@users.command(name="add")
@click.argument("user_id")
@click.option("--role", type=click.Choice(USER_ROLES), required=True)
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--data-dir", type=click.Path(), default=None)
@click.option("--json", "as_json", is_flag=True)
@_handle_errors
def users_add(user_id, role, config_path, data_dir, as_json):
    """Create a user and print their bearer token (shown once)."""
    from fablink.server.auth import create_user

    cfg = _load_platform_config(config_path, data_dir)
    with LinkageStore(cfg.data_dir) as store:
        if user_id in store.users:
            raise ConflictError(f"user {user_id!r} already exists")
        user, token = create_user(store, user_id, role)
    _emit({"user_id": user.user_id, "role": user.role, "token": token}, as_json,
          [f"user_id: {user.user_id}", f"role: {user.role}", f"token: {token}"])


if __name__ == "__main__":
    main()
