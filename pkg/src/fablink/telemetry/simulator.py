"""Deterministic machine simulator.

Produces wire-protocol message streams for jobs described by a
FeatureVector, following a documented synthetic process model:
piecewise-constant power (idle during setup, idle + extra while cutting
and piercing) and tool wear linear in cut length.  Identical inputs,
including the profile seed, yield byte-identical streams.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

from fablink.errors import ValidationError
from fablink.geometry.features import FeatureVector
from fablink.telemetry.protocol import WireMessage, event, hello, status


@dataclass(frozen=True, slots=True)
class MachineProfile:
    machine_id: str
    feed_mm_per_s: float = 50.0
    setup_time_s: float = 30.0
    pierce_time_s: float = 1.5
    idle_power_w: float = 800.0
    processing_extra_power_w: float = 3200.0
    wear_per_mm: float = 1e-5
    status_interval_ms: int = 100
    noise_sigma: float = 0.02
    error_probability: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if not self.machine_id:
            raise ValidationError("machine_id must be non-empty")
        if self.feed_mm_per_s <= 0:
            raise ValidationError("feed_mm_per_s must be > 0")
        for name in ("setup_time_s", "pierce_time_s", "idle_power_w",
                     "processing_extra_power_w", "wear_per_mm"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")
        if not isinstance(self.status_interval_ms, int) or self.status_interval_ms < 1:
            raise ValidationError("status_interval_ms must be a positive integer")
        if not 0.0 <= self.noise_sigma <= 0.5:
            raise ValidationError("noise_sigma must lie in [0, 0.5]")
        if not 0.0 <= self.error_probability <= 1.0:
            raise ValidationError("error_probability must lie in [0, 1]")


def nominal_outcome(
    profile: MachineProfile, features: FeatureVector
) -> tuple[float, float, float]:
    """Noise-free (production_time_s, energy_wh, wear_delta) for one job."""
    cut_time = features.total_edge_length / profile.feed_mm_per_s
    pierce_total = profile.pierce_time_s * features.hole_count
    production_time = profile.setup_time_s + cut_time + pierce_total
    energy_wh = (
        profile.idle_power_w * production_time
        + profile.processing_extra_power_w * (cut_time + pierce_total)
    ) / 3600.0
    wear_delta = profile.wear_per_mm * features.total_edge_length
    return production_time, energy_wh, wear_delta


def _job_rng(profile: MachineProfile, article_id: str, t0_ms: int) -> random.Random:
    """Stable per-job RNG: one profile seed still de-correlates jobs."""
    key = f"{profile.rng_seed}:{profile.machine_id}:{article_id}:{t0_ms}"
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


class MachineSimulator:
    """One publisher connection: a hello followed by any number of jobs.

    Tracks the connection sequence number and cumulative tool wear so a
    multi-job stream is self-consistent.
    """

    def __init__(self, profile: MachineProfile):
        self.profile = profile
        self._seq = 0
        self._wear = 0.0
        self._said_hello = False

    def hello(self, ts_ms: int = 0) -> WireMessage:
        self._said_hello = True
        return hello(self.profile.machine_id, ts_ms=ts_ms)

    def _next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def run_job(
        self, article_id: str, features: FeatureVector, t0_ms: int
    ) -> list[WireMessage]:
        """Messages for one job: job_start, periodic statuses, job_end."""
        p = self.profile
        rng = _job_rng(p, article_id, t0_ms)

        nominal_time, _, wear_delta = nominal_outcome(p, features)
        time_factor = max(0.01, 1.0 + p.noise_sigma * rng.gauss(0.0, 1.0))
        duration_ms = max(1, round(nominal_time * time_factor * 1000.0))
        setup_ms = min(duration_ms, round(p.setup_time_s * time_factor * 1000.0))
        t_end = t0_ms + duration_ms

        error_at: int | None = None
        if p.error_probability > 0 and rng.random() < p.error_probability:
            error_at = t0_ms + int(rng.random() * duration_ms)

        wear_start = self._wear
        self._wear = min(1.0, self._wear + wear_delta)

        def status_at(ts: int) -> WireMessage:
            if ts - t0_ms < setup_ms or setup_ms == duration_ms:
                base, state = p.idle_power_w, "idle"
            else:
                base, state = p.idle_power_w + p.processing_extra_power_w, "processing"
            power = max(0.0, base * (1.0 + p.noise_sigma * rng.gauss(0.0, 1.0)))
            wear = wear_start + wear_delta * (ts - t0_ms) / duration_ms
            return status(
                p.machine_id, self._next_seq(), ts, article_id,
                power_w=power, tool_wear=min(1.0, wear), state=state,
            )

        out = [event(p.machine_id, self._next_seq(), t0_ms, article_id, "job_start")]
        ts = t0_ms
        while ts < t_end:
            if error_at is not None and error_at <= ts:
                out.append(event(
                    p.machine_id, self._next_seq(), error_at, article_id, "error",
                    code="E_SIM", message="simulated fault",
                ))
                error_at = None
            out.append(status_at(ts))
            ts += p.status_interval_ms
        if error_at is not None:
            out.append(event(
                p.machine_id, self._next_seq(), error_at, article_id, "error",
                code="E_SIM", message="simulated fault",
            ))
        out.append(status_at(t_end))
        out.append(event(p.machine_id, self._next_seq(), t_end, article_id, "job_end"))
        return out


def simulate_job(
    profile: MachineProfile, article_id: str, features: FeatureVector, t0_ms: int
) -> list[WireMessage]:
    """A complete single-job connection stream: hello then the job."""
    sim = MachineSimulator(profile)
    return [sim.hello(ts_ms=t0_ms)] + sim.run_job(article_id, features, t0_ms)
