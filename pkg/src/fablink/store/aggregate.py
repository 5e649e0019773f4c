"""Aggregation of raw process data into per-article outcomes and the
training dataset.

Energy comes from trapezoidal integration of status power samples over
the job window; jobs pair each job_start with the next job_end from the
same machine and article in timestamp order.
"""

from __future__ import annotations

from typing import Sequence

from fablink.store.records import (
    NotFoundError,
    ProcessOutcome,
    StoreError,
    TrainingPair,
)

Sample = tuple[int, float]  # (ts_ms, power_w)


class InsufficientData(StoreError):
    """Fewer than two power samples fall inside the integration window."""


class EmptyDataset(StoreError):
    """No complete outcome with a linked design variant exists."""


def integrate_power(samples: Sequence[Sample], t0_ms: int, t1_ms: int) -> float:
    """Trapezoidal energy of ``samples`` clipped to [t0_ms, t1_ms], in Wh.

    Boundary values are linearly interpolated from the neighboring
    sample outside the window when one exists, else the nearest inside
    sample is held.  Samples must be sorted by timestamp.
    """
    if t0_ms >= t1_ms:
        raise ValueError("t0_ms must be < t1_ms")
    n = len(samples)
    lo = 0
    while lo < n and samples[lo][0] < t0_ms:
        lo += 1
    hi = n
    while hi > lo and samples[hi - 1][0] > t1_ms:
        hi -= 1
    inside = samples[lo:hi]
    if len(inside) < 2:
        raise InsufficientData(
            f"only {len(inside)} power sample(s) inside [{t0_ms}, {t1_ms}]"
        )

    points: list[Sample] = []
    if inside[0][0] > t0_ms:
        points.append((t0_ms, _boundary(samples[lo - 1] if lo > 0 else None, inside[0], t0_ms)))
    points.extend(inside)
    if inside[-1][0] < t1_ms:
        points.append((t1_ms, _boundary(samples[hi] if hi < n else None, inside[-1], t1_ms)))

    ws = 0.0
    for (ta, pa), (tb, pb) in zip(points, points[1:]):
        if tb < ta:
            raise ValueError("samples must be sorted by ts_ms")
        ws += (pa + pb) / 2.0 * (tb - ta) / 1000.0
    return ws / 3600.0


def _boundary(outside: Sample | None, inside: Sample, t_ms: int) -> float:
    if outside is None or outside[0] == inside[0]:
        return inside[1]
    t_out, p_out = outside
    t_in, p_in = inside
    frac = (t_ms - t_out) / (t_in - t_out)
    return p_out + (p_in - p_out) * frac


def assemble_outcomes(store, article_id: str) -> list[ProcessOutcome]:
    """One ProcessOutcome per job_start for the article, in start order."""
    store.get_article(article_id)  # NotFoundError for unknown articles

    events = store.events_for(article_id)
    statuses = store.statuses_for(article_id)
    feedback = store.feedback_for(article_id)

    machines = sorted({e.machine_id for e in events})
    jobs: list[tuple[int, int | None, str]] = []  # (start_ts, end_ts | None, machine)
    for machine_id in machines:
        own = [e for e in events if e.machine_id == machine_id]
        open_starts: list[int] = []
        for e in own:
            if e.event_type == "job_start":
                open_starts.append(e.ts_ms)
            elif e.event_type == "job_end" and open_starts:
                jobs.append((open_starts.pop(0), e.ts_ms, machine_id))
        jobs.extend((ts, None, machine_id) for ts in open_starts)
    jobs.sort(key=lambda j: (j[0], j[2]))

    outcomes = []
    for job_index, (t_start, t_end, machine_id) in enumerate(jobs):
        if t_end is None:
            outcomes.append(ProcessOutcome(
                article_id=article_id, job_index=job_index, machine_id=machine_id,
                production_time_s=0.0, energy_wh=0.0, tool_wear_delta=0.0,
                error_count=0, complete=False, start_ts_ms=t_start, end_ts_ms=None,
            ))
            continue

        window = [s for s in statuses
                  if s.machine_id == machine_id and t_start <= s.ts_ms <= t_end]
        samples = [(s.ts_ms, s.power_w) for s in statuses if s.machine_id == machine_id]
        try:
            energy_wh = integrate_power(samples, t_start, t_end)
        except InsufficientData:
            energy_wh = 0.0
        wear_delta = (
            window[-1].tool_wear - window[0].tool_wear if len(window) >= 2 else 0.0
        )
        error_count = sum(
            1 for e in events
            if e.machine_id == machine_id and e.event_type == "error"
            and t_start <= e.ts_ms <= t_end
        )
        error_count += sum(
            1 for f in feedback
            if f.severity in ("scrap", "major") and t_start <= f.created_ts_ms <= t_end
        )
        outcomes.append(ProcessOutcome(
            article_id=article_id, job_index=job_index, machine_id=machine_id,
            production_time_s=(t_end - t_start) / 1000.0, energy_wh=energy_wh,
            tool_wear_delta=wear_delta, error_count=error_count,
            complete=True, start_ts_ms=t_start, end_ts_ms=t_end,
        ))
    return outcomes


def build_dataset(store) -> list[TrainingPair]:
    """One TrainingPair per complete outcome of each article with variants.

    Features come from the variant with the greatest created_ts_ms at or
    before the job start (fallback: the earliest variant), with any
    thickness override applied.  Ordered by (article_id, job_index).
    """
    pairs: list[TrainingPair] = []
    for article in store.list_articles():
        variants = store.variants_for(article.article_id)
        if not variants:
            continue
        try:
            outcomes = assemble_outcomes(store, article.article_id)
        except NotFoundError:  # pragma: no cover - article just listed
            continue
        for outcome in outcomes:
            if not outcome.complete:
                continue
            chosen = None
            for v in variants:  # sorted by (created_ts_ms, variant_id)
                if v.created_ts_ms <= outcome.start_ts_ms:
                    chosen = v
            if chosen is None:
                chosen = variants[0]
            pairs.append(TrainingPair(
                article_id=article.article_id,
                features=chosen.effective_features(),
                targets=(outcome.energy_wh, outcome.production_time_s),
            ))
    if not pairs:
        raise EmptyDataset("no complete outcome with a linked design variant")
    return pairs
