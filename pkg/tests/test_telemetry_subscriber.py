"""Subscriber semantics: handshake, dedupe, stale window, counters."""

from __future__ import annotations

import socket
import time

import pytest

from conftest import simple_features
from fablink.telemetry.protocol import encode_message, event, hello, status
from fablink.telemetry.simulator import MachineProfile, simulate_job
from fablink.telemetry.subscriber import (
    STALE_WINDOW,
    HandshakeError,
    IngestSummary,
    TelemetryServer,
    subscriber_ingest,
)


class MemorySink:
    """In-memory sink with the store's key-only dedupe rule: events and
    statuses share one (machine_id, seq) key space."""

    def __init__(self):
        self.keys = set()
        self.events = []
        self.statuses = []

    def _add(self, bucket, msg):
        key = (msg.machine_id, msg.seq)
        if key in self.keys:
            return False
        self.keys.add(key)
        bucket.append(msg)
        return True

    def add_machine_event(self, msg, ingest_ts_ms):
        return self._add(self.events, msg)

    def add_machine_status(self, msg, ingest_ts_ms):
        return self._add(self.statuses, msg)


def make_sink():
    return MemorySink()


def lines_for(messages):
    return [encode_message(m) for m in messages]


def test_simulated_stream_fully_accepted():
    msgs = simulate_job(
        MachineProfile(machine_id="m1", noise_sigma=0.0, rng_seed=1),
        "a1", simple_features(500.0), 0,
    )
    sink = make_sink()
    summary = subscriber_ingest(lines_for(msgs), sink)
    # every payload message lands; the hello is protocol, not data
    assert summary.to_dict() == {
        "accepted": len(msgs) - 1, "duplicates": 0, "rejected": 0,
    }
    assert len(sink.events) == 2
    assert len(sink.statuses) == len(msgs) - 3


def test_double_replay_only_duplicates():
    msgs = simulate_job(
        MachineProfile(machine_id="m1", noise_sigma=0.0, rng_seed=1),
        "a1", simple_features(500.0), 0,
    )
    sink = make_sink()
    subscriber_ingest(lines_for(msgs), sink)
    before = (len(sink.events), len(sink.statuses))
    second = subscriber_ingest(lines_for(msgs), sink)
    assert second.to_dict() == {
        "accepted": 0, "duplicates": len(msgs) - 1, "rejected": 0,
    }
    assert (len(sink.events), len(sink.statuses)) == before


def test_first_line_must_be_hello():
    sink = make_sink()
    with pytest.raises(HandshakeError):
        subscriber_ingest(lines_for([event("m1", 1, 0, "a", "job_start")]), sink)
    with pytest.raises(HandshakeError):
        subscriber_ingest([b"not json\n"], sink)
    with pytest.raises(HandshakeError):
        subscriber_ingest([], sink)
    with pytest.raises(HandshakeError):
        subscriber_ingest([b"", b"   ", b"\n"], sink)


def test_blank_lines_skipped():
    msgs = [hello("m1"), event("m1", 1, 0, "a", "job_start")]
    raw = [b"", lines_for(msgs)[0], b"\n", lines_for(msgs)[1], b"   "]
    summary = subscriber_ingest(raw, make_sink())
    assert summary.to_dict() == {"accepted": 1, "duplicates": 0, "rejected": 0}


def test_machine_mismatch_rejected():
    lines = lines_for([
        hello("m1"),
        event("m1", 1, 0, "a", "job_start"),
        event("m2", 1, 0, "a", "job_start"),  # not the greeted machine
    ])
    summary = subscriber_ingest(lines, make_sink())
    assert summary.to_dict() == {"accepted": 1, "duplicates": 0, "rejected": 1}


def test_midstream_hello_starts_new_logical_connection():
    lines = lines_for([
        hello("m1"),
        event("m1", 1, 0, "a", "job_start"),
        hello("m2"),
        event("m2", 1, 0, "a", "job_start"),
        event("m1", 2, 0, "a", "job_end"),  # old machine: now a mismatch
    ])
    summary = subscriber_ingest(lines, make_sink())
    assert summary.to_dict() == {"accepted": 2, "duplicates": 0, "rejected": 1}


def test_duplicate_seq_counted():
    e = event("m1", 1, 0, "a", "job_start")
    summary = subscriber_ingest(lines_for([hello("m1"), e, e]), make_sink())
    assert summary.to_dict() == {"accepted": 1, "duplicates": 1, "rejected": 0}


def test_duplicate_key_across_types_counted():
    """Events and statuses share the (machine, seq) key space."""
    lines = lines_for([
        hello("m1"),
        event("m1", 1, 0, "a", "job_start"),
        status("m1", 1, 0, "a", power_w=1.0, tool_wear=0.0, state="idle"),
    ])
    summary = subscriber_ingest(lines, make_sink())
    assert summary.to_dict() == {"accepted": 1, "duplicates": 1, "rejected": 0}


def test_reorder_within_window_accepted():
    lines = lines_for([
        hello("m1"),
        status("m1", 10, 100, "a", power_w=1.0, tool_wear=0.0, state="idle"),
        status("m1", 5, 50, "a", power_w=1.0, tool_wear=0.0, state="idle"),
    ])
    summary = subscriber_ingest(lines, make_sink())
    assert summary.to_dict() == {"accepted": 2, "duplicates": 0, "rejected": 0}


def test_stale_window_boundary():
    top = STALE_WINDOW + 500
    sink = make_sink()
    lines = lines_for([
        hello("m1"),
        status("m1", top, 0, "a", power_w=1.0, tool_wear=0.0, state="idle"),
        # exactly max_seen - window: not stale
        status("m1", top - STALE_WINDOW, 0, "a", power_w=1.0, tool_wear=0.0, state="idle"),
        # one below the window: stale
        status("m1", top - STALE_WINDOW - 1, 0, "a", power_w=1.0, tool_wear=0.0, state="idle"),
    ])
    summary = subscriber_ingest(lines, sink)
    assert summary.to_dict() == {"accepted": 2, "duplicates": 0, "rejected": 1}


def test_stale_window_resets_on_new_hello():
    top = STALE_WINDOW + 500
    lines = lines_for([
        hello("m1"),
        status("m1", top, 0, "a", power_w=1.0, tool_wear=0.0, state="idle"),
        hello("m1"),
        status("m1", 1, 0, "a", power_w=2.0, tool_wear=0.0, state="idle"),
    ])
    summary = subscriber_ingest(lines, make_sink())
    assert summary.to_dict() == {"accepted": 2, "duplicates": 0, "rejected": 0}


def test_malformed_lines_rejected_and_stream_continues():
    good = lines_for([hello("m1"), event("m1", 1, 0, "a", "job_start")])
    bad = [
        b"{broken\n",
        b'{"v":1,"type":"event","machine_id":"m1","seq":2,"ts_ms":0,'
        b'"article_id":"a","payload":{"event_type":"meltdown"}}\n',
        b'{"v":2,"type":"hello","machine_id":"m1","seq":0,"ts_ms":0}\n',
        b'{"v":1,"type":"status","machine_id":"m1","seq":3,"ts_ms":0,'
        b'"article_id":"a","payload":{"power_w":-5,"tool_wear":0,"state":"idle"}}\n',
    ]
    tail = lines_for([event("m1", 4, 1, "a", "job_end")])
    summary = subscriber_ingest(good + bad + tail, make_sink())
    assert summary.to_dict() == {"accepted": 2, "duplicates": 0, "rejected": 4}


def test_summary_merge_and_dict():
    a = IngestSummary(accepted=1, duplicates=2, rejected=3)
    b = IngestSummary(accepted=10, duplicates=20, rejected=30)
    merged = a.merge(b)
    assert merged is a
    assert a.to_dict() == {"accepted": 11, "duplicates": 22, "rejected": 33}


def test_tcp_server_end_to_end():
    sink = make_sink()
    server = TelemetryServer("127.0.0.1", 0, sink)
    server.start()
    try:
        msgs = simulate_job(
            MachineProfile(machine_id="m1", noise_sigma=0.0, rng_seed=2),
            "a1", simple_features(100.0), 0,
        )
        payload = b"".join(encode_message(m) for m in msgs)
        with socket.create_connection(("127.0.0.1", server.port)) as sock:
            sock.sendall(payload)
        deadline = time.monotonic() + 5.0
        want = len(msgs) - 3  # statuses only
        while time.monotonic() < deadline:
            if len(sink.statuses) >= want and len(sink.events) >= 2:
                break
            time.sleep(0.01)
        assert len(sink.events) == 2
        assert len(sink.statuses) == want
    finally:
        server.stop()


def test_tcp_server_survives_garbage_connection():
    sink = make_sink()
    server = TelemetryServer("127.0.0.1", 0, sink)
    server.start()
    try:
        with socket.create_connection(("127.0.0.1", server.port)) as sock:
            sock.sendall(b"definitely not a hello\n")
        # server must still take a proper connection afterwards
        msgs = [hello("m1"), event("m1", 1, 0, "a", "job_start")]
        with socket.create_connection(("127.0.0.1", server.port)) as sock:
            sock.sendall(b"".join(encode_message(m) for m in msgs))
        deadline = time.monotonic() + 5.0
        while time.monotonic() < deadline and not sink.events:
            time.sleep(0.01)
        assert len(sink.events) == 1
    finally:
        server.stop()
