"""Subscriber side of the machine-data protocol.

``subscriber_ingest`` consumes one connection's newline-delimited stream
and persists accepted messages through a sink (normally the linkage
store, which deduplicates on the (machine_id, seq) natural key).  A
small threaded TCP listener exposes the same ingest loop on a port.
"""

from __future__ import annotations

import socketserver
import threading
import time
from dataclasses import dataclass
from typing import Iterable, Protocol

from fablink.errors import FablinkError
from fablink.telemetry.protocol import ProtocolError, WireMessage, decode_message

STALE_WINDOW = 1000


class HandshakeError(FablinkError):
    """The first line of a connection was not a valid hello."""


class TelemetrySink(Protocol):
    def add_machine_event(self, msg: WireMessage, ingest_ts_ms: int) -> bool: ...

    def add_machine_status(self, msg: WireMessage, ingest_ts_ms: int) -> bool: ...


@dataclass(slots=True)
class IngestSummary:
    accepted: int = 0
    duplicates: int = 0
    rejected: int = 0

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "duplicates": self.duplicates,
            "rejected": self.rejected,
        }

    def merge(self, other: "IngestSummary") -> "IngestSummary":
        self.accepted += other.accepted
        self.duplicates += other.duplicates
        self.rejected += other.rejected
        return self


def _now_ms() -> int:
    return int(time.time() * 1000)


def subscriber_ingest(
    lines: Iterable[bytes | str],
    sink: TelemetrySink,
    *,
    now_ms=_now_ms,
) -> IngestSummary:
    """Ingest one connection until end of stream.

    The first line must be a hello; later hellos start a fresh logical
    connection (new stale window), which lets recorded multi-connection
    NDJSON files replay through the same loop.  Malformed lines and
    stale sequence numbers count as rejected; duplicates are dropped
    and counted.  Persistence failures propagate.
    """
    summary = IngestSummary()
    it = iter(lines)

    first = _next_content_line(it)
    if first is None:
        raise HandshakeError("connection closed before hello")
    try:
        msg = decode_message(first)
    except ProtocolError as exc:
        raise HandshakeError(f"first line is not a valid hello: {exc.reason}") from None
    if msg.type != "hello":
        raise HandshakeError(f"first line is not a hello (got {msg.type})")

    machine_id = msg.machine_id
    max_seen = 0

    for raw in it:
        if isinstance(raw, (bytes, str)) and not raw.strip():
            continue
        try:
            msg = decode_message(raw)
        except ProtocolError:
            summary.rejected += 1
            continue
        if msg.type == "hello":
            machine_id = msg.machine_id
            max_seen = 0
            continue
        if msg.machine_id != machine_id:
            summary.rejected += 1
            continue
        if msg.seq < max_seen - STALE_WINDOW:
            summary.rejected += 1
            continue
        max_seen = max(max_seen, msg.seq)
        add = sink.add_machine_event if msg.type == "event" else sink.add_machine_status
        if add(msg, now_ms()):
            summary.accepted += 1
        else:
            summary.duplicates += 1
    return summary


def _next_content_line(it) -> bytes | str | None:
    for raw in it:
        if isinstance(raw, (bytes, str)) and not raw.strip():
            continue
        return raw
    return None


class TelemetryServer:
    """Threaded newline-framed TCP listener feeding a sink."""

    def __init__(self, host: str, port: int, sink: TelemetrySink):
        self.sink = sink
        outer = self

        class Handler(socketserver.StreamRequestHandler):
            def handle(self):
                try:
                    subscriber_ingest(self.rfile, outer.sink)
                except (HandshakeError, ConnectionError, OSError):
                    pass

        class Server(socketserver.ThreadingTCPServer):
            allow_reuse_address = True
            daemon_threads = True

        self._server = Server((host, port), Handler)
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    def start(self):
        self._thread = threading.Thread(
            target=self._server.serve_forever, name="telemetry", daemon=True
        )
        self._thread.start()

    def stop(self):
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
