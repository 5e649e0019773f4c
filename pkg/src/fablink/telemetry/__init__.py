"""Machine-data wire protocol, subscriber, and deterministic simulator."""

from fablink.telemetry.protocol import (
    EVENT_TYPES,
    MACHINE_STATES,
    PROTOCOL_VERSION,
    EventPayload,
    ProtocolError,
    StatusPayload,
    WireMessage,
    decode_message,
    encode_message,
    event,
    hello,
    status,
)
from fablink.telemetry.simulator import (
    MachineProfile,
    MachineSimulator,
    nominal_outcome,
    simulate_job,
)
from fablink.telemetry.subscriber import (
    STALE_WINDOW,
    HandshakeError,
    IngestSummary,
    TelemetryServer,
    subscriber_ingest,
)

__all__ = [
    "EVENT_TYPES",
    "MACHINE_STATES",
    "PROTOCOL_VERSION",
    "STALE_WINDOW",
    "EventPayload",
    "HandshakeError",
    "IngestSummary",
    "MachineProfile",
    "MachineSimulator",
    "ProtocolError",
    "StatusPayload",
    "TelemetryServer",
    "WireMessage",
    "decode_message",
    "encode_message",
    "event",
    "hello",
    "nominal_outcome",
    "simulate_job",
    "status",
    "subscriber_ingest",
]
