"""Machine-data wire protocol: newline-delimited JSON, version 1.

Three message types on a connection: one ``hello`` (seq 0), then ``event``
and ``status`` messages with strictly increasing seq.  Field sets are
closed: unknown fields are a protocol error, as are out-of-range values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from fablink.errors import FablinkError

PROTOCOL_VERSION = 1

EVENT_TYPES = ("job_start", "job_end", "error", "tool_change")
MACHINE_STATES = ("idle", "processing")

_U64_MAX = 2**64 - 1


class ProtocolError(FablinkError):
    """A wire line violates the protocol."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


@dataclass(frozen=True, slots=True)
class EventPayload:
    event_type: str
    code: Optional[str] = None
    message: Optional[str] = None


@dataclass(frozen=True, slots=True)
class StatusPayload:
    power_w: float
    tool_wear: float
    state: str


@dataclass(frozen=True, slots=True)
class WireMessage:
    type: str  # "hello" | "event" | "status"
    machine_id: str
    seq: int
    ts_ms: int
    article_id: Optional[str] = None
    payload: Optional[EventPayload | StatusPayload] = None

    def __post_init__(self):
        _validate_message(self)


def hello(machine_id: str, ts_ms: int = 0) -> WireMessage:
    return WireMessage(type="hello", machine_id=machine_id, seq=0, ts_ms=ts_ms)


def event(
    machine_id: str,
    seq: int,
    ts_ms: int,
    article_id: str,
    event_type: str,
    code: str | None = None,
    message: str | None = None,
) -> WireMessage:
    return WireMessage(
        type="event",
        machine_id=machine_id,
        seq=seq,
        ts_ms=ts_ms,
        article_id=article_id,
        payload=EventPayload(event_type=event_type, code=code, message=message),
    )


def status(
    machine_id: str,
    seq: int,
    ts_ms: int,
    article_id: str,
    power_w: float,
    tool_wear: float,
    state: str,
) -> WireMessage:
    return WireMessage(
        type="status",
        machine_id=machine_id,
        seq=seq,
        ts_ms=ts_ms,
        article_id=article_id,
        payload=StatusPayload(power_w=float(power_w), tool_wear=float(tool_wear), state=state),
    )


def _validate_message(msg: WireMessage):
    if msg.type not in ("hello", "event", "status"):
        raise ProtocolError(f"unknown message type {msg.type!r}")
    if not isinstance(msg.machine_id, str) or not msg.machine_id:
        raise ProtocolError("machine_id must be a non-empty string")
    if not isinstance(msg.seq, int) or isinstance(msg.seq, bool) or not 0 <= msg.seq <= _U64_MAX:
        raise ProtocolError("seq must be an unsigned 64-bit integer")
    if not isinstance(msg.ts_ms, int) or isinstance(msg.ts_ms, bool) or msg.ts_ms < 0:
        raise ProtocolError("ts_ms must be unsigned epoch milliseconds")

    if msg.type == "hello":
        if msg.seq != 0:
            raise ProtocolError("hello must carry seq 0")
        if msg.article_id is not None or msg.payload is not None:
            raise ProtocolError("hello carries no article_id or payload")
        return

    if msg.seq < 1:
        raise ProtocolError(f"{msg.type} seq must be >= 1")
    if not isinstance(msg.article_id, str) or not msg.article_id:
        raise ProtocolError(f"{msg.type} requires an article_id")

    if msg.type == "event":
        p = msg.payload
        if not isinstance(p, EventPayload):
            raise ProtocolError("event requires an event payload")
        if p.event_type not in EVENT_TYPES:
            raise ProtocolError(f"unknown event_type {p.event_type!r}")
        for name, v in (("code", p.code), ("message", p.message)):
            if v is not None and not isinstance(v, str):
                raise ProtocolError(f"event {name} must be a string")
    else:
        p = msg.payload
        if not isinstance(p, StatusPayload):
            raise ProtocolError("status requires a status payload")
        if not isinstance(p.power_w, (int, float)) or isinstance(p.power_w, bool) or p.power_w < 0:
            raise ProtocolError("power_w must be >= 0")
        if (
            not isinstance(p.tool_wear, (int, float))
            or isinstance(p.tool_wear, bool)
            or not 0.0 <= p.tool_wear <= 1.0
        ):
            raise ProtocolError("tool_wear must lie in [0, 1]")
        if p.state not in MACHINE_STATES:
            raise ProtocolError(f"unknown machine state {p.state!r}")


def encode_message(msg: WireMessage) -> bytes:
    """One newline-terminated UTF-8 JSON line."""
    obj: dict = {"v": PROTOCOL_VERSION, "type": msg.type, "machine_id": msg.machine_id,
                 "seq": msg.seq, "ts_ms": msg.ts_ms}
    if msg.type != "hello":
        obj["article_id"] = msg.article_id
        p = msg.payload
        if msg.type == "event":
            payload: dict = {"event_type": p.event_type}
            if p.code is not None:
                payload["code"] = p.code
            if p.message is not None:
                payload["message"] = p.message
        else:
            payload = {"power_w": float(p.power_w), "tool_wear": float(p.tool_wear), "state": p.state}
        obj["payload"] = payload
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False).encode("utf-8") + b"\n"


def _take(obj: dict, required: tuple[str, ...], optional: tuple[str, ...] = ()) -> dict:
    keys = set(obj)
    missing = [k for k in required if k not in keys]
    if missing:
        raise ProtocolError(f"missing field {missing[0]!r}")
    extra = keys - set(required) - set(optional)
    if extra:
        raise ProtocolError(f"unknown field {sorted(extra)[0]!r}")
    return obj


def decode_message(line: bytes | str) -> WireMessage:
    """Parse and validate one wire line."""
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ProtocolError(f"line is not UTF-8 ({exc})") from None
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"malformed JSON ({exc.msg})") from None
    if not isinstance(obj, dict):
        raise ProtocolError("line must hold a JSON object")
    if obj.get("v") != PROTOCOL_VERSION:
        raise ProtocolError("unsupported version")
    mtype = obj.get("type")
    if mtype == "hello":
        _take(obj, ("v", "type", "machine_id", "seq", "ts_ms"))
        return _build(obj, None, None)
    if mtype == "event":
        _take(obj, ("v", "type", "machine_id", "seq", "ts_ms", "article_id", "payload"))
        p = obj["payload"]
        if not isinstance(p, dict):
            raise ProtocolError("event payload must be an object")
        _take(p, ("event_type",), ("code", "message"))
        payload = EventPayload(
            event_type=p.get("event_type"), code=p.get("code"), message=p.get("message")
        )
        return _build(obj, obj.get("article_id"), payload)
    if mtype == "status":
        _take(obj, ("v", "type", "machine_id", "seq", "ts_ms", "article_id", "payload"))
        p = obj["payload"]
        if not isinstance(p, dict):
            raise ProtocolError("status payload must be an object")
        _take(p, ("power_w", "tool_wear", "state"))
        for k in ("power_w", "tool_wear"):
            if isinstance(p[k], bool) or not isinstance(p[k], (int, float)):
                raise ProtocolError(f"status {k} must be a number")
        payload = StatusPayload(
            power_w=float(p["power_w"]), tool_wear=float(p["tool_wear"]), state=p.get("state")
        )
        return _build(obj, obj.get("article_id"), payload)
    raise ProtocolError(f"unknown message type {mtype!r}")


def _build(obj: dict, article_id, payload) -> WireMessage:
    seq = obj.get("seq")
    ts = obj.get("ts_ms")
    if isinstance(seq, bool) or not isinstance(seq, int):
        raise ProtocolError("seq must be an integer")
    if isinstance(ts, bool) or not isinstance(ts, int):
        raise ProtocolError("ts_ms must be an integer")
    machine_id = obj.get("machine_id")
    if not isinstance(machine_id, str):
        raise ProtocolError("machine_id must be a string")
    if article_id is not None and not isinstance(article_id, str):
        raise ProtocolError("article_id must be a string")
    try:
        return WireMessage(
            type=obj["type"], machine_id=machine_id, seq=seq, ts_ms=ts,
            article_id=article_id, payload=payload,
        )
    except ProtocolError:
        raise
