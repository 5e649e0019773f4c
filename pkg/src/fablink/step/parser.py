"""Recursive-descent parser for ISO 10303-21 exchange files.

Scope: full Part 21 syntax (simple and complex instances, every literal
form representable by the Arg model), no EXPRESS schema validation.  The
scanner backend is selected at import time in fablink.step.
"""

from __future__ import annotations

import hashlib

from fablink.step import _tokens as tk
from fablink.step.errors import (
    DanglingRefError,
    DuplicateIdError,
    MissingSectionError,
    StepSyntaxError,
)
from fablink.step.model import (
    DERIVED,
    UNSET,
    Arg,
    Enum,
    Instance,
    Integer,
    ListArg,
    Real,
    Record,
    Ref,
    StepFile,
    Text,
    Typed,
)

_HEADER_KEYWORDS = ("HEADER", "DATA", "ENDSEC", "ISO-10303-21", "END-ISO-10303-21")


class _TokenCursor:
    __slots__ = ("tokens", "pos")

    def __init__(self, tokens: list):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        t = self.tokens[self.pos]
        if t[0] != tk.EOF:
            self.pos += 1
        return t

    def expect(self, kind: int, what: str | None = None):
        t = self.peek()
        if t[0] != kind:
            want = what or tk.KIND_NAMES[kind]
            raise StepSyntaxError(t[2], t[3], f"expected {want}, found {tk.KIND_NAMES[t[0]]}")
        return self.advance()

    def expect_keyword(self, name: str):
        t = self.peek()
        if t[0] != tk.KEYWORD or t[1] != name:
            found = t[1] if t[0] == tk.KEYWORD else tk.KIND_NAMES[t[0]]
            raise StepSyntaxError(t[2], t[3], f"expected {name}, found {found}")
        return self.advance()


def parse_step(data: bytes, scan=None) -> StepFile:
    """Parse raw exchange-file bytes into a StepFile.

    ``scan`` overrides the scanner backend (used by the parity tests and the
    benchmark); default is the backend chosen at import time.
    """
    if scan is None:
        from fablink.step import scan as default_scan

        scan = default_scan
    source_hash = hashlib.sha256(data).hexdigest()
    text = data.decode("latin-1")
    cur = _TokenCursor(scan(text))

    cur.expect_keyword("ISO-10303-21")
    cur.expect(tk.SEMI)

    t = cur.peek()
    if not (t[0] == tk.KEYWORD and t[1] == "HEADER"):
        raise MissingSectionError("HEADER")
    cur.advance()
    cur.expect(tk.SEMI)
    header: list[Record] = []
    schema_count = 0
    while True:
        t = cur.peek()
        if t[0] == tk.KEYWORD and t[1] == "ENDSEC":
            cur.advance()
            cur.expect(tk.SEMI)
            break
        rec = _parse_record(cur)
        cur.expect(tk.SEMI)
        header.append(rec)
        if rec.name == "FILE_SCHEMA":
            schema_count += 1
    if schema_count != 1:
        raise StepSyntaxError(
            t[2], t[3], f"header must contain exactly one FILE_SCHEMA record, found {schema_count}"
        )

    t = cur.peek()
    if not (t[0] == tk.KEYWORD and t[1] == "DATA"):
        raise MissingSectionError("DATA")
    cur.advance()
    cur.expect(tk.SEMI)

    instances: dict[int, Instance] = {}
    while True:
        t = cur.peek()
        if t[0] == tk.KEYWORD and t[1] == "ENDSEC":
            cur.advance()
            cur.expect(tk.SEMI)
            break
        ref = cur.expect(tk.REF, "instance definition '#id'")
        instance_id = ref[1]
        if instance_id < 1 or instance_id > tk.I64_MAX:
            raise StepSyntaxError(ref[2], ref[3], f"instance id #{instance_id} out of range")
        cur.expect(tk.EQ)
        t = cur.peek()
        if t[0] == tk.LPAREN:
            cur.advance()
            records = []
            while cur.peek()[0] == tk.KEYWORD:
                records.append(_parse_record(cur))
            if not records:
                t = cur.peek()
                raise StepSyntaxError(t[2], t[3], "complex instance must contain at least one record")
            cur.expect(tk.RPAREN)
        else:
            records = [_parse_record(cur)]
        cur.expect(tk.SEMI)
        if instance_id in instances:
            raise DuplicateIdError(instance_id)
        instances[instance_id] = Instance(id=instance_id, records=tuple(records))

    cur.expect_keyword("END-ISO-10303-21")
    cur.expect(tk.SEMI)
    t = cur.peek()
    if t[0] != tk.EOF:
        raise StepSyntaxError(t[2], t[3], "content after END-ISO-10303-21")

    return StepFile(header=tuple(header), instances=instances, source_hash=source_hash)


def _parse_record(cur: _TokenCursor) -> Record:
    t = cur.expect(tk.KEYWORD, "entity name")
    name = t[1]
    if name in _HEADER_KEYWORDS:
        raise StepSyntaxError(t[2], t[3], f"unexpected section keyword {name}")
    cur.expect(tk.LPAREN)
    args = _parse_arg_list(cur)
    cur.expect(tk.RPAREN)
    return Record(name=name, args=args)


def _parse_arg_list(cur: _TokenCursor) -> tuple[Arg, ...]:
    if cur.peek()[0] == tk.RPAREN:
        return ()
    args = [_parse_arg(cur)]
    while cur.peek()[0] == tk.COMMA:
        cur.advance()
        args.append(_parse_arg(cur))
    return tuple(args)


def _parse_arg(cur: _TokenCursor) -> Arg:
    t = cur.peek()
    kind = t[0]
    if kind == tk.INT:
        cur.advance()
        return Integer(t[1])
    if kind == tk.REAL:
        cur.advance()
        return Real(t[1])
    if kind == tk.STRING:
        cur.advance()
        return Text(t[1])
    if kind == tk.ENUM:
        cur.advance()
        return Enum(t[1])
    if kind == tk.REF:
        cur.advance()
        if t[1] < 1 or t[1] > tk.I64_MAX:
            raise StepSyntaxError(t[2], t[3], f"reference #{t[1]} out of range")
        return Ref(t[1])
    if kind == tk.DOLLAR:
        cur.advance()
        return UNSET
    if kind == tk.STAR:
        cur.advance()
        return DERIVED
    if kind == tk.LPAREN:
        cur.advance()
        items = _parse_arg_list(cur)
        cur.expect(tk.RPAREN)
        return ListArg(items)
    if kind == tk.KEYWORD:
        cur.advance()
        cur.expect(tk.LPAREN)
        args = _parse_arg_list(cur)
        cur.expect(tk.RPAREN)
        return Typed(name=t[1], args=args)
    raise StepSyntaxError(t[2], t[3], f"expected a parameter, found {tk.KIND_NAMES[kind]}")


def resolve_ref(step: StepFile, instance_id: int) -> Instance:
    """Look up an instance by id; DanglingRefError when absent."""
    try:
        return step.instances[instance_id]
    except KeyError:
        raise DanglingRefError(instance_id) from None
