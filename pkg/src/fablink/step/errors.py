"""Errors raised while scanning/parsing ISO 10303-21 exchange files."""

from fablink.errors import FablinkError, ValidationError


class StepError(ValidationError):
    """Base class for all STEP parse/resolve errors."""


class StepSyntaxError(StepError):
    """Malformed token or structure at a known position (1-based line/column)."""

    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}, column {column}: {message}")


class DuplicateIdError(StepError):
    """The same #id was defined twice in the DATA section."""

    def __init__(self, instance_id: int):
        self.instance_id = instance_id
        super().__init__(f"duplicate instance id #{instance_id}")


class MissingSectionError(StepError):
    """HEADER or DATA section is absent."""

    def __init__(self, section: str):
        self.section = section
        super().__init__(f"missing {section} section")


class DanglingRefError(StepError):
    """A #id reference points at an instance that does not exist."""

    def __init__(self, instance_id: int):
        self.instance_id = instance_id
        super().__init__(f"reference to undefined instance #{instance_id}")


class UnsupportedEscapeError(StepError):
    """String contains an escape this parser deliberately rejects.

    ``\\S\\``, ``\\X\\`` and ``\\X4\\`` need codepage/encoding context the
    file may not declare; guessing would corrupt text silently.  Position is
    attached by the scanner when the string came from a file.
    """

    def __init__(self, escape: str, line: int | None = None, column: int | None = None):
        self.escape = escape
        self.line = line
        self.column = column
        at = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"unsupported string escape {escape!r}{at}")


class MalformedEscapeError(StepError):
    """A ``\\X2\\`` block is truncated or not valid UTF-16BE hex."""

    def __init__(self, detail: str, line: int | None = None, column: int | None = None):
        self.detail = detail
        self.line = line
        self.column = column
        at = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"malformed string escape: {detail}{at}")
