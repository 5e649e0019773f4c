"""Pure-Python Part 21 token scanner.

Reference implementation of the tokenizer; fablink.step.scan prefers the
compiled twin (_scan_c) when it imported successfully.  Both must produce
identical token streams and identical errors for any input.
"""

from fablink.step import _tokens as tk
from fablink.step.errors import (
    MalformedEscapeError,
    StepSyntaxError,
    UnsupportedEscapeError,
)
from fablink.step.text import decode_text

_WS = " \t\r\n\f\v"
_DIGITS = "0123456789"
_UPPER = "ABCDEFGHIJKLMNOPQRSTUVWXYZ_"
_IDENT = _UPPER + _DIGITS


def scan(text: str) -> list:
    """Tokenize a full exchange file into (kind, value, line, col) tuples."""
    tokens = []
    append = tokens.append
    i = 0
    n = len(text)
    line = 1
    line_start = -1  # so column = i - line_start

    while i < n:
        c = text[i]
        if c in _WS:
            if c == "\n":
                line += 1
                line_start = i
            i += 1
            continue
        col = i - line_start
        if c == "/":
            if i + 1 < n and text[i + 1] == "*":
                end = text.find("*/", i + 2)
                if end < 0:
                    raise StepSyntaxError(line, col, "unterminated comment")
                nl = text.count("\n", i, end + 2)
                if nl:
                    line += nl
                    line_start = text.rfind("\n", i, end + 2)
                i = end + 2
                continue
            raise StepSyntaxError(line, col, "unexpected character '/'")
        if c == "(":
            append((tk.LPAREN, None, line, col))
            i += 1
        elif c == ")":
            append((tk.RPAREN, None, line, col))
            i += 1
        elif c == ",":
            append((tk.COMMA, None, line, col))
            i += 1
        elif c == ";":
            append((tk.SEMI, None, line, col))
            i += 1
        elif c == "=":
            append((tk.EQ, None, line, col))
            i += 1
        elif c == "$":
            append((tk.DOLLAR, None, line, col))
            i += 1
        elif c == "*":
            append((tk.STAR, None, line, col))
            i += 1
        elif c == "#":
            j = i + 1
            while j < n and text[j] in _DIGITS:
                j += 1
            if j == i + 1:
                raise StepSyntaxError(line, col, "'#' must be followed by an instance id")
            append((tk.REF, int(text[i + 1 : j]), line, col))
            i = j
        elif c in _DIGITS or c == "+" or c == "-":
            j = i
            if c == "+" or c == "-":
                j += 1
                if j >= n or text[j] not in _DIGITS:
                    raise StepSyntaxError(line, col, "digit expected after sign")
            while j < n and text[j] in _DIGITS:
                j += 1
            is_real = False
            if j < n and text[j] == ".":
                is_real = True
                j += 1
                while j < n and text[j] in _DIGITS:
                    j += 1
            if j < n and (text[j] == "E" or text[j] == "e"):
                is_real = True
                j += 1
                if j < n and (text[j] == "+" or text[j] == "-"):
                    j += 1
                if j >= n or text[j] not in _DIGITS:
                    raise StepSyntaxError(line, col, "digit expected in exponent")
                while j < n and text[j] in _DIGITS:
                    j += 1
            lit = text[i:j]
            if is_real:
                append((tk.REAL, float(lit), line, col))
            else:
                value = int(lit)
                if value < tk.I64_MIN or value > tk.I64_MAX:
                    raise StepSyntaxError(line, col, f"integer literal {lit} out of 64-bit range")
                append((tk.INT, value, line, col))
            i = j
        elif c == "'":
            j = i + 1
            while True:
                end = text.find("'", j)
                if end < 0:
                    raise StepSyntaxError(line, col, "unterminated string")
                if end + 1 < n and text[end + 1] == "'":
                    j = end + 2
                    continue
                break
            raw = text[i + 1 : end]
            try:
                value = decode_text(raw)
            except (UnsupportedEscapeError, MalformedEscapeError) as exc:
                exc.line = line
                exc.column = col
                raise
            append((tk.STRING, value, line, col))
            nl = raw.count("\n")
            if nl:
                line += nl
                line_start = text.rfind("\n", i, end)
            i = end + 1
        elif c == ".":
            j = i + 1
            if j >= n or text[j] not in _UPPER:
                raise StepSyntaxError(line, col, "malformed enumeration value")
            while j < n and text[j] in _IDENT:
                j += 1
            if j >= n or text[j] != ".":
                raise StepSyntaxError(line, col, "enumeration value missing closing '.'")
            append((tk.ENUM, text[i + 1 : j], line, col))
            i = j + 1
        elif c in _UPPER:
            if text.startswith("END-ISO-10303-21", i):
                append((tk.KEYWORD, "END-ISO-10303-21", line, col))
                i += 16
                continue
            if text.startswith("ISO-10303-21", i):
                append((tk.KEYWORD, "ISO-10303-21", line, col))
                i += 12
                continue
            j = i + 1
            while j < n and text[j] in _IDENT:
                j += 1
            append((tk.KEYWORD, text[i:j], line, col))
            i = j
        elif c == '"':
            raise StepSyntaxError(line, col, "binary literals are not supported")
        elif c == "!":
            raise StepSyntaxError(line, col, "user-defined keywords are not supported")
        else:
            raise StepSyntaxError(line, col, f"unexpected character {c!r}")

    append((tk.EOF, None, line, n - line_start))
    return tokens
