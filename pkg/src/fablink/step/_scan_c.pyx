# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled Part 21 token scanner.

Transliteration of _scan_py.scan with typed locals; must stay
behaviour-identical (tokens and errors) with the pure-Python twin.
"""

from fablink.step.errors import (
    MalformedEscapeError,
    StepSyntaxError,
    UnsupportedEscapeError,
)
from fablink.step.text import decode_text

cdef int KEYWORD = 0
cdef int INT = 1
cdef int REAL = 2
cdef int STRING = 3
cdef int ENUM = 4
cdef int REF = 5
cdef int LPAREN = 6
cdef int RPAREN = 7
cdef int COMMA = 8
cdef int SEMI = 9
cdef int EQ = 10
cdef int DOLLAR = 11
cdef int STAR = 12
cdef int EOF = 13

cdef object I64_MIN = -(2**63)
cdef object I64_MAX = 2**63 - 1


cdef inline bint _is_ws(Py_UCS4 c):
    return c == u' ' or c == u'\t' or c == u'\r' or c == u'\n' or c == u'\f' or c == u'\v'


cdef inline bint _is_digit(Py_UCS4 c):
    return u'0' <= c <= u'9'


cdef inline bint _is_upper(Py_UCS4 c):
    return (u'A' <= c <= u'Z') or c == u'_'


cdef inline bint _is_ident(Py_UCS4 c):
    return (u'A' <= c <= u'Z') or c == u'_' or (u'0' <= c <= u'9')


def scan(str text):
    """Tokenize a full exchange file into (kind, value, line, col) tuples."""
    cdef list tokens = []
    cdef Py_ssize_t i = 0, j, n = len(text), end, line_start = -1
    cdef Py_ssize_t nl
    cdef int line = 1, col
    cdef Py_UCS4 c
    cdef bint is_real
    cdef str lit, raw
    cdef object value

    while i < n:
        c = text[i]
        if _is_ws(c):
            if c == u'\n':
                line += 1
                line_start = i
            i += 1
            continue
        col = <int> (i - line_start)
        if c == u'/':
            if i + 1 < n and text[i + 1] == u'*':
                end = text.find("*/", i + 2)
                if end < 0:
                    raise StepSyntaxError(line, col, "unterminated comment")
                nl = text.count("\n", i, end + 2)
                if nl:
                    line += <int> nl
                    line_start = text.rfind("\n", i, end + 2)
                i = end + 2
                continue
            raise StepSyntaxError(line, col, "unexpected character '/'")
        if c == u'(':
            tokens.append((LPAREN, None, line, col))
            i += 1
        elif c == u')':
            tokens.append((RPAREN, None, line, col))
            i += 1
        elif c == u',':
            tokens.append((COMMA, None, line, col))
            i += 1
        elif c == u';':
            tokens.append((SEMI, None, line, col))
            i += 1
        elif c == u'=':
            tokens.append((EQ, None, line, col))
            i += 1
        elif c == u'$':
            tokens.append((DOLLAR, None, line, col))
            i += 1
        elif c == u'*':
            tokens.append((STAR, None, line, col))
            i += 1
        elif c == u'#':
            j = i + 1
            while j < n and _is_digit(text[j]):
                j += 1
            if j == i + 1:
                raise StepSyntaxError(line, col, "'#' must be followed by an instance id")
            tokens.append((REF, int(text[i + 1:j]), line, col))
            i = j
        elif _is_digit(c) or c == u'+' or c == u'-':
            j = i
            if c == u'+' or c == u'-':
                j += 1
                if j >= n or not _is_digit(text[j]):
                    raise StepSyntaxError(line, col, "digit expected after sign")
            while j < n and _is_digit(text[j]):
                j += 1
            is_real = False
            if j < n and text[j] == u'.':
                is_real = True
                j += 1
                while j < n and _is_digit(text[j]):
                    j += 1
            if j < n and (text[j] == u'E' or text[j] == u'e'):
                is_real = True
                j += 1
                if j < n and (text[j] == u'+' or text[j] == u'-'):
                    j += 1
                if j >= n or not _is_digit(text[j]):
                    raise StepSyntaxError(line, col, "digit expected in exponent")
                while j < n and _is_digit(text[j]):
                    j += 1
            lit = text[i:j]
            if is_real:
                tokens.append((REAL, float(lit), line, col))
            else:
                value = int(lit)
                if value < I64_MIN or value > I64_MAX:
                    raise StepSyntaxError(line, col, f"integer literal {lit} out of 64-bit range")
                tokens.append((INT, value, line, col))
            i = j
        elif c == u"'":
            j = i + 1
            while True:
                end = text.find("'", j)
                if end < 0:
                    raise StepSyntaxError(line, col, "unterminated string")
                if end + 1 < n and text[end + 1] == u"'":
                    j = end + 2
                    continue
                break
            raw = text[i + 1:end]
            try:
                value = decode_text(raw)
            except (UnsupportedEscapeError, MalformedEscapeError) as exc:
                exc.line = line
                exc.column = col
                raise
            tokens.append((STRING, value, line, col))
            nl = raw.count("\n")
            if nl:
                line += <int> nl
                line_start = text.rfind("\n", i, end)
            i = end + 1
        elif c == u'.':
            j = i + 1
            if j >= n or not _is_upper(text[j]):
                raise StepSyntaxError(line, col, "malformed enumeration value")
            while j < n and _is_ident(text[j]):
                j += 1
            if j >= n or text[j] != u'.':
                raise StepSyntaxError(line, col, "enumeration value missing closing '.'")
            tokens.append((ENUM, text[i + 1:j], line, col))
            i = j + 1
        elif _is_upper(c):
            if text.startswith("END-ISO-10303-21", i):
                tokens.append((KEYWORD, "END-ISO-10303-21", line, col))
                i += 16
                continue
            if text.startswith("ISO-10303-21", i):
                tokens.append((KEYWORD, "ISO-10303-21", line, col))
                i += 12
                continue
            j = i + 1
            while j < n and _is_ident(text[j]):
                j += 1
            tokens.append((KEYWORD, text[i:j], line, col))
            i = j
        elif c == u'"':
            raise StepSyntaxError(line, col, "binary literals are not supported")
        elif c == u'!':
            raise StepSyntaxError(line, col, "user-defined keywords are not supported")
        else:
            raise StepSyntaxError(line, col, f"unexpected character {chr(c)!r}")

    tokens.append((EOF, None, line, <int> (n - line_start)))
    return tokens
