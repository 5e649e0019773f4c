"""Part 21 string decoding.

The scanner hands over the raw body between single quotes (quote doubling
still in place).  Supported escapes: ``''`` -> ``'`` and ``\\X2\\...\\X0\\``
UTF-16BE blocks.  ``\\S\\``, ``\\X\\`` and ``\\X4\\`` are rejected: they
depend on codepage context we refuse to guess.  Everything else passes
through byte-for-byte.
"""

from fablink.step.errors import MalformedEscapeError, UnsupportedEscapeError

_HEX = set("0123456789ABCDEFabcdef")


def decode_text(raw: str) -> str:
    """Decode the raw content of a Part 21 string literal."""
    if "'" not in raw and "\\" not in raw:
        return raw
    out: list[str] = []
    i = 0
    n = len(raw)
    while i < n:
        c = raw[i]
        if c == "'":
            # doubled quote; a stray single quote cannot occur in scanner
            # output but is passed through for direct calls
            if i + 1 < n and raw[i + 1] == "'":
                out.append("'")
                i += 2
            else:
                out.append("'")
                i += 1
        elif c == "\\":
            if raw.startswith("\\X2\\", i):
                i += 4
                end = raw.find("\\X0\\", i)
                if end < 0:
                    raise MalformedEscapeError("\\X2\\ block missing \\X0\\ terminator")
                hex_part = raw[i:end]
                if len(hex_part) % 4 != 0 or not all(ch in _HEX for ch in hex_part):
                    raise MalformedEscapeError("\\X2\\ block must hold a multiple of 4 hex digits")
                try:
                    out.append(bytes.fromhex(hex_part).decode("utf-16-be"))
                except (ValueError, UnicodeDecodeError) as exc:
                    raise MalformedEscapeError(f"\\X2\\ block is not valid UTF-16BE ({exc})") from None
                i = end + 4
            elif raw.startswith("\\X4\\", i):
                raise UnsupportedEscapeError("\\X4\\")
            elif raw.startswith("\\X\\", i):
                raise UnsupportedEscapeError("\\X\\")
            elif raw.startswith("\\S\\", i):
                raise UnsupportedEscapeError("\\S\\")
            else:
                out.append(c)
                i += 1
        else:
            out.append(c)
            i += 1
    return "".join(out)
