"""Token kind constants shared by the pure-Python and compiled scanners.

A token is the tuple ``(kind, value, line, column)`` with 1-based positions.
The compiled scanner mirrors these values; test_scanner_parity guards the
agreement.
"""

KEYWORD = 0
INT = 1
REAL = 2
STRING = 3
ENUM = 4
REF = 5
LPAREN = 6
RPAREN = 7
COMMA = 8
SEMI = 9
EQ = 10
DOLLAR = 11
STAR = 12
EOF = 13

KIND_NAMES = {
    KEYWORD: "keyword",
    INT: "integer",
    REAL: "real",
    STRING: "string",
    ENUM: "enumeration",
    REF: "reference",
    LPAREN: "'('",
    RPAREN: "')'",
    COMMA: "','",
    SEMI: "';'",
    EQ: "'='",
    DOLLAR: "'$'",
    STAR: "'*'",
    EOF: "end of file",
}

I64_MIN = -(2**63)
I64_MAX = 2**63 - 1
