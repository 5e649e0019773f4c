"""ISO 10303-21 (STEP Part 21) parsing.

The token scanner has two interchangeable backends: a compiled Cython
extension (_scan_c) and a pure-Python fallback (_scan_py).  The compiled
one is preferred when the build produced it; ``SCANNER_BACKEND`` records
the choice.  ``benchmarks/bench_scanner.py`` compares the two.
"""

try:
    from fablink.step._scan_c import scan

    SCANNER_BACKEND = "c"
except ImportError:  # pragma: no cover - build-env dependent
    from fablink.step._scan_py import scan

    SCANNER_BACKEND = "python"

from fablink.step.errors import (
    DanglingRefError,
    DuplicateIdError,
    MalformedEscapeError,
    MissingSectionError,
    StepError,
    StepSyntaxError,
    UnsupportedEscapeError,
)
from fablink.step.model import (
    DERIVED,
    UNSET,
    Arg,
    Derived,
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
    Unset,
    arg_to_jsonable,
    step_to_jsonable,
)
from fablink.step.parser import parse_step, resolve_ref
from fablink.step.text import decode_text

__all__ = [
    "scan",
    "SCANNER_BACKEND",
    "parse_step",
    "resolve_ref",
    "decode_text",
    "StepFile",
    "Instance",
    "Record",
    "Arg",
    "Integer",
    "Real",
    "Text",
    "Enum",
    "Ref",
    "ListArg",
    "Typed",
    "Unset",
    "Derived",
    "UNSET",
    "DERIVED",
    "arg_to_jsonable",
    "step_to_jsonable",
    "StepError",
    "StepSyntaxError",
    "DuplicateIdError",
    "MissingSectionError",
    "DanglingRefError",
    "UnsupportedEscapeError",
    "MalformedEscapeError",
]
