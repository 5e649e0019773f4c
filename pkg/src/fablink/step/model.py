"""In-memory representation of a parsed Part 21 exchange structure."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


class Unset:
    """The omitted-parameter token ``$``."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Unset"


class Derived:
    """The derived-parameter token ``*``."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Derived"


UNSET = Unset()
DERIVED = Derived()


@dataclass(frozen=True, slots=True)
class Integer:
    value: int


@dataclass(frozen=True, slots=True)
class Real:
    value: float


@dataclass(frozen=True, slots=True)
class Text:
    value: str


@dataclass(frozen=True, slots=True)
class Enum:
    value: str


@dataclass(frozen=True, slots=True)
class Ref:
    target: int


@dataclass(frozen=True, slots=True)
class ListArg:
    items: tuple["Arg", ...]

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)


@dataclass(frozen=True, slots=True)
class Typed:
    name: str
    args: tuple["Arg", ...]


Arg = Union[Integer, Real, Text, Enum, Ref, ListArg, Typed, Unset, Derived]


@dataclass(frozen=True, slots=True)
class Record:
    """One ``ENTITY_NAME(args)`` record; complex instances carry several."""

    name: str
    args: tuple[Arg, ...]


@dataclass(frozen=True, slots=True)
class Instance:
    """A ``#id = ...;`` entity instance from the DATA section."""

    id: int
    records: tuple[Record, ...]

    @property
    def name(self) -> str:
        """Entity name of the first (for simple instances: only) record."""
        return self.records[0].name

    @property
    def args(self) -> tuple[Arg, ...]:
        return self.records[0].args

    @property
    def is_complex(self) -> bool:
        return len(self.records) > 1


@dataclass(frozen=True)
class StepFile:
    """Parsed exchange structure: header records plus the id -> instance map."""

    header: tuple[Record, ...]
    instances: dict[int, Instance]
    source_hash: str

    def schema_names(self) -> tuple[str, ...]:
        """Schema identifiers from the FILE_SCHEMA header record."""
        for rec in self.header:
            if rec.name == "FILE_SCHEMA" and rec.args:
                first = rec.args[0]
                if isinstance(first, ListArg):
                    return tuple(a.value for a in first.items if isinstance(a, Text))
        return ()


def arg_to_jsonable(arg: Arg):
    """Tagged-variant JSON rendering of one argument."""
    if isinstance(arg, Integer):
        return {"type": "integer", "value": arg.value}
    if isinstance(arg, Real):
        return {"type": "real", "value": arg.value}
    if isinstance(arg, Text):
        return {"type": "text", "value": arg.value}
    if isinstance(arg, Enum):
        return {"type": "enum", "value": arg.value}
    if isinstance(arg, Ref):
        return {"type": "ref", "id": arg.target}
    if isinstance(arg, ListArg):
        return {"type": "list", "items": [arg_to_jsonable(a) for a in arg.items]}
    if isinstance(arg, Typed):
        return {"type": "typed", "name": arg.name, "args": [arg_to_jsonable(a) for a in arg.args]}
    if isinstance(arg, Unset):
        return {"type": "unset"}
    if isinstance(arg, Derived):
        return {"type": "derived"}
    raise TypeError(f"not an Arg: {arg!r}")


def step_to_jsonable(step: StepFile) -> dict:
    """JSON rendering of a whole parsed file (``--dump-json``)."""
    return {
        "source_hash": step.source_hash,
        "schema": list(step.schema_names()),
        "header": [
            {"name": rec.name, "args": [arg_to_jsonable(a) for a in rec.args]}
            for rec in step.header
        ],
        "instances": [
            {
                "id": inst.id,
                "records": [
                    {"name": rec.name, "args": [arg_to_jsonable(a) for a in rec.args]}
                    for rec in inst.records
                ],
            }
            for _, inst in sorted(step.instances.items())
        ],
    }
