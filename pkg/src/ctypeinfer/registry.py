"""Catalog of API methods whose arguments carry a conceptual type."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Union

from .resolve import DescriptorError, MethodId


class CType(enum.Enum):
    """Conceptual type labels; declaration order is the canonical tie-break order."""

    PATH = ("PATH", "String", "Path name")
    URL = ("URL", "String", "URL/URI")
    SQL = ("SQL", "String", "SQL statement")
    HOST = ("HOST", "String", "Host name")
    PORT = ("PORT", "int", "Port number")
    XCOORD = ("XCOORD", "int", "X coordinate")
    YCOORD = ("YCOORD", "int", "Y coordinate")
    WIDTH = ("WIDTH", "int", "Width")
    HEIGHT = ("HEIGHT", "int", "Height")
    YEAR = ("YEAR", "int", "Year")
    MONTH = ("MONTH", "int", "Month")
    DAY = ("DAY", "int", "Day of month")
    OTHER = ("OTHER", "any", "Unmapped argument of a matched call")

    def __init__(self, label, carrier, description):
        self.label = label
        self.carrier = carrier
        self.description = description

    def __str__(self):
        return self.label

    @property
    def index(self) -> int:
        return LABEL_ORDER.index(self)

    @classmethod
    def parse(cls, text: str) -> "CType":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown c-type {text!r}") from None


LABEL_ORDER: tuple[CType, ...] = tuple(CType)
CTYPES: tuple[CType, ...] = tuple(c for c in CType if c is not CType.OTHER)


class FormatError(ValueError):
    def __init__(self, msg: str, line: int = 0):
        super().__init__(f"line {line}: {msg}" if line else msg)
        self.line = line


class DuplicateEntry(FormatError):
    pass


@dataclass(frozen=True)
class RegistryEntry:
    method: MethodId
    arg_ctypes: Mapping[int, CType]

    def __post_init__(self):
        if not self.arg_ctypes:
            raise ValueError(f"{self.method}: no mapped argument")
        arity = self.method.arity
        for pos, ctype in self.arg_ctypes.items():
            if not 0 <= pos < arity:
                raise ValueError(f"{self.method}: position {pos} out of range for arity {arity}")
            if ctype is CType.OTHER:
                raise ValueError(f"{self.method}: OTHER cannot be mapped explicitly")
        object.__setattr__(self, "arg_ctypes",
                           MappingProxyType(dict(sorted(self.arg_ctypes.items()))))

    def label_for(self, pos: int) -> CType:
        return self.arg_ctypes.get(pos, CType.OTHER)

    def to_line(self) -> str:
        cols = " ".join(f"{p}={c.label}" for p, c in self.arg_ctypes.items())
        return f"{self.method} {cols}"

    def __hash__(self):
        return hash((self.method, tuple(self.arg_ctypes.items())))

    def __eq__(self, other):
        if not isinstance(other, RegistryEntry):
            return NotImplemented
        return self.method == other.method and dict(self.arg_ctypes) == dict(other.arg_ctypes)


class Registry(Mapping[MethodId, RegistryEntry]):
    """Immutable MethodId -> RegistryEntry map."""

    def __init__(self, entries: Iterable[RegistryEntry] = ()):
        table: dict[MethodId, RegistryEntry] = {}
        for entry in entries:
            if entry.method in table:
                raise DuplicateEntry(f"duplicate method {entry.method}")
            table[entry.method] = entry
        self._table = table

    def __getitem__(self, key: MethodId) -> RegistryEntry:
        return self._table[key]

    def __iter__(self):
        return iter(sorted(self._table, key=str))

    def __len__(self):
        return len(self._table)

    def entries(self) -> list[RegistryEntry]:
        return [self._table[m] for m in self]

    def lookup(self, candidates: Iterable[MethodId]) -> Optional[RegistryEntry]:
        return lookup(self, candidates)

    def ctype_counts(self) -> dict[CType, int]:
        """Mapped argument positions per c-type."""
        counts = {c: 0 for c in CTYPES}
        for entry in self._table.values():
            for ctype in entry.arg_ctypes.values():
                counts[ctype] += 1
        return counts

    def dump(self) -> str:
        lines = ["# <MethodId> <pos>=<CTYPE> [<pos>=<CTYPE> ...]"]
        lines += [e.to_line() for e in self.entries()]
        return "\n".join(lines) + "\n"


RegistrySource = Union[str, Path, None]

BUNDLED_REGISTRY = "registry.txt"
BUNDLED_SIGNATURES = "jdk_signatures.txt"


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("ctypeinfer") / "data" / name))


def parse_registry(text: str) -> Registry:
    entries = []
    seen: dict[MethodId, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *cols = line.split()
        try:
            method = MethodId.parse(head)
        except DescriptorError as exc:
            raise FormatError(str(exc), lineno) from None
        if not cols:
            raise FormatError(f"{head}: no argument mapping", lineno)
        mapping: dict[int, CType] = {}
        for col in cols:
            pos_text, sep, label = col.partition("=")
            if not sep or not pos_text.isdigit():
                raise FormatError(f"bad column {col!r}", lineno)
            try:
                ctype = CType.parse(label)
            except ValueError as exc:
                raise FormatError(str(exc), lineno) from None
            pos = int(pos_text)
            if pos in mapping:
                raise FormatError(f"position {pos} mapped twice", lineno)
            mapping[pos] = ctype
        try:
            entry = RegistryEntry(method, mapping)
        except ValueError as exc:
            raise FormatError(str(exc), lineno) from None
        if method in seen:
            raise DuplicateEntry(f"{method} already defined on line {seen[method]}", lineno)
        seen[method] = lineno
        entries.append(entry)
    return Registry(entries)


def load_registry(path: RegistrySource = None) -> Registry:
    """Load a registry file; ``None`` loads the bundled one."""
    path = bundled_path(BUNDLED_REGISTRY) if path is None else Path(path)
    return parse_registry(path.read_text(encoding="utf-8"))


def lookup(registry: Mapping[MethodId, RegistryEntry],
           candidates: Iterable[MethodId]) -> Optional[RegistryEntry]:
    """Registered candidate with the smallest MethodId text, if any."""
    hits = sorted((m for m in candidates if m in registry), key=str)
    return registry[hits[0]] if hits else None
