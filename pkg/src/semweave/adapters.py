"""Physical row sources behind catalog access descriptors.

Adapters turn an access descriptor into an iterator of text rows and count
every physical read on a process-wide counter. The counter lets tests prove
the metadata-only guarantee: catalog, specification and schema operations
must leave it untouched, only profiling and materialization may move it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional, Protocol

from .catalog import AccessDescriptor, DatabaseAccess, TextFileAccess
from .errors import AdapterError


@dataclass
class ReadCounter:
    """Process-wide instrumentation of physical data access."""

    opens: int = 0
    rows: int = 0

    def reset(self) -> None:
        self.opens = 0
        self.rows = 0


read_counter = ReadCounter()


def is_null_text(cell: Optional[str]) -> bool:
    """Null convention for text sources: empty or ``none``, case-insensitive."""
    if cell is None:
        return True
    stripped = cell.strip()
    return stripped == "" or stripped.lower() == "none"


class RowSource(Protocol):
    def rows(self) -> Iterator[list[str]]: ...


class TextFileSource:
    """CSV reader configured from a text-file access descriptor."""

    def __init__(self, access: TextFileAccess, data_root: Path):
        if access.location is None:
            raise AdapterError(
                f"access descriptor {access.iri} has no file location")
        if access.separator is None or len(access.separator) != 1:
            raise AdapterError(
                f"access descriptor {access.iri} has no usable separator")
        self.access = access
        self.path = Path(data_root) / access.location
        if not self.path.is_file():
            raise AdapterError(f"data file not found: {self.path}")

    def rows(self) -> Iterator[list[str]]:
        read_counter.opens += 1
        with open(self.path, newline="", encoding="utf-8") as handle:
            reader = csv.reader(handle, delimiter=self.access.separator)
            if self.access.has_header:
                next(reader, None)
            for row in reader:
                read_counter.rows += 1
                yield row


def open_source(access: Optional[AccessDescriptor], data_root: Path) -> RowSource:
    """Adapter for an access descriptor; database access is declared only."""
    if access is None:
        raise AdapterError("dataset has no access descriptor")
    if isinstance(access, DatabaseAccess):
        raise AdapterError(
            "database access is a declared extension point and cannot be read")
    return TextFileSource(access, data_root)
