"""Shared exception types and the diagnostic record.

Diagnostics are data: loaders and pipelines collect them instead of failing,
so a partially broken catalog still loads and every problem is reported with
enough context to find it.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "warning" | "error" | "info"
    message: str
    subject: str | None = None  # IRI, file, row/column pointer, ...

    def __str__(self) -> str:
        where = f" [{self.subject}]" if self.subject else ""
        return f"{self.severity}: {self.message}{where}"


class SemweaveError(Exception):
    """Base class for all errors raised by this package."""


class SyntaxError_(SemweaveError):
    """Parse failure with a 1-based source position.

    Trailing underscore avoids shadowing the builtin; exported as
    ``ParseError`` alongside the concrete subclasses.
    """

    def __init__(self, message: str, line: int, column: int,
                 token: str | None = None, expected: str | None = None):
        self.line = line
        self.column = column
        self.token = token
        self.expected = expected
        detail = f"line {line}, column {column}: {message}"
        if token is not None:
            detail += f" (got {token!r})"
        if expected is not None:
            detail += f"; expected {expected}"
        super().__init__(detail)


ParseError = SyntaxError_


class TurtleSyntaxError(ParseError):
    pass


class SparqlSyntaxError(ParseError):
    pass


class UndefinedPrefixError(ParseError):
    def __init__(self, prefix: str, line: int, column: int):
        self.prefix = prefix
        super().__init__(f"undefined prefix '{prefix}:'", line, column)


class BlankNodeLimitError(SemweaveError):
    """Isomorphism check refused: too many blank nodes for backtracking."""


class CatalogError(SemweaveError):
    pass


class UnknownDatasetError(CatalogError):
    def __init__(self, iri: str):
        self.iri = iri
        super().__init__(f"unknown dataset: {iri}")


class UnknownClassError(CatalogError):
    def __init__(self, iri: str):
        self.iri = iri
        super().__init__(f"unknown domain class: {iri}")


class DomainModelError(SemweaveError):
    pass


class SpecError(SemweaveError):
    """Base for data-specification failures; carries a machine-readable code."""

    def __init__(self, code, message: str, column: str | None = None, step=None):
        self.code = code
        self.column = column
        self.step = step
        super().__init__(message)


class SpecTypeError(SpecError):
    """A step does not type-check against the schema so far."""


class SpecReferenceError(SpecError):
    """A step references a dataset or attribute the catalog does not have."""


class SpecFormatError(SpecError):
    """A stored specification document cannot be decoded."""


class AdapterError(SemweaveError):
    """Physical source could not be opened or read."""
