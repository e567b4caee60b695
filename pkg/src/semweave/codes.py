"""Stable machine-readable codes shared by the library, CLI, and service."""

from __future__ import annotations

from enum import Enum


class ViolationKind(str, Enum):
    """Catalog validation findings. Violations are data, not exceptions."""

    NO_ATTRIBUTES = "NO_ATTRIBUTES"
    MISSING_ACCESS = "MISSING_ACCESS"
    ACCESS_INCOMPLETE = "ACCESS_INCOMPLETE"
    MISSING_LOCATOR = "MISSING_LOCATOR"
    LOCATOR_MISMATCH = "LOCATOR_MISMATCH"
    UNKNOWN_DOMAIN_CLASS = "UNKNOWN_DOMAIN_CLASS"
    UNKNOWN_PROPERTY = "UNKNOWN_PROPERTY"
    PROPERTY_DOMAIN_MISMATCH = "PROPERTY_DOMAIN_MISMATCH"
    TEMPORAL_ORDER = "TEMPORAL_ORDER"


class SpecCode(str, Enum):
    """Error codes for data-specification building and loading."""

    NO_ACTIVE_LINEAGE = "NO_ACTIVE_LINEAGE"
    UNKNOWN_DATASET = "UNKNOWN_DATASET"
    UNKNOWN_COLUMN = "UNKNOWN_COLUMN"
    DUPLICATE_COLUMN = "DUPLICATE_COLUMN"
    EXTRACTOR_KIND_MISMATCH = "EXTRACTOR_KIND_MISMATCH"
    INTEGRATION_KIND_MISMATCH = "INTEGRATION_KIND_MISMATCH"
    UNKNOWN_LINEAGE = "UNKNOWN_LINEAGE"
    LINEAGE_CONSUMED = "LINEAGE_CONSUMED"
    MISSING_SEED = "MISSING_SEED"
    INVALID_PARAM = "INVALID_PARAM"
    UNKNOWN_STEP_KIND = "UNKNOWN_STEP_KIND"
    VERSION_MISMATCH = "VERSION_MISMATCH"
    MALFORMED_DOCUMENT = "MALFORMED_DOCUMENT"


class ServiceCode(str, Enum):
    """Codes the HTTP service adds on top of the specification codes."""

    NOT_FOUND = "NOT_FOUND"
    INVALID_BODY = "INVALID_BODY"
    QUERY_SYNTAX = "QUERY_SYNTAX"
    SESSION_EXISTS = "SESSION_EXISTS"
    STALE_REVISION = "STALE_REVISION"
    NOTHING_TO_UNDO = "NOTHING_TO_UNDO"
    JOB_NOT_FINISHED = "JOB_NOT_FINISHED"
    JOB_FAILED = "JOB_FAILED"


class CliCode(str, Enum):
    """Codes printed by the CLI on its machine-parsable ``code:`` line."""

    IO_NOT_FOUND = "IO_NOT_FOUND"
    SYNTAX_ERROR = "SYNTAX_ERROR"
    VALIDATION_FAILED = "VALIDATION_FAILED"
    TYPE_ERROR = "TYPE_ERROR"
    REFERENCE_ERROR = "REFERENCE_ERROR"
    UNKNOWN_DATASET = "UNKNOWN_DATASET"
    INTERNAL = "INTERNAL"


class SemanticKind(str, Enum):
    """Classification of a domain property, driving suggestions and checks."""

    TIMESTAMP = "TIMESTAMP"
    GEO_POINT = "GEO_POINT"
    GEO_POLYLINE = "GEO_POLYLINE"
    NUMBER = "NUMBER"
    CATEGORY = "CATEGORY"
    TEXT = "TEXT"
    IDENTIFIER = "IDENTIFIER"


class ExtractorKind(str, Enum):
    """Feature extractors applicable to TIMESTAMP columns."""

    WEEKDAY = "WEEKDAY"
    HOUR_OF_DAY = "HOUR_OF_DAY"


class IntegrationKind(str, Enum):
    """Dataset integration methods."""

    SPATIAL_NEAREST = "SPATIAL_NEAREST"


class SampleMethod(str, Enum):
    """Row sampling strategies."""

    HEAD = "HEAD"
    RANDOM = "RANDOM"


class AccessKind(str, Enum):
    """How a dataset's physical data is reached."""

    TEXT_FILE = "TEXT_FILE"
    DATABASE = "DATABASE"
