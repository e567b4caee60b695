"""Metadata-level data specifications: steps, type checking, schema inference.

A specification is an ordered list of steps over catalog metadata. Steps
open dataset lineages, narrow or extend their schemas, and join lineages;
every step type-checks against the schema inferred so far using the
semantic kinds of the mapped domain properties. Nothing here ever touches
physical data.

Specifications are values: adding a step returns a new specification. The
persistence format is line-oriented JSON with a versioned header carrying
the catalog IRI and content digest.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, replace
from typing import Optional, Union

from .catalog import (
    Catalog,
    DatasetProfile,
    DomainModel,
    geo_point_pair,
    geo_polyline_attribute,
)
from .codes import ExtractorKind, IntegrationKind, SampleMethod, SemanticKind, SpecCode
from .errors import (
    Diagnostic,
    SpecError,
    SpecFormatError,
    SpecReferenceError,
    SpecTypeError,
)
from .terms import Iri

DOCUMENT_FORMAT = "semweave-spec"
DOCUMENT_VERSION = 1

_SEED_MIN = -(2**63)
_SEED_MAX = 2**63 - 1


# ---------------------------------------------------------------------------
# Steps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SelectDataset:
    dataset: Iri


@dataclass(frozen=True)
class SampleRows:
    method: SampleMethod
    count: int
    seed: Optional[int] = None


@dataclass(frozen=True)
class SelectFeatures:
    columns: tuple[str, ...]


@dataclass(frozen=True)
class ExtractFeature:
    column: str
    extractor: ExtractorKind
    new_name: Optional[str] = None

    def __post_init__(self):
        # Canonicalize so save/load round-trips compare equal.
        if self.new_name is None:
            suffix = "day" if self.extractor == ExtractorKind.WEEKDAY else "hour"
            object.__setattr__(self, "new_name", f"{self.column} ({suffix})")

    def output_name(self) -> str:
        assert self.new_name is not None
        return self.new_name


@dataclass(frozen=True)
class IntegrateDatasets:
    left: int
    right: int
    kind: IntegrationKind = IntegrationKind.SPATIAL_NEAREST
    max_distance_meters: float = 50.0


Step = Union[SelectDataset, SampleRows, SelectFeatures, ExtractFeature, IntegrateDatasets]


@dataclass(frozen=True)
class Column:
    """One output column with its semantic provenance."""

    name: str
    kind: Optional[SemanticKind]
    mapped_property: Optional[Iri]
    mapped_domain: Optional[Iri]
    source_step: int
    source_dataset: Optional[Iri]
    column_number: Optional[int] = None
    extractor: Optional[ExtractorKind] = None
    source_column: Optional[str] = None


ResultSchema = tuple[Column, ...]


@dataclass(frozen=True)
class DataSpecification:
    id: str
    catalog_iri: Optional[str]
    catalog_digest: Optional[str]
    steps: tuple[Step, ...] = ()


# ---------------------------------------------------------------------------
# Lineage state (replayed, never stored)
# ---------------------------------------------------------------------------

@dataclass
class Lineage:
    index: int
    dataset: Optional[Iri]  # source lineages only
    columns: tuple[Column, ...]
    # Schema at lineage creation, before any ops; the materializer replays
    # ops against it to track cell positions.
    initial_columns: tuple[Column, ...] = ()
    ops: tuple[Step, ...] = ()
    consumed: bool = False
    # Join topology for merged lineages.
    left: Optional[int] = None
    right: Optional[int] = None
    join_step: Optional[IntegrateDatasets] = None
    point_side: Optional[str] = None  # "left" | "right"
    # Datasets providing spatial join keys, inherited through merges.
    point_source: Optional[Iri] = None
    polyline_source: Optional[Iri] = None


class SpecState:
    """Lineages and current schema derived by replaying a step list."""

    def __init__(self, catalog: Catalog, dm: DomainModel):
        self.catalog = catalog
        self.dm = dm
        self.lineages: list[Lineage] = []
        self.current: Optional[int] = None

    # -- helpers ------------------------------------------------------------

    def schema(self) -> ResultSchema:
        if self.current is None:
            return ()
        return self.lineages[self.current].columns

    def _require_current(self, step: Step) -> Lineage:
        if self.current is None:
            raise SpecTypeError(
                SpecCode.NO_ACTIVE_LINEAGE,
                "no dataset selected yet; start with a dataset selection",
                step=step)
        return self.lineages[self.current]

    def _columns_for(self, profile: DatasetProfile, step_index: int,
                     step: Step) -> tuple[Column, ...]:
        columns = []
        seen: set[str] = set()
        for attr in profile.attributes:
            if attr.mapping is None:
                continue
            if attr.identifier in seen:
                raise SpecTypeError(
                    SpecCode.DUPLICATE_COLUMN,
                    f"dataset {profile.iri.value} has two attributes named "
                    f"{attr.identifier!r}",
                    column=attr.identifier, step=step)
            seen.add(attr.identifier)
            prop = self.dm.properties.get(attr.mapping.property)
            columns.append(Column(
                name=attr.identifier,
                kind=prop.kind if prop is not None else None,
                mapped_property=attr.mapping.property,
                mapped_domain=attr.mapping.domain_class,
                source_step=step_index,
                source_dataset=profile.iri,
                column_number=attr.column_number,
            ))
        return tuple(columns)

    # -- step application ---------------------------------------------------

    def apply(self, step: Step, step_index: int) -> None:
        try:
            if isinstance(step, SelectDataset):
                self._apply_select_dataset(step, step_index)
            elif isinstance(step, SampleRows):
                self._apply_sample(step)
            elif isinstance(step, SelectFeatures):
                self._apply_select_features(step)
            elif isinstance(step, ExtractFeature):
                self._apply_extract(step, step_index)
            elif isinstance(step, IntegrateDatasets):
                self._apply_integrate(step, step_index)
            else:
                raise SpecFormatError(
                    SpecCode.UNKNOWN_STEP_KIND,
                    f"unknown step kind {type(step).__name__!r}", step=step)
        except SpecError as exc:
            # Report the position, not the step object, so errors serialize
            # and compare cleanly.
            exc.step = step_index
            raise

    def _apply_select_dataset(self, step: SelectDataset, step_index: int) -> None:
        profile = self.catalog.dataset_or_none(step.dataset)
        if profile is None:
            raise SpecReferenceError(
                SpecCode.UNKNOWN_DATASET,
                f"unknown dataset: {step.dataset.value}", step=step)
        pair = geo_point_pair(profile, self.dm)
        line = geo_polyline_attribute(profile, self.dm)
        columns = self._columns_for(profile, step_index, step)
        lineage = Lineage(
            index=len(self.lineages),
            dataset=profile.iri,
            columns=columns,
            initial_columns=columns,
            point_source=profile.iri if pair is not None else None,
            polyline_source=profile.iri if line is not None else None,
        )
        self.lineages.append(lineage)
        self.current = lineage.index

    def _apply_sample(self, step: SampleRows) -> None:
        lineage = self._require_current(step)
        if step.count < 1:
            raise SpecTypeError(
                SpecCode.INVALID_PARAM,
                f"sample size must be at least 1, got {step.count}", step=step)
        if step.method == SampleMethod.RANDOM:
            if step.seed is None:
                raise SpecTypeError(
                    SpecCode.MISSING_SEED,
                    "random sampling requires a seed", step=step)
            if not (_SEED_MIN <= step.seed <= _SEED_MAX):
                raise SpecTypeError(
                    SpecCode.INVALID_PARAM,
                    "seed must fit in a signed 64-bit integer", step=step)
        lineage.ops = lineage.ops + (step,)

    def _apply_select_features(self, step: SelectFeatures) -> None:
        lineage = self._require_current(step)
        if not step.columns:
            raise SpecTypeError(
                SpecCode.INVALID_PARAM, "no columns selected", step=step)
        by_name = {c.name: c for c in lineage.columns}
        selected = []
        seen: set[str] = set()
        for name in step.columns:
            if name in seen:
                raise SpecTypeError(
                    SpecCode.DUPLICATE_COLUMN,
                    f"column {name!r} selected twice", column=name, step=step)
            seen.add(name)
            if name not in by_name:
                raise SpecTypeError(
                    SpecCode.UNKNOWN_COLUMN,
                    f"column {name!r} is not in the current schema",
                    column=name, step=step)
            selected.append(by_name[name])
        lineage.columns = tuple(selected)
        lineage.ops = lineage.ops + (step,)

    def _apply_extract(self, step: ExtractFeature, step_index: int) -> None:
        lineage = self._require_current(step)
        by_name = {c.name: c for c in lineage.columns}
        source = by_name.get(step.column)
        if source is None:
            raise SpecTypeError(
                SpecCode.UNKNOWN_COLUMN,
                f"column {step.column!r} is not in the current schema",
                column=step.column, step=step)
        if source.kind != SemanticKind.TIMESTAMP:
            raise SpecTypeError(
                SpecCode.EXTRACTOR_KIND_MISMATCH,
                f"extractor {step.extractor.value} needs a TIMESTAMP column; "
                f"{step.column!r} is {source.kind.value if source.kind else 'unmapped'}",
                column=step.column, step=step)
        name = step.output_name()
        if name in by_name:
            raise SpecTypeError(
                SpecCode.DUPLICATE_COLUMN,
                f"column {name!r} already exists", column=name, step=step)
        kind = (SemanticKind.CATEGORY if step.extractor == ExtractorKind.WEEKDAY
                else SemanticKind.NUMBER)
        lineage.columns = lineage.columns + (Column(
            name=name,
            kind=kind,
            mapped_property=None,
            mapped_domain=None,
            source_step=step_index,
            source_dataset=source.source_dataset,
            extractor=step.extractor,
            source_column=step.column,
        ),)
        lineage.ops = lineage.ops + (step,)

    def _apply_integrate(self, step: IntegrateDatasets, step_index: int) -> None:
        for index in (step.left, step.right):
            if not (0 <= index < len(self.lineages)):
                raise SpecTypeError(
                    SpecCode.UNKNOWN_LINEAGE,
                    f"lineage {index} does not exist", step=step)
        if step.left == step.right:
            raise SpecTypeError(
                SpecCode.INVALID_PARAM,
                "integration needs two different lineages", step=step)
        left = self.lineages[step.left]
        right = self.lineages[step.right]
        for lineage in (left, right):
            if lineage.consumed:
                raise SpecTypeError(
                    SpecCode.LINEAGE_CONSUMED,
                    f"lineage {lineage.index} was already integrated", step=step)
        if step.max_distance_meters <= 0:
            raise SpecTypeError(
                SpecCode.INVALID_PARAM,
                f"maxDistanceMeters must be positive, got {step.max_distance_meters}",
                step=step)

        if left.point_source is not None and right.polyline_source is not None:
            point_side = "left"
        elif right.point_source is not None and left.polyline_source is not None:
            point_side = "right"
        else:
            raise SpecTypeError(
                SpecCode.INTEGRATION_KIND_MISMATCH,
                "spatial nearest join needs a latitude/longitude pair on one "
                "side and a polyline geometry on the other", step=step)

        columns = _merge_columns(left.columns, right.columns, step)
        point = left if point_side == "left" else right
        merged = Lineage(
            index=len(self.lineages),
            dataset=None,
            columns=columns,
            initial_columns=columns,
            left=step.left,
            right=step.right,
            join_step=step,
            point_side=point_side,
            point_source=point.point_source,
            polyline_source=None,
        )
        left.consumed = True
        right.consumed = True
        self.lineages.append(merged)
        self.current = merged.index


def _merge_columns(left: tuple[Column, ...], right: tuple[Column, ...],
                   step: IntegrateDatasets) -> tuple[Column, ...]:
    """Concatenate blocks, source-qualifying names that appear on both sides."""
    left_names = {c.name for c in left}
    right_names = {c.name for c in right}
    colliding = left_names & right_names

    def resolve(column: Column) -> Column:
        if column.name not in colliding:
            return column
        if column.source_dataset is None:
            raise SpecTypeError(
                SpecCode.DUPLICATE_COLUMN,
                f"cannot disambiguate column {column.name!r}",
                column=column.name, step=step)
        qualified = f"{column.source_dataset.local_name()}.{column.name}"
        return replace(column, name=qualified)

    merged = [resolve(c) for c in left] + [resolve(c) for c in right]
    seen: set[str] = set()
    for column in merged:
        if column.name in seen:
            raise SpecTypeError(
                SpecCode.DUPLICATE_COLUMN,
                f"column {column.name!r} is ambiguous even after source "
                f"qualification", column=column.name, step=step)
        seen.add(column.name)
    return tuple(merged)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def new_spec(catalog: Catalog, spec_id: Optional[str] = None) -> DataSpecification:
    from .catalog import catalog_digest

    return DataSpecification(
        id=spec_id if spec_id is not None else uuid.uuid4().hex,
        catalog_iri=catalog.iri.value if catalog.iri is not None else None,
        catalog_digest=catalog_digest(catalog),
    )


def replay(spec: DataSpecification, catalog: Catalog, dm: DomainModel) -> SpecState:
    """Validate all steps in order and return the resulting lineage state."""
    state = SpecState(catalog, dm)
    for index, step in enumerate(spec.steps):
        state.apply(step, index)
    return state


def add_step(spec: DataSpecification, step: Step, catalog: Catalog,
             dm: DomainModel) -> tuple[DataSpecification, ResultSchema]:
    """Extended specification plus the schema after the new step.

    Raises and leaves the input untouched when the step does not type-check.
    """
    extended = replace(spec, steps=spec.steps + (step,))
    state = replay(extended, catalog, dm)
    return extended, state.schema()


def infer_schema(spec: DataSpecification, catalog: Catalog,
                 dm: DomainModel) -> ResultSchema:
    return replay(spec, catalog, dm).schema()


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def step_to_json(step: Step) -> dict:
    if isinstance(step, SelectDataset):
        return {"step": "selectDataset", "dataset": step.dataset.value}
    if isinstance(step, SampleRows):
        body: dict = {"step": "sampleRows", "method": step.method.value,
                      "count": step.count}
        if step.seed is not None:
            body["seed"] = step.seed
        return body
    if isinstance(step, SelectFeatures):
        return {"step": "selectFeatures", "columns": list(step.columns)}
    if isinstance(step, ExtractFeature):
        return {"step": "extractFeature", "column": step.column,
                "extractor": step.extractor.value, "newName": step.output_name()}
    if isinstance(step, IntegrateDatasets):
        return {"step": "integrateDatasets", "left": step.left, "right": step.right,
                "kind": step.kind.value,
                "maxDistanceMeters": step.max_distance_meters}
    raise SpecFormatError(SpecCode.UNKNOWN_STEP_KIND,
                          f"unknown step kind {type(step).__name__!r}", step=step)


def _require(body: dict, key: str, kinds: tuple[type, ...], context: str):
    value = body.get(key)
    if not isinstance(value, kinds) or isinstance(value, bool):
        raise SpecFormatError(
            SpecCode.MALFORMED_DOCUMENT,
            f"{context}: field {key!r} is missing or has the wrong type")
    return value


def step_from_json(body: dict) -> Step:
    kind = body.get("step")
    if not isinstance(kind, str):
        raise SpecFormatError(SpecCode.MALFORMED_DOCUMENT,
                              "step object has no 'step' field")
    context = f"step {kind!r}"
    if kind == "selectDataset":
        return SelectDataset(Iri(_require(body, "dataset", (str,), context)))
    if kind == "sampleRows":
        method_text = _require(body, "method", (str,), context)
        try:
            method = SampleMethod(method_text)
        except ValueError:
            raise SpecFormatError(
                SpecCode.MALFORMED_DOCUMENT,
                f"{context}: unknown sampling method {method_text!r}") from None
        seed = body.get("seed")
        if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
            raise SpecFormatError(SpecCode.MALFORMED_DOCUMENT,
                                  f"{context}: seed must be an integer")
        return SampleRows(method, _require(body, "count", (int,), context), seed)
    if kind == "selectFeatures":
        columns = _require(body, "columns", (list,), context)
        if not all(isinstance(c, str) for c in columns):
            raise SpecFormatError(SpecCode.MALFORMED_DOCUMENT,
                                  f"{context}: columns must be strings")
        return SelectFeatures(tuple(columns))
    if kind == "extractFeature":
        extractor_text = _require(body, "extractor", (str,), context)
        try:
            extractor = ExtractorKind(extractor_text)
        except ValueError:
            raise SpecFormatError(
                SpecCode.MALFORMED_DOCUMENT,
                f"{context}: unknown extractor {extractor_text!r}") from None
        new_name = body.get("newName")
        if new_name is not None and not isinstance(new_name, str):
            raise SpecFormatError(SpecCode.MALFORMED_DOCUMENT,
                                  f"{context}: newName must be a string")
        return ExtractFeature(_require(body, "column", (str,), context),
                              extractor, new_name)
    if kind == "integrateDatasets":
        join_text = body.get("kind", IntegrationKind.SPATIAL_NEAREST.value)
        if not isinstance(join_text, str):
            raise SpecFormatError(SpecCode.MALFORMED_DOCUMENT,
                                  f"{context}: kind must be a string")
        try:
            join_kind = IntegrationKind(join_text)
        except ValueError:
            raise SpecFormatError(
                SpecCode.MALFORMED_DOCUMENT,
                f"{context}: unknown integration kind {join_text!r}") from None
        distance = body.get("maxDistanceMeters", 50.0)
        if isinstance(distance, bool) or not isinstance(distance, (int, float)):
            raise SpecFormatError(SpecCode.MALFORMED_DOCUMENT,
                                  f"{context}: maxDistanceMeters must be a number")
        return IntegrateDatasets(
            _require(body, "left", (int,), context),
            _require(body, "right", (int,), context),
            join_kind, float(distance))
    raise SpecFormatError(SpecCode.UNKNOWN_STEP_KIND,
                          f"unknown step kind {kind!r}")


def save_spec(spec: DataSpecification) -> str:
    header = {
        "format": DOCUMENT_FORMAT,
        "version": DOCUMENT_VERSION,
        "id": spec.id,
        "catalog": spec.catalog_iri,
        "catalogDigest": spec.catalog_digest,
    }
    lines = [json.dumps(header, sort_keys=True)]
    lines.extend(json.dumps(step_to_json(step), sort_keys=True)
                 for step in spec.steps)
    return "\n".join(lines) + "\n"


def load_spec(document: str, catalog: Catalog,
              dm: DomainModel) -> tuple[DataSpecification, list[Diagnostic]]:
    """Parse and fully revalidate a stored specification document.

    Catalog drift (digest mismatch) is reported as a warning; structural
    problems raise SpecFormatError, invalid steps raise their usual errors.
    """
    from .catalog import catalog_digest

    lines = [line for line in document.splitlines() if line.strip()]
    if not lines:
        raise SpecFormatError(SpecCode.MALFORMED_DOCUMENT, "document is empty")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise SpecFormatError(SpecCode.MALFORMED_DOCUMENT,
                              f"header is not valid JSON: {exc}") from None
    if not isinstance(header, dict) or header.get("format") != DOCUMENT_FORMAT:
        raise SpecFormatError(SpecCode.MALFORMED_DOCUMENT,
                              "missing or unrecognized document format marker")
    version = header.get("version")
    if version != DOCUMENT_VERSION:
        raise SpecFormatError(
            SpecCode.VERSION_MISMATCH,
            f"unsupported document version {version!r}; expected {DOCUMENT_VERSION}")

    steps = []
    for number, line in enumerate(lines[1:], start=2):
        try:
            body = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SpecFormatError(
                SpecCode.MALFORMED_DOCUMENT,
                f"line {number} is not valid JSON: {exc}") from None
        if not isinstance(body, dict):
            raise SpecFormatError(SpecCode.MALFORMED_DOCUMENT,
                                  f"line {number} is not a JSON object")
        steps.append(step_from_json(body))

    spec_id = header.get("id")
    spec = DataSpecification(
        id=spec_id if isinstance(spec_id, str) and spec_id else uuid.uuid4().hex,
        catalog_iri=header.get("catalog"),
        catalog_digest=header.get("catalogDigest"),
        steps=tuple(steps),
    )

    diagnostics: list[Diagnostic] = []
    current_iri = catalog.iri.value if catalog.iri is not None else None
    if spec.catalog_iri is not None and spec.catalog_iri != current_iri:
        diagnostics.append(Diagnostic(
            "warning",
            f"specification was created for catalog {spec.catalog_iri}, "
            f"loaded against {current_iri}"))
    if spec.catalog_digest is not None and spec.catalog_digest != catalog_digest(catalog):
        diagnostics.append(Diagnostic(
            "warning",
            "catalog content digest does not match; the specification may "
            "predate catalog changes"))

    replay(spec, catalog, dm)
    return spec, diagnostics
