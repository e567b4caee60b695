"""Execute a type-checked specification against physical CSV sources.

Each lineage streams once from its source, applies its sampling, selection
and extraction steps in order, and joins meet as barriers with the polyline
side indexed in memory. Cell parse failures become nulls with diagnostics;
unmatched join rows are kept with null right-side cells (left join).

Cells are typed conservatively: a cell becomes an int or float only when
the conversion round-trips to the exact source lexical, so writing the
table back to CSV reproduces the input text.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Optional, Union

from .adapters import is_null_text, open_source
from .catalog import Catalog, DomainModel, geo_point_pair, geo_polyline_attribute
from .codes import ExtractorKind, SampleMethod, SpecCode
from .dataspec import (
    Column,
    DataSpecification,
    ExtractFeature,
    Lineage,
    SampleRows,
    SelectFeatures,
    SpecState,
    Step,
    replay,
)
from .errors import Diagnostic, SpecTypeError
from .geo import GeoPoint, nearest_segment, parse_point, parse_polyline
from .terms import Iri

Cell = Union[None, int, float, str]

NULL_TEXT = "none"

_DAY_NAMES = ("Monday", "Tuesday", "Wednesday", "Thursday",
              "Friday", "Saturday", "Sunday")


def typed_cell(text: str) -> Cell:
    """Null, int, or float when the conversion is lexically lossless; else text."""
    if is_null_text(text):
        return None
    try:
        if str(int(text)) == text:
            return int(text)
    except ValueError:
        pass
    try:
        value = float(text)
    except ValueError:
        return text
    if repr(value) == text:
        return value
    return text


def render_cell(cell: Cell) -> str:
    if cell is None:
        return NULL_TEXT
    return str(cell)


def extract_weekday(ts: str) -> str:
    """English day name of an ISO timestamp; raises ValueError on bad input."""
    return _DAY_NAMES[_parse_timestamp(ts).weekday()]


def extract_hour(ts: str) -> int:
    return _parse_timestamp(ts).hour


def _parse_timestamp(ts: str) -> datetime:
    parsed = datetime.fromisoformat(ts.strip())
    if parsed.tzinfo is not None:
        raise ValueError("timezone-aware timestamps are not supported")
    return parsed


@dataclass(frozen=True)
class Table:
    columns: tuple[Column, ...]
    rows: tuple[tuple[Cell, ...], ...]
    diagnostics: tuple[Diagnostic, ...]

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]


@dataclass
class _Row:
    cells: list[Cell]
    point: Optional[GeoPoint] = None
    polyline: Optional[list[GeoPoint]] = None


class _Execution:
    def __init__(self, state: SpecState, data_root: Path):
        self.state = state
        self.catalog: Catalog = state.catalog
        self.dm: DomainModel = state.dm
        self.data_root = Path(data_root)
        self.diagnostics: list[Diagnostic] = []
        # Datasets whose rows must carry parsed join keys.
        self.need_point: set[Iri] = set()
        self.need_polyline: set[Iri] = set()
        for lineage in state.lineages:
            if lineage.join_step is None:
                continue
            point_index = lineage.left if lineage.point_side == "left" else lineage.right
            line_index = lineage.right if lineage.point_side == "left" else lineage.left
            point_source = state.lineages[point_index].point_source
            line_source = state.lineages[line_index].polyline_source
            if point_source is not None:
                self.need_point.add(point_source)
            if line_source is not None:
                self.need_polyline.add(line_source)

    def warn(self, message: str, subject: Optional[str] = None) -> None:
        self.diagnostics.append(Diagnostic("warning", message, subject))

    # -- source reading -----------------------------------------------------

    def read_source(self, lineage: Lineage) -> list[_Row]:
        profile = self.catalog.dataset(lineage.dataset)
        source = open_source(profile.access, self.data_root)
        located = [a.column_number for a in profile.attributes
                   if a.column_number is not None]
        expected = max(located, default=-1) + 1
        subject = str(profile.iri)

        point_columns: Optional[tuple[int, int]] = None
        if profile.iri in self.need_point:
            pair = geo_point_pair(profile, self.dm)
            if pair is not None:
                point_columns = (pair[0].column_number, pair[1].column_number)
        polyline_column: Optional[int] = None
        if profile.iri in self.need_polyline:
            attr = geo_polyline_attribute(profile, self.dm)
            if attr is not None:
                polyline_column = attr.column_number

        rows: list[_Row] = []
        for row_number, cells in enumerate(source.rows(), start=1):
            if len(cells) != expected:
                self.warn(f"row {row_number}: expected {expected} columns, "
                          f"found {len(cells)}; row skipped", subject)
                continue
            row = _Row([typed_cell(cells[c.column_number])
                        for c in lineage.initial_columns])
            if point_columns is not None:
                lat_text, lon_text = cells[point_columns[0]], cells[point_columns[1]]
                if is_null_text(lat_text) or is_null_text(lon_text):
                    self.warn(f"row {row_number}: missing coordinates", subject)
                else:
                    try:
                        row.point = parse_point(lat_text, lon_text)
                    except ValueError as exc:
                        self.warn(f"row {row_number}: {exc}", subject)
            if polyline_column is not None:
                geometry = cells[polyline_column]
                if is_null_text(geometry):
                    self.warn(f"row {row_number}: missing geometry", subject)
                else:
                    try:
                        row.polyline = parse_polyline(geometry)
                    except ValueError as exc:
                        self.warn(f"row {row_number}: {exc}", subject)
            rows.append(row)
        return rows

    # -- per-lineage ops ----------------------------------------------------

    def apply_op(self, op: Step, names: list[str],
                 rows: list[_Row]) -> tuple[list[str], list[_Row]]:
        if isinstance(op, SampleRows):
            return names, self.sample(op, rows)
        if isinstance(op, SelectFeatures):
            chosen = [names.index(name) for name in op.columns]
            for row in rows:
                row.cells = [row.cells[i] for i in chosen]
            return list(op.columns), rows
        if isinstance(op, ExtractFeature):
            return self.extract(op, names, rows)
        raise AssertionError(f"unexpected lineage op {op!r}")

    def sample(self, op: SampleRows, rows: list[_Row]) -> list[_Row]:
        if op.method == SampleMethod.HEAD:
            return rows[:op.count]
        # Seeded reservoir keeps a uniform subset; original order restored.
        rng = random.Random(op.seed)
        reservoir: list[tuple[int, _Row]] = []
        for index, row in enumerate(rows):
            if index < op.count:
                reservoir.append((index, row))
            else:
                slot = rng.randrange(index + 1)
                if slot < op.count:
                    reservoir[slot] = (index, row)
        reservoir.sort(key=lambda pair: pair[0])
        return [row for _, row in reservoir]

    def extract(self, op: ExtractFeature, names: list[str],
                rows: list[_Row]) -> tuple[list[str], list[_Row]]:
        source_index = names.index(op.column)
        extractor = (extract_weekday if op.extractor == ExtractorKind.WEEKDAY
                     else extract_hour)
        for row_number, row in enumerate(rows, start=1):
            cell = row.cells[source_index]
            if cell is None:
                row.cells.append(None)
                continue
            try:
                row.cells.append(extractor(str(cell)))
            except ValueError:
                self.warn(f"row {row_number}: could not parse timestamp "
                          f"{cell!r}", op.column)
                row.cells.append(None)
        return names + [op.output_name()], rows

    # -- join ---------------------------------------------------------------

    def join(self, lineage: Lineage, left_rows: list[_Row],
             right_rows: list[_Row]) -> list[_Row]:
        step = lineage.join_step
        if lineage.point_side == "left":
            drivers, partners = left_rows, right_rows
            driver_first = True
        else:
            drivers, partners = right_rows, left_rows
            driver_first = False
        partner_width = len(partners[0].cells) if partners else len(
            self.state.lineages[
                lineage.right if driver_first else lineage.left].columns)

        candidates = [(i, row.polyline) for i, row in enumerate(partners)
                      if row.polyline is not None]
        if not candidates and partners:
            self.warn("no usable polyline geometries on the polyline side")

        out: list[_Row] = []
        unmatched = 0
        for row_number, driver in enumerate(drivers, start=1):
            match: Optional[_Row] = None
            if driver.point is not None and candidates:
                found = nearest_segment(driver.point,
                                        [poly for _, poly in candidates],
                                        step.max_distance_meters)
                if found is not None:
                    match = partners[candidates[found[0]][0]]
            if match is None:
                unmatched += 1
                partner_cells: list[Cell] = [None] * partner_width
            else:
                partner_cells = list(match.cells)
            cells = (driver.cells + partner_cells if driver_first
                     else partner_cells + driver.cells)
            out.append(_Row(list(cells), point=driver.point))
        if unmatched:
            self.warn(f"{unmatched} row(s) had no segment within "
                      f"{step.max_distance_meters} m; kept with nulls")
        return out

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, index: int) -> list[_Row]:
        lineage = self.state.lineages[index]
        if lineage.dataset is not None:
            rows = self.read_source(lineage)
        else:
            left_rows = self.evaluate(lineage.left)
            right_rows = self.evaluate(lineage.right)
            rows = self.join(lineage, left_rows, right_rows)
        names = [c.name for c in lineage.initial_columns]
        for op in lineage.ops:
            names, rows = self.apply_op(op, names, rows)
        assert names == [c.name for c in lineage.columns]
        return rows


def materialize(spec: DataSpecification, catalog: Catalog, dm: DomainModel,
                data_root: Union[str, Path]) -> Table:
    """Run the specification; deterministic for fixed inputs and seeds."""
    state = replay(spec, catalog, dm)
    if state.current is None:
        raise SpecTypeError(SpecCode.NO_ACTIVE_LINEAGE,
                            "empty specification cannot be materialized")
    execution = _Execution(state, Path(data_root))
    rows = execution.evaluate(state.current)
    columns = state.lineages[state.current].columns
    table_rows = tuple(tuple(row.cells) for row in rows)
    for row in table_rows:
        assert len(row) == len(columns)
    return Table(columns=columns, rows=table_rows,
                 diagnostics=tuple(execution.diagnostics))


def write_csv(table: Table, separator: str = ",") -> str:
    """Render the table as CSV text: header from schema, nulls as ``none``."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, delimiter=separator, quoting=csv.QUOTE_MINIMAL)
    writer.writerow(table.column_names)
    for row in table.rows:
        writer.writerow([render_cell(cell) for cell in row])
    return buffer.getvalue()
