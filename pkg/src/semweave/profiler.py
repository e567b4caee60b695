"""Column statistics over physical rows, emitted as catalog triples.

One streaming pass per dataset computes row count, per-attribute counts,
null counts, capped distinct counts, and numeric mean/min/max where every
non-null cell parses as a number. Statistics round-trip through Turtle with
their exact decimal lexical forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, InvalidOperation, localcontext
from fractions import Fraction
from typing import Optional

from .adapters import RowSource, is_null_text
from .catalog import (
    AttributeProfile,
    AttributeStatistics,
    Catalog,
    DatasetProfile,
    DatasetStatistics,
    load_catalog,
)
from .errors import Diagnostic
from .graph import Graph
from .terms import XSD_DECIMAL, XSD_INTEGER, Iri, Literal, Triple
from .vocab import SML, STANDARD_PREFIXES

DEFAULT_DISTINCT_CAP = 10**6


def parse_number(text: str) -> Optional[Fraction]:
    """Exact rational value of a numeric cell, or None."""
    try:
        value = Decimal(text.strip())
    except (InvalidOperation, ValueError):
        return None
    if not value.is_finite():
        return None
    return Fraction(value)


def format_mean(total: Fraction, count: int) -> str:
    """Exact mean rendered with nine decimal places."""
    mean = total / count
    with localcontext() as ctx:
        ctx.prec = 60
        quotient = Decimal(mean.numerator) / Decimal(mean.denominator)
        return str(quotient.quantize(Decimal("0.000000001"), rounding=ROUND_HALF_EVEN))


class _ColumnAccumulator:
    def __init__(self, distinct_cap: int):
        self.distinct_cap = distinct_cap
        self.count = 0
        self.nulls = 0
        self.distinct: set[str] = set()
        self.distinct_capped = False
        self.numeric = True
        self.total = Fraction(0)
        self.numeric_count = 0
        self.numeric_min: Optional[tuple[Fraction, str]] = None
        self.numeric_max: Optional[tuple[Fraction, str]] = None
        self.text_min: Optional[str] = None
        self.text_max: Optional[str] = None

    def feed(self, cell: str) -> None:
        self.count += 1
        if is_null_text(cell):
            self.nulls += 1
            return
        if cell not in self.distinct:
            if len(self.distinct) < self.distinct_cap:
                self.distinct.add(cell)
            else:
                self.distinct_capped = True
        if self.text_min is None or cell < self.text_min:
            self.text_min = cell
        if self.text_max is None or cell > self.text_max:
            self.text_max = cell
        if not self.numeric:
            return
        value = parse_number(cell)
        if value is None:
            self.numeric = False
            return
        self.total += value
        self.numeric_count += 1
        if self.numeric_min is None or value < self.numeric_min[0]:
            self.numeric_min = (value, cell)
        if self.numeric_max is None or value > self.numeric_max[0]:
            self.numeric_max = (value, cell)

    def finish(self) -> AttributeStatistics:
        # A column is numeric only if every non-null cell parsed.
        is_numeric = self.numeric and self.numeric_count > 0
        if is_numeric:
            return AttributeStatistics(
                count=self.count,
                null_count=self.nulls,
                distinct_count=len(self.distinct),
                mean=format_mean(self.total, self.numeric_count),
                minimum=self.numeric_min[1],
                maximum=self.numeric_max[1],
                numeric=True,
            )
        return AttributeStatistics(
            count=self.count,
            null_count=self.nulls,
            distinct_count=len(self.distinct),
            mean=None,
            minimum=self.text_min,
            maximum=self.text_max,
            numeric=False,
        )


@dataclass(frozen=True)
class ProfileResult:
    dataset: DatasetStatistics
    attributes: tuple[tuple[AttributeProfile, AttributeStatistics], ...]
    skipped_rows: int
    diagnostics: tuple[Diagnostic, ...]


def profile_dataset(profile: DatasetProfile, source: RowSource,
                    distinct_cap: int = DEFAULT_DISTINCT_CAP) -> ProfileResult:
    """Stream the source once and compute statistics for every located column.

    Rows whose cell count does not match the declared column span are
    skipped with a per-row diagnostic; skipped rows do not enter any count.
    """
    diagnostics: list[Diagnostic] = []
    located = [a for a in profile.attributes if a.column_number is not None]
    for attr in profile.attributes:
        if attr.column_number is None:
            diagnostics.append(Diagnostic(
                "warning", "attribute has no column number; not profiled",
                str(attr.iri)))
    expected = max((a.column_number for a in located), default=-1) + 1
    accumulators = {a.column_number: _ColumnAccumulator(distinct_cap) for a in located}

    rows = 0
    skipped = 0
    for row_number, cells in enumerate(source.rows(), start=1):
        rows += 1
        if len(cells) != expected:
            skipped += 1
            diagnostics.append(Diagnostic(
                "warning",
                f"row {row_number}: expected {expected} columns, found {len(cells)}",
                str(profile.iri)))
            continue
        for column, acc in accumulators.items():
            acc.feed(cells[column])

    stats_pairs = []
    for attr in located:
        acc = accumulators[attr.column_number]
        if acc.distinct_capped:
            diagnostics.append(Diagnostic(
                "warning",
                f"distinct-value cap of {distinct_cap} reached; distinctCount is a lower bound",
                str(attr.iri)))
        stats_pairs.append((attr, acc.finish()))

    return ProfileResult(
        dataset=DatasetStatistics(number_of_instances=rows - skipped),
        attributes=tuple(stats_pairs),
        skipped_rows=skipped,
        diagnostics=tuple(diagnostics),
    )


def emit_statistics_triples(result: ProfileResult, dataset: DatasetProfile) -> Graph:
    """Statistics-only graph that merges cleanly into the source catalog."""
    def integer(n: int) -> Literal:
        return Literal(str(n), Iri(XSD_INTEGER))

    triples = [Triple(dataset.iri, SML.numberOfInstances,
                      integer(result.dataset.number_of_instances))]
    for attr, stats in result.attributes:
        triples.append(Triple(attr.iri, SML.numberOfValues, integer(stats.count)))
        triples.append(Triple(attr.iri, SML.numberOfNullValues, integer(stats.null_count)))
        triples.append(Triple(attr.iri, SML.numberOfDistinctValues,
                              integer(stats.distinct_count)))
        if stats.mean is not None:
            triples.append(Triple(attr.iri, SML.meanValue,
                                  Literal(stats.mean, Iri(XSD_DECIMAL))))
        if stats.minimum is not None:
            triples.append(Triple(attr.iri, SML.minValue,
                                  Literal(stats.minimum, Iri(XSD_DECIMAL))
                                  if stats.numeric else Literal(stats.minimum)))
        if stats.maximum is not None:
            triples.append(Triple(attr.iri, SML.maxValue,
                                  Literal(stats.maximum, Iri(XSD_DECIMAL))
                                  if stats.numeric else Literal(stats.maximum)))
    return Graph(triples, STANDARD_PREFIXES)


def annotate_catalog(catalog: Catalog, dataset: DatasetProfile,
                     result: ProfileResult) -> Catalog:
    """Catalog with the statistics merged in, reloaded from the merged graph."""
    merged = catalog.graph.union(emit_statistics_triples(result, dataset))
    annotated, _ = load_catalog(merged)
    return annotated
