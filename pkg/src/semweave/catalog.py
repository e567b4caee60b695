"""Typed catalog layer over RDF graphs.

Loads dcat:Catalog graphs into dataset profiles with attributes, access
descriptors and domain mappings, loads domain models with their subclass
hierarchy, validates catalogs against domain models, and computes the
system suggestions (timestamp extractors, spatial joins).

Vocabulary notes: class and property names follow the catalog schema
(``dcat:Dataset``, ``sml:hasAttribute``, ``sml:columnNumber``,
``sml:hasMapping``). A few terms are artifact-defined extensions and
documented as such: ``sml:semanticKind`` on domain properties,
``sml:fileLocation`` / ``csvw:header`` on text-file access descriptors,
``sml:connection`` / ``sml:table`` / ``sml:columnName`` for the declared
database extension point, and the statistics terms besides
``sml:meanValue``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .codes import AccessKind, ExtractorKind, IntegrationKind, SemanticKind, ViolationKind
from .errors import (
    Diagnostic,
    DomainModelError,
    UnknownClassError,
    UnknownDatasetError,
)
from .graph import Graph
from .terms import (
    XSD,
    XSD_BOOLEAN,
    XSD_DATE,
    XSD_DATETIME,
    XSD_INTEGER,
    BlankNode,
    Iri,
    Literal,
    Triple,
)
from .vocab import CSVW, DCAT, DCTERMS, RDF, RDFS, SML, SO, STANDARD_PREFIXES

_NUMERIC_DATATYPES = {XSD + "integer", XSD + "decimal", XSD + "double", XSD + "float"}

# Range datatypes each semantic kind accepts; kinds absent here are free.
_KIND_RANGES = {
    SemanticKind.TIMESTAMP: {XSD_DATETIME},
    SemanticKind.GEO_POINT: _NUMERIC_DATATYPES,
    SemanticKind.NUMBER: _NUMERIC_DATATYPES,
    SemanticKind.GEO_POLYLINE: {XSD + "string"},
}


# ---------------------------------------------------------------------------
# Domain model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DomainClass:
    iri: Iri
    label: Optional[str] = None
    parent: Optional[Iri] = None


@dataclass(frozen=True)
class DomainProperty:
    iri: Iri
    domain: Iri
    range: Iri
    kind: SemanticKind
    label: Optional[str] = None


class DomainModel:
    """Immutable set of domain classes and properties with subclass closure."""

    def __init__(self, classes: Iterable[DomainClass], properties: Iterable[DomainProperty]):
        self.classes: dict[Iri, DomainClass] = {c.iri: c for c in classes}
        self.properties: dict[Iri, DomainProperty] = {p.iri: p for p in properties}

    def __contains__(self, iri: Iri) -> bool:
        return iri in self.classes

    def ancestors(self, iri: Iri) -> list[Iri]:
        """Proper ancestors from parent upward; excludes ``iri`` itself."""
        out: list[Iri] = []
        cls = self.classes.get(iri)
        while cls is not None and cls.parent is not None:
            out.append(cls.parent)
            cls = self.classes.get(cls.parent)
        return out

    def is_subclass(self, sub: Iri, sup: Iri) -> bool:
        """Reflexive-transitive subclass test within the model."""
        return sub == sup or sup in self.ancestors(sub)

    def properties_of(self, cls: Iri) -> list[DomainProperty]:
        """Properties whose domain is ``cls`` or an ancestor of it."""
        return sorted(
            (p for p in self.properties.values() if self.is_subclass(cls, p.domain)),
            key=lambda p: p.iri.value,
        )


def load_domain_model(g: Graph) -> DomainModel:
    """Build a DomainModel from Turtle triples.

    Domain classes are subjects whose ``rdfs:subClassOf`` chain reaches
    ``sml:DomainClass``, or subjects typed ``sml:DomainClass`` directly.
    Raises DomainModelError on subclass cycles, unresolvable domains or
    ranges, and missing or inconsistent ``sml:semanticKind`` annotations.
    """
    parents: dict[Iri, Iri] = {}
    for t in g.match(None, RDFS.subClassOf, None):
        if isinstance(t.subject, Iri) and isinstance(t.object, Iri):
            # First parent in canonical order wins if several are declared.
            parents.setdefault(t.subject, t.object)

    root = SML.DomainClass

    def reaches_root(iri: Iri) -> bool:
        seen: set[Iri] = set()
        node = iri
        while node in parents:
            if node in seen:
                raise DomainModelError(f"subclass cycle involving {node.value}")
            seen.add(node)
            node = parents[node]
            if node == root:
                return True
        return node == root and iri != root

    class_iris = {iri for iri in parents if reaches_root(iri)}
    for t in g.match(None, RDF.type, root):
        if isinstance(t.subject, Iri):
            class_iris.add(t.subject)

    def text(subject, predicate) -> Optional[str]:
        value = g.value(subject, predicate)
        return value.lexical if isinstance(value, Literal) else None

    classes = [
        DomainClass(iri, label=text(iri, RDFS.label), parent=parents.get(iri))
        for iri in sorted(class_iris, key=lambda i: i.value)
    ]
    known = set(class_iris)

    properties = []
    for t in g.match(None, RDF.type, RDF.Property):
        prop = t.subject
        if not isinstance(prop, Iri):
            continue
        domain = g.value(prop, RDFS.domain)
        rng = g.value(prop, RDFS.range)
        if not isinstance(domain, Iri) or domain not in known:
            raise DomainModelError(
                f"property {prop.value} has no resolvable rdfs:domain")
        if not isinstance(rng, Iri) or (rng not in known and not rng.value.startswith(XSD)):
            raise DomainModelError(
                f"property {prop.value} has no resolvable rdfs:range")
        kind_text = text(prop, SML.semanticKind)
        if kind_text is None:
            raise DomainModelError(
                f"property {prop.value} is missing sml:semanticKind")
        try:
            kind = SemanticKind(kind_text)
        except ValueError:
            raise DomainModelError(
                f"property {prop.value} has unknown semantic kind {kind_text!r}") from None
        allowed = _KIND_RANGES.get(kind)
        if allowed is not None and rng.value not in allowed:
            raise DomainModelError(
                f"property {prop.value} kind {kind.value} is inconsistent "
                f"with range {rng.value}")
        properties.append(DomainProperty(
            prop, domain, rng, kind, label=text(prop, RDFS.label)))

    return DomainModel(classes, sorted(properties, key=lambda p: p.iri.value))


# ---------------------------------------------------------------------------
# Catalog types
# ---------------------------------------------------------------------------

SubjectNode = Union[Iri, BlankNode]


@dataclass(frozen=True)
class Mapping:
    property: Iri
    domain_class: Iri


@dataclass(frozen=True)
class AttributeStatistics:
    """Per-attribute profile numbers; values keep their decimal lexical forms."""

    count: int
    null_count: int
    distinct_count: int
    mean: Optional[str] = None
    minimum: Optional[str] = None
    maximum: Optional[str] = None
    numeric: bool = False


@dataclass(frozen=True)
class DatasetStatistics:
    number_of_instances: int


@dataclass(frozen=True)
class AttributeProfile:
    iri: SubjectNode
    identifier: str
    label: Optional[str] = None
    column_number: Optional[int] = None
    column_name: Optional[str] = None
    mapping: Optional[Mapping] = None
    statistics: Optional[AttributeStatistics] = None
    extra: tuple[Triple, ...] = ()


@dataclass(frozen=True)
class TextFileAccess:
    iri: SubjectNode
    kind: AccessKind = field(default=AccessKind.TEXT_FILE, init=False)
    location: Optional[str] = None
    media_type: Optional[str] = None
    separator: Optional[str] = None
    has_header: bool = False
    extra: tuple[Triple, ...] = ()


@dataclass(frozen=True)
class DatabaseAccess:
    iri: SubjectNode
    kind: AccessKind = field(default=AccessKind.DATABASE, init=False)
    connection: Optional[str] = None
    table: Optional[str] = None
    extra: tuple[Triple, ...] = ()


AccessDescriptor = Union[TextFileAccess, DatabaseAccess]


@dataclass(frozen=True)
class DatasetProfile:
    iri: Iri
    title: str
    temporal: Optional[tuple[str, str]] = None
    access: Optional[AccessDescriptor] = None
    attributes: tuple[AttributeProfile, ...] = ()
    statistics: Optional[DatasetStatistics] = None
    extra: tuple[Triple, ...] = ()

    def attribute(self, identifier: str) -> Optional[AttributeProfile]:
        for attr in self.attributes:
            if attr.identifier == identifier:
                return attr
        return None


@dataclass(frozen=True)
class Catalog:
    iri: Optional[Iri]
    datasets: tuple[DatasetProfile, ...]
    graph: Graph = field(compare=False, default_factory=Graph)

    def dataset(self, iri: Iri) -> DatasetProfile:
        for d in self.datasets:
            if d.iri == iri:
                return d
        raise UnknownDatasetError(iri.value)

    def dataset_or_none(self, iri: Iri) -> Optional[DatasetProfile]:
        for d in self.datasets:
            if d.iri == iri:
                return d
        return None


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    subject: str
    message: str


@dataclass(frozen=True)
class JoinSuggestion:
    kind: IntegrationKind
    point_dataset: Iri
    latitude_attribute: str
    longitude_attribute: str
    polyline_dataset: Iri
    geometry_attribute: str
    max_distance_meters: float = 50.0


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

def _literal_text(g: Graph, subject, predicate) -> Optional[str]:
    value = g.value(subject, predicate)
    return value.lexical if isinstance(value, Literal) else None


def _collect_extra(g: Graph, node, consumed: set[Iri]) -> tuple[Triple, ...]:
    """Triples on ``node`` the loader did not interpret, sub-node trees included."""
    out: list[Triple] = []
    for t in g.match(node, None, None):
        if t.predicate in consumed:
            continue
        out.append(t)
        if isinstance(t.object, BlankNode):
            stack = [t.object]
            seen = set()
            while stack:
                sub = stack.pop()
                if sub in seen:
                    continue
                seen.add(sub)
                for inner in g.match(sub, None, None):
                    out.append(inner)
                    if isinstance(inner.object, BlankNode):
                        stack.append(inner.object)
    return tuple(sorted(out, key=lambda t: str(t)))


def _load_statistics(g: Graph, node) -> Optional[AttributeStatistics]:
    count = _literal_text(g, node, SML.numberOfValues)
    if count is None:
        return None
    nulls = _literal_text(g, node, SML.numberOfNullValues) or "0"
    distinct = _literal_text(g, node, SML.numberOfDistinctValues) or "0"
    mean = _literal_text(g, node, SML.meanValue)
    minimum = _literal_text(g, node, SML.minValue)
    maximum = _literal_text(g, node, SML.maxValue)
    numeric = mean is not None
    try:
        return AttributeStatistics(int(count), int(nulls), int(distinct),
                                   mean, minimum, maximum, numeric)
    except ValueError:
        return None


_ATTR_CONSUMED = {
    RDF.type, DCTERMS.identifier, RDFS.label, SML.columnNumber, SML.columnName,
    SML.hasMapping, SML.numberOfValues, SML.numberOfNullValues,
    SML.numberOfDistinctValues, SML.meanValue, SML.minValue, SML.maxValue,
}


def _load_attribute(g: Graph, node: SubjectNode, diagnostics: list[Diagnostic]) -> AttributeProfile:
    identifier = _literal_text(g, node, DCTERMS.identifier)
    label = _literal_text(g, node, RDFS.label)
    if identifier is None:
        # Identifier is derived, never silently aliased in queries: display
        # name falls back to the label, then to the node's own name.
        identifier = label if label is not None else (
            node.local_name() if isinstance(node, Iri) else node.label)

    column_number: Optional[int] = None
    number_text = _literal_text(g, node, SML.columnNumber)
    if number_text is not None:
        try:
            column_number = int(number_text)
        except ValueError:
            diagnostics.append(Diagnostic(
                "warning", f"columnNumber {number_text!r} is not an integer", str(node)))
        else:
            if column_number < 0:
                diagnostics.append(Diagnostic(
                    "warning", f"columnNumber {column_number} is negative", str(node)))
                column_number = None

    column_name = _literal_text(g, node, SML.columnName)
    if column_number is None and column_name is None:
        diagnostics.append(Diagnostic(
            "warning", "attribute has no column locator", str(node)))

    mapping: Optional[Mapping] = None
    mapping_node = g.value(node, SML.hasMapping)
    if mapping_node is not None:
        prop = g.value(mapping_node, SML.mapsToProperty)
        domain = g.value(mapping_node, SML.mapsToDomain)
        if isinstance(prop, Iri) and isinstance(domain, Iri):
            mapping = Mapping(prop, domain)
        else:
            diagnostics.append(Diagnostic(
                "warning", "mapping is incomplete", str(node)))

    return AttributeProfile(
        iri=node,
        identifier=identifier,
        label=label,
        column_number=column_number,
        column_name=column_name,
        mapping=mapping,
        statistics=_load_statistics(g, node),
        extra=_collect_extra(g, node, _ATTR_CONSUMED),
    )


_ACCESS_CONSUMED = {
    RDF.type, DCTERMS.format, CSVW.separator, CSVW.header,
    SML.fileLocation, SML.connection, SML.table,
}


def _load_access(g: Graph, node: SubjectNode,
                 diagnostics: list[Diagnostic]) -> Optional[AccessDescriptor]:
    types = set(g.objects(node, RDF.type))
    extra = _collect_extra(g, node, _ACCESS_CONSUMED)
    if SML.Database in types:
        return DatabaseAccess(
            iri=node,
            connection=_literal_text(g, node, SML.connection),
            table=_literal_text(g, node, SML.table),
            extra=extra,
        )
    if SML.TextFile not in types:
        diagnostics.append(Diagnostic(
            "warning", "access descriptor has no recognized type", str(node)))
    header_text = _literal_text(g, node, CSVW.header)
    return TextFileAccess(
        iri=node,
        location=_literal_text(g, node, SML.fileLocation),
        media_type=_literal_text(g, node, DCTERMS.format),
        separator=_literal_text(g, node, CSVW.separator),
        has_header=header_text == "true",
        extra=extra,
    )


_DATASET_CONSUMED = {
    RDF.type, DCTERMS.title, DCTERMS.temporal, SML.hasFile, SML.hasAttribute,
    SML.numberOfInstances,
}


def _load_dataset(g: Graph, iri: Iri, diagnostics: list[Diagnostic]) -> DatasetProfile:
    title = _literal_text(g, iri, DCTERMS.title) or iri.local_name()

    temporal: Optional[tuple[str, str]] = None
    temporal_node = g.value(iri, DCTERMS.temporal)
    if temporal_node is not None:
        start = _literal_text(g, temporal_node, SO.startDate)
        end = _literal_text(g, temporal_node, SO.endDate)
        if start is not None and end is not None:
            temporal = (start, end)
        else:
            diagnostics.append(Diagnostic(
                "warning", "temporal coverage is missing start or end", str(iri)))

    access: Optional[AccessDescriptor] = None
    access_node = g.value(iri, SML.hasFile)
    if access_node is None:
        diagnostics.append(Diagnostic(
            "warning", "dataset has no access descriptor", str(iri)))
    elif isinstance(access_node, Literal):
        diagnostics.append(Diagnostic(
            "warning", "sml:hasFile must point at a node, not a literal", str(iri)))
    else:
        access = _load_access(g, access_node, diagnostics)

    attribute_nodes = [
        t.object for t in g.match(iri, SML.hasAttribute, None)
        if not isinstance(t.object, Literal)
    ]
    attributes = [_load_attribute(g, node, diagnostics) for node in attribute_nodes]
    attributes.sort(key=lambda a: (a.column_number is None, a.column_number, a.identifier))
    if not attributes:
        diagnostics.append(Diagnostic("warning", "dataset has no attributes", str(iri)))

    statistics = None
    instances = _literal_text(g, iri, SML.numberOfInstances)
    if instances is not None:
        try:
            statistics = DatasetStatistics(int(instances))
        except ValueError:
            diagnostics.append(Diagnostic(
                "warning", f"numberOfInstances {instances!r} is not an integer", str(iri)))

    return DatasetProfile(
        iri=iri,
        title=title,
        temporal=temporal,
        access=access,
        attributes=tuple(attributes),
        statistics=statistics,
        extra=_collect_extra(g, iri, _DATASET_CONSUMED),
    )


def load_catalog(g: Graph) -> tuple[Catalog, list[Diagnostic]]:
    """Materialize typed profiles for every dcat:Catalog in the graph.

    Loading is lenient: missing mandatory pieces produce diagnostics naming
    the offending subject, and the partial catalog is still returned.
    """
    diagnostics: list[Diagnostic] = []
    catalog_nodes = [s for s in g.subjects(RDF.type, DCAT.Catalog) if isinstance(s, Iri)]
    if not catalog_nodes:
        diagnostics.append(Diagnostic("warning", "no dcat:Catalog found"))

    dataset_iris: list[Iri] = []
    for node in catalog_nodes:
        for obj in g.objects(node, DCAT.dataset):
            if isinstance(obj, Iri) and obj not in dataset_iris:
                dataset_iris.append(obj)
            elif not isinstance(obj, Iri):
                diagnostics.append(Diagnostic(
                    "warning", "dcat:dataset must link an IRI", str(node)))

    datasets = tuple(
        _load_dataset(g, iri, diagnostics)
        for iri in sorted(dataset_iris, key=lambda i: i.value)
    )
    catalog = Catalog(
        iri=min(catalog_nodes, key=lambda i: i.value) if catalog_nodes else None,
        datasets=datasets,
        graph=g,
    )
    return catalog, diagnostics


# ---------------------------------------------------------------------------
# Emission (round-trip) and digest
# ---------------------------------------------------------------------------

def catalog_to_graph(catalog: Catalog) -> Graph:
    """Emit the typed catalog back to triples; reloading yields an equal catalog."""
    triples: list[Triple] = []
    fresh = 0

    def bnode(prefix: str) -> BlankNode:
        nonlocal fresh
        fresh += 1
        return BlankNode(f"{prefix}{fresh}")

    catalog_iri = catalog.iri if catalog.iri is not None else Iri(SML.base + "Catalog")
    if catalog.datasets or catalog.iri is not None:
        triples.append(Triple(catalog_iri, RDF.type, DCAT.Catalog))

    def integer(n: int) -> Literal:
        return Literal(str(n), Iri(XSD_INTEGER))

    def decimal(text: str) -> Literal:
        return Literal(text, Iri(XSD + "decimal"))

    for ds in catalog.datasets:
        triples.append(Triple(catalog_iri, DCAT.dataset, ds.iri))
        triples.append(Triple(ds.iri, RDF.type, DCAT.Dataset))
        triples.append(Triple(ds.iri, DCTERMS.title, Literal(ds.title)))
        if ds.temporal is not None:
            node = bnode("tc")
            triples.append(Triple(ds.iri, DCTERMS.temporal, node))
            triples.append(Triple(node, SO.startDate, Literal(ds.temporal[0], Iri(XSD_DATE))))
            triples.append(Triple(node, SO.endDate, Literal(ds.temporal[1], Iri(XSD_DATE))))
        if ds.statistics is not None:
            triples.append(Triple(
                ds.iri, SML.numberOfInstances, integer(ds.statistics.number_of_instances)))
        if ds.access is not None:
            acc = ds.access
            triples.append(Triple(ds.iri, SML.hasFile, acc.iri))
            if isinstance(acc, TextFileAccess):
                triples.append(Triple(acc.iri, RDF.type, SML.TextFile))
                if acc.media_type is not None:
                    triples.append(Triple(acc.iri, DCTERMS.format, Literal(acc.media_type)))
                if acc.separator is not None:
                    triples.append(Triple(acc.iri, CSVW.separator, Literal(acc.separator)))
                if acc.location is not None:
                    triples.append(Triple(acc.iri, SML.fileLocation, Literal(acc.location)))
                if acc.has_header:
                    triples.append(Triple(
                        acc.iri, CSVW.header, Literal("true", Iri(XSD_BOOLEAN))))
            else:
                triples.append(Triple(acc.iri, RDF.type, SML.Database))
                if acc.connection is not None:
                    triples.append(Triple(acc.iri, SML.connection, Literal(acc.connection)))
                if acc.table is not None:
                    triples.append(Triple(acc.iri, SML.table, Literal(acc.table)))
            triples.extend(acc.extra)
        for attr in ds.attributes:
            triples.append(Triple(ds.iri, SML.hasAttribute, attr.iri))
            triples.append(Triple(attr.iri, RDF.type, SML.Attribute))
            triples.append(Triple(attr.iri, DCTERMS.identifier, Literal(attr.identifier)))
            if attr.label is not None:
                triples.append(Triple(attr.iri, RDFS.label, Literal(attr.label, language="en")))
            if attr.column_number is not None:
                triples.append(Triple(attr.iri, SML.columnNumber, integer(attr.column_number)))
            if attr.column_name is not None:
                triples.append(Triple(attr.iri, SML.columnName, Literal(attr.column_name)))
            if attr.mapping is not None:
                node = bnode("mp")
                triples.append(Triple(attr.iri, SML.hasMapping, node))
                triples.append(Triple(node, SML.mapsToProperty, attr.mapping.property))
                triples.append(Triple(node, SML.mapsToDomain, attr.mapping.domain_class))
            if attr.statistics is not None:
                st = attr.statistics
                triples.append(Triple(attr.iri, SML.numberOfValues, integer(st.count)))
                triples.append(Triple(attr.iri, SML.numberOfNullValues, integer(st.null_count)))
                triples.append(Triple(
                    attr.iri, SML.numberOfDistinctValues, integer(st.distinct_count)))
                if st.mean is not None:
                    triples.append(Triple(attr.iri, SML.meanValue, decimal(st.mean)))
                if st.minimum is not None:
                    triples.append(Triple(
                        attr.iri, SML.minValue,
                        decimal(st.minimum) if st.numeric else Literal(st.minimum)))
                if st.maximum is not None:
                    triples.append(Triple(
                        attr.iri, SML.maxValue,
                        decimal(st.maximum) if st.numeric else Literal(st.maximum)))
            triples.extend(attr.extra)
        triples.extend(ds.extra)

    prefixes = dict(STANDARD_PREFIXES)
    prefixes.update(catalog.graph.prefixes)
    return Graph(triples, prefixes)


def catalog_digest(catalog: Catalog) -> str:
    """Stable content digest of the catalog's source graph."""
    from .turtle import serialize_turtle

    text = serialize_turtle(catalog.graph)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _check_mapping(attr: AttributeProfile, dm: DomainModel, out: list[Violation]) -> None:
    mapping = attr.mapping
    if mapping is None:
        return
    subject = str(attr.iri)
    cls = mapping.domain_class
    if cls not in dm:
        out.append(Violation(
            ViolationKind.UNKNOWN_DOMAIN_CLASS, subject,
            f"mapping domain {cls.value} is not a known domain class"))
        return
    prop = dm.properties.get(mapping.property)
    if prop is None:
        out.append(Violation(
            ViolationKind.UNKNOWN_PROPERTY, subject,
            f"mapping property {mapping.property.value} is not in the domain model"))
        return
    if not dm.is_subclass(cls, prop.domain):
        out.append(Violation(
            ViolationKind.PROPERTY_DOMAIN_MISMATCH, subject,
            f"property {prop.iri.value} has domain {prop.domain.value}, "
            f"which does not cover {cls.value}"))


def validate(catalog: Catalog, dm: DomainModel) -> list[Violation]:
    """Check the catalog against the schema rules and the domain model.

    An empty result means valid. Violations are data, never exceptions.
    """
    out: list[Violation] = []
    for ds in catalog.datasets:
        subject = str(ds.iri)
        if not ds.attributes:
            out.append(Violation(ViolationKind.NO_ATTRIBUTES, subject,
                                 "dataset has no attributes"))
        if ds.access is None:
            out.append(Violation(ViolationKind.MISSING_ACCESS, subject,
                                 "dataset has no access descriptor"))
        elif isinstance(ds.access, TextFileAccess):
            if ds.access.media_type is None:
                out.append(Violation(ViolationKind.ACCESS_INCOMPLETE, subject,
                                     "text-file access has no media type"))
            if ds.access.separator is None:
                out.append(Violation(ViolationKind.ACCESS_INCOMPLETE, subject,
                                     "text-file access has no separator"))
            elif len(ds.access.separator) != 1:
                out.append(Violation(
                    ViolationKind.ACCESS_INCOMPLETE, subject,
                    f"separator must be one character, got {ds.access.separator!r}"))
        else:
            if ds.access.connection is None:
                out.append(Violation(ViolationKind.ACCESS_INCOMPLETE, subject,
                                     "database access has no connection descriptor"))
            if ds.access.table is None:
                out.append(Violation(ViolationKind.ACCESS_INCOMPLETE, subject,
                                     "database access has no table"))
        if ds.temporal is not None and ds.temporal[0] > ds.temporal[1]:
            out.append(Violation(
                ViolationKind.TEMPORAL_ORDER, subject,
                f"temporal coverage starts {ds.temporal[0]} after end {ds.temporal[1]}"))
        for attr in ds.attributes:
            attr_subject = str(attr.iri)
            has_number = attr.column_number is not None
            has_name = attr.column_name is not None
            if not has_number and not has_name:
                out.append(Violation(ViolationKind.MISSING_LOCATOR, attr_subject,
                                     "attribute has no column locator"))
            elif isinstance(ds.access, TextFileAccess) and has_name:
                out.append(Violation(
                    ViolationKind.LOCATOR_MISMATCH, attr_subject,
                    "text-file attribute must use columnNumber, not columnName"))
            elif isinstance(ds.access, DatabaseAccess) and has_number:
                out.append(Violation(
                    ViolationKind.LOCATOR_MISMATCH, attr_subject,
                    "database attribute must use columnName, not columnNumber"))
            _check_mapping(attr, dm, out)
    return out


# ---------------------------------------------------------------------------
# Queries and suggestions
# ---------------------------------------------------------------------------

def attributes_of(catalog: Catalog, dataset: Iri) -> list[AttributeProfile]:
    """Attributes of a dataset ordered by column number, then identifier."""
    return list(catalog.dataset(dataset).attributes)


def datasets_for_class(catalog: Catalog, cls: Iri, dm: DomainModel) -> list[Iri]:
    """Datasets having an attribute mapped to ``cls`` or one of its subclasses."""
    if cls not in dm:
        raise UnknownClassError(cls.value)
    out = []
    for ds in catalog.datasets:
        for attr in ds.attributes:
            if attr.mapping is not None and dm.is_subclass(attr.mapping.domain_class, cls):
                out.append(ds.iri)
                break
    return sorted(out, key=lambda i: i.value)


def _kind_of(attr: AttributeProfile, dm: DomainModel) -> Optional[SemanticKind]:
    if attr.mapping is None:
        return None
    prop = dm.properties.get(attr.mapping.property)
    return prop.kind if prop is not None else None


def suggest_extractions(attr: AttributeProfile, dm: DomainModel) -> list[ExtractorKind]:
    """Extractors applicable to an attribute; only timestamps have any."""
    if _kind_of(attr, dm) == SemanticKind.TIMESTAMP:
        return [ExtractorKind.WEEKDAY, ExtractorKind.HOUR_OF_DAY]
    return []


_LAT_NAMES = {"lat", "latitude"}
_LON_NAMES = {"lon", "lng", "long", "longitude"}


def geo_point_pair(ds: DatasetProfile, dm: DomainModel) -> Optional[tuple[AttributeProfile, AttributeProfile]]:
    """(latitude, longitude) attribute pair of a dataset, if it has one."""
    points = [a for a in ds.attributes if _kind_of(a, dm) == SemanticKind.GEO_POINT]
    lat = next((a for a in points
                if a.mapping.property.local_name().lower() in _LAT_NAMES), None)
    lon = next((a for a in points
                if a.mapping.property.local_name().lower() in _LON_NAMES), None)
    if lat is not None and lon is not None:
        return (lat, lon)
    if lat is None and lon is None and len(points) == 2:
        # No recognizable names: fall back to column order.
        return (points[0], points[1])
    return None


def geo_polyline_attribute(ds: DatasetProfile, dm: DomainModel) -> Optional[AttributeProfile]:
    for attr in ds.attributes:
        if _kind_of(attr, dm) == SemanticKind.GEO_POLYLINE:
            return attr
    return None


def suggest_integrations(catalog: Catalog, left: Iri, right: Iri,
                         dm: DomainModel) -> list[JoinSuggestion]:
    """Spatial join suggestions between two datasets.

    A suggestion is emitted when one side carries a latitude/longitude
    point pair and the other a polyline geometry; point-to-point and
    polyline-to-polyline nearest joins are out of scope.
    """
    left_ds = catalog.dataset(left)
    right_ds = catalog.dataset(right)
    out: list[JoinSuggestion] = []
    for point_ds, line_ds in ((left_ds, right_ds), (right_ds, left_ds)):
        pair = geo_point_pair(point_ds, dm)
        line = geo_polyline_attribute(line_ds, dm)
        if pair is not None and line is not None:
            out.append(JoinSuggestion(
                kind=IntegrationKind.SPATIAL_NEAREST,
                point_dataset=point_ds.iri,
                latitude_attribute=pair[0].identifier,
                longitude_attribute=pair[1].identifier,
                polyline_dataset=line_ds.iri,
                geometry_attribute=line.identifier,
            ))
    return out
