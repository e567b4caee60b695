"""Semantic data catalog toolkit.

A small stack for describing tabular datasets in RDF, querying the
descriptions with a SPARQL subset, planning analytics workflows as
metadata-only step lists, and materializing those plans against the
underlying files only on request.
"""

__version__ = "0.1.0"

from .catalog import (
    Catalog,
    DomainModel,
    attributes_of,
    catalog_digest,
    catalog_to_graph,
    datasets_for_class,
    load_catalog,
    load_domain_model,
    suggest_extractions,
    suggest_integrations,
    validate,
)
from .dataspec import (
    DataSpecification,
    ExtractFeature,
    IntegrateDatasets,
    SampleRows,
    SelectDataset,
    SelectFeatures,
    add_step,
    infer_schema,
    load_spec,
    new_spec,
    save_spec,
)
from .graph import Graph, graph_isomorphic
from .materializer import Table, materialize, write_csv
from .profiler import emit_statistics_triples, profile_dataset
from .sparql import evaluate, parse_query
from .terms import BlankNode, Iri, Literal, Triple
from .turtle import parse_turtle, serialize_turtle

__all__ = [
    "BlankNode",
    "Catalog",
    "DataSpecification",
    "DomainModel",
    "ExtractFeature",
    "Graph",
    "IntegrateDatasets",
    "Iri",
    "Literal",
    "SampleRows",
    "SelectDataset",
    "SelectFeatures",
    "Table",
    "Triple",
    "add_step",
    "attributes_of",
    "catalog_digest",
    "catalog_to_graph",
    "datasets_for_class",
    "emit_statistics_triples",
    "evaluate",
    "graph_isomorphic",
    "infer_schema",
    "load_catalog",
    "load_domain_model",
    "load_spec",
    "materialize",
    "new_spec",
    "parse_query",
    "parse_turtle",
    "profile_dataset",
    "save_spec",
    "serialize_turtle",
    "suggest_extractions",
    "suggest_integrations",
    "validate",
    "write_csv",
]
