"""Namespace constants and term builders for the catalog vocabularies.

The ``sml`` namespace IRI is a stand-in: only the prefix is normative in the
catalogs this package consumes, so any catalog that declares a different
namespace for ``sml`` still loads as long as its prefix map says so.
"""

from __future__ import annotations

from .terms import Iri


class Namespace:
    """Builds IRIs under a common prefix: ``NS.term`` or ``NS["term"]``."""

    def __init__(self, base: str):
        self._base = base

    @property
    def base(self) -> str:
        return self._base

    def __getattr__(self, name: str) -> Iri:
        if name.startswith("_"):
            raise AttributeError(name)
        return Iri(self._base + name)

    def __getitem__(self, name: str) -> Iri:
        return Iri(self._base + name)


RDF = Namespace("http://www.w3.org/1999/02/22-rdf-syntax-ns#")
RDFS = Namespace("http://www.w3.org/2000/01/rdf-schema#")
XSD = Namespace("http://www.w3.org/2001/XMLSchema#")
DCAT = Namespace("http://www.w3.org/ns/dcat#")
DCTERMS = Namespace("http://purl.org/dc/terms/")
CSVW = Namespace("http://www.w3.org/ns/csvw#")
SO = Namespace("http://schema.org/")
SIOC = Namespace("http://rdfs.org/sioc/ns#")
SML = Namespace("https://simple-ml.de/vocab/")

#: Prefix map covering every namespace the shipped fixtures use.
STANDARD_PREFIXES: dict[str, str] = {
    "rdf": RDF.base,
    "rdfs": RDFS.base,
    "xsd": XSD.base,
    "dcat": DCAT.base,
    "dcterms": DCTERMS.base,
    "csvw": CSVW.base,
    "so": SO.base,
    "sioc": SIOC.base,
    "sml": SML.base,
}
