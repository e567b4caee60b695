"""RDF term model: IRIs, blank nodes, literals, triples.

Terms are immutable values with structural equality. Literal equality is by
(lexical form, datatype, language tag); no value-space canonicalization
happens at this layer, so ``"0"^^xsd:integer`` and ``"00"^^xsd:integer`` are
distinct terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"

XSD_STRING = XSD + "string"
XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"
XSD_BOOLEAN = XSD + "boolean"
XSD_DATE = XSD + "date"
XSD_DATETIME = XSD + "dateTime"
RDF_LANG_STRING = RDF + "langString"
RDF_TYPE = RDF + "type"


@dataclass(frozen=True, order=False)
class Iri:
    value: str

    def __post_init__(self) -> None:
        if not self.value:
            raise ValueError("IRI must be non-empty")
        if any(c.isspace() for c in self.value):
            raise ValueError(f"IRI must not contain whitespace: {self.value!r}")

    def local_name(self) -> str:
        """Text after the last '#' or '/', used for short display names."""
        for sep in ("#", "/"):
            if sep in self.value:
                return self.value.rsplit(sep, 1)[1] or self.value
        return self.value

    def __str__(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True)
class BlankNode:
    label: str

    def __str__(self) -> str:
        return f"_:{self.label}"


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: Iri = field(default=Iri(XSD_STRING))
    language: str | None = None

    def __post_init__(self) -> None:
        # A language tag forces the language-string datatype.
        if self.language is not None:
            object.__setattr__(self, "datatype", Iri(RDF_LANG_STRING))

    def __str__(self) -> str:
        out = '"' + _escape(self.lexical) + '"'
        if self.language is not None:
            return out + "@" + self.language
        if self.datatype.value != XSD_STRING:
            return out + "^^" + str(self.datatype)
        return out


Term = Union[Iri, BlankNode, Literal]
SubjectTerm = Union[Iri, BlankNode]


@dataclass(frozen=True)
class Triple:
    subject: SubjectTerm
    predicate: Iri
    object: Term

    def __post_init__(self) -> None:
        if not isinstance(self.subject, (Iri, BlankNode)):
            raise TypeError(f"triple subject must be an IRI or blank node, got {self.subject!r}")
        if not isinstance(self.predicate, Iri):
            raise TypeError(f"triple predicate must be an IRI, got {self.predicate!r}")
        if not isinstance(self.object, (Iri, BlankNode, Literal)):
            raise TypeError(f"triple object must be a term, got {self.object!r}")

    def __str__(self) -> str:
        return f"{self.subject} {self.predicate} {self.object} ."

    def __iter__(self):
        return iter((self.subject, self.predicate, self.object))


def _escape(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


def term_sort_key(term: Term) -> tuple:
    """Total order over terms: IRIs, then blank nodes, then literals."""
    if isinstance(term, Iri):
        return (0, term.value)
    if isinstance(term, BlankNode):
        return (1, term.label)
    return (2, term.lexical, term.datatype.value, term.language or "")


def triple_sort_key(t: Triple) -> tuple:
    return (term_sort_key(t.subject), term_sort_key(t.predicate), term_sort_key(t.object))
