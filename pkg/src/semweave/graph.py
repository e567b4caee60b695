"""Immutable in-memory triple store with pattern matching and isomorphism.

A Graph is a set of triples plus a prefix map. It is frozen after
construction, so instances are safe to share across threads; ``add`` and
``union`` return new graphs. Triples are kept in a canonical sorted order so
every enumeration (``match``, iteration, serialization) is deterministic.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping, Optional

from .errors import BlankNodeLimitError
from .terms import BlankNode, Iri, Term, Triple, triple_sort_key

# Backtracking bound for the blank-node bijection search.
MAX_ISO_BLANK_NODES = 64


class Graph:
    def __init__(self, triples: Iterable[Triple] = (), prefixes: Mapping[str, str] | None = None):
        self._triples: frozenset[Triple] = frozenset(triples)
        self._ordered: tuple[Triple, ...] = tuple(sorted(self._triples, key=triple_sort_key))
        self.prefixes: dict[str, str] = dict(prefixes or {})
        # Position indexes; graphs are desk-scale, sets of whole triples suffice.
        self._by_s: dict[Term, set[Triple]] = {}
        self._by_p: dict[Term, set[Triple]] = {}
        self._by_o: dict[Term, set[Triple]] = {}
        for t in self._triples:
            self._by_s.setdefault(t.subject, set()).add(t)
            self._by_p.setdefault(t.predicate, set()).add(t)
            self._by_o.setdefault(t.object, set()).add(t)

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._ordered)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self._triples

    def __eq__(self, other: object) -> bool:
        """Exact equality: same triple set (blank labels included)."""
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    def __hash__(self) -> int:
        return hash(self._triples)

    def __repr__(self) -> str:
        return f"Graph({len(self)} triples, {len(self.prefixes)} prefixes)"

    def add(self, *triples: Triple) -> "Graph":
        """New graph with the given triples added (set semantics)."""
        return Graph(self._triples.union(triples), self.prefixes)

    def remove(self, *triples: Triple) -> "Graph":
        return Graph(self._triples.difference(triples), self.prefixes)

    def union(self, other: "Graph") -> "Graph":
        """Merged triples; the right operand wins on prefix clashes."""
        prefixes = dict(self.prefixes)
        prefixes.update(other.prefixes)
        return Graph(self._triples | other._triples, prefixes)

    def match(
        self,
        subject: Optional[Term] = None,
        predicate: Optional[Iri] = None,
        obj: Optional[Term] = None,
    ) -> list[Triple]:
        """Triples matching all bound positions, in canonical order."""
        candidates: set[Triple] | None = None
        for term, index in ((subject, self._by_s), (predicate, self._by_p), (obj, self._by_o)):
            if term is None:
                continue
            found = index.get(term, set())
            candidates = found if candidates is None else candidates & found
            if not candidates:
                return []
        if candidates is None:
            return list(self._ordered)
        return sorted(candidates, key=triple_sort_key)

    def subjects(self, predicate: Optional[Iri] = None, obj: Optional[Term] = None) -> list[Term]:
        seen: list[Term] = []
        for t in self.match(None, predicate, obj):
            if t.subject not in seen:
                seen.append(t.subject)
        return seen

    def objects(self, subject: Optional[Term] = None, predicate: Optional[Iri] = None) -> list[Term]:
        seen: list[Term] = []
        for t in self.match(subject, predicate, None):
            if t.object not in seen:
                seen.append(t.object)
        return seen

    def value(self, subject: Optional[Term] = None, predicate: Optional[Iri] = None) -> Term | None:
        """First object for (subject, predicate), or None."""
        for t in self.match(subject, predicate, None):
            return t.object
        return None

    def blank_nodes(self) -> set[BlankNode]:
        found: set[BlankNode] = set()
        for t in self._triples:
            if isinstance(t.subject, BlankNode):
                found.add(t.subject)
            if isinstance(t.object, BlankNode):
                found.add(t.object)
        return found


def _rewrite(triple: Triple, mapping: dict[BlankNode, BlankNode]) -> Triple:
    s = mapping.get(triple.subject, triple.subject) if isinstance(triple.subject, BlankNode) else triple.subject
    o = mapping.get(triple.object, triple.object) if isinstance(triple.object, BlankNode) else triple.object
    return Triple(s, triple.predicate, o)


def _bnode_signature(graph: Graph, node: BlankNode) -> tuple:
    """Blank-node invariant under relabeling; prunes the bijection search."""
    out = sorted(
        (t.predicate.value, "*" if isinstance(t.object, BlankNode) else str(t.object))
        for t in graph.match(node, None, None)
    )
    inc = sorted(
        (t.predicate.value, "*" if isinstance(t.subject, BlankNode) else str(t.subject))
        for t in graph.match(None, None, node)
    )
    return (tuple(out), tuple(inc))


def graph_isomorphic(g1: Graph, g2: Graph) -> bool:
    """True iff some blank-node bijection maps g1 exactly onto g2.

    Ground triples must match as sets; blank nodes are matched by
    backtracking over signature-compatible candidates. Refuses graphs with
    more than MAX_ISO_BLANK_NODES blank nodes.
    """
    if len(g1) != len(g2):
        return False
    b1, b2 = sorted(g1.blank_nodes(), key=lambda b: b.label), g2.blank_nodes()
    if len(b1) != len(b2):
        return False
    if len(b1) > MAX_ISO_BLANK_NODES:
        raise BlankNodeLimitError(
            f"isomorphism check supports at most {MAX_ISO_BLANK_NODES} blank nodes, got {len(b1)}"
        )

    ground1 = {t for t in g1 if not isinstance(t.subject, BlankNode) and not isinstance(t.object, BlankNode)}
    ground2 = {t for t in g2 if not isinstance(t.subject, BlankNode) and not isinstance(t.object, BlankNode)}
    if ground1 != ground2:
        return False

    sig1 = {b: _bnode_signature(g1, b) for b in b1}
    sig2: dict[tuple, list[BlankNode]] = {}
    for b in b2:
        sig2.setdefault(_bnode_signature(g2, b), []).append(b)
    if sorted(sig1.values(), key=str) != sorted(
        (s for s, nodes in sig2.items() for _ in nodes), key=str
    ):
        return False

    bnode_triples1 = [t for t in g1 if t not in ground1]
    target = set(g2)

    def extend(i: int, mapping: dict[BlankNode, BlankNode], used: set[BlankNode]) -> bool:
        if i == len(b1):
            return all(_rewrite(t, mapping) in target for t in bnode_triples1)
        node = b1[i]
        for cand in sig2.get(sig1[node], []):
            if cand in used:
                continue
            mapping[node] = cand
            # Check triples fully determined by the mapping so far.
            ok = True
            for t in bnode_triples1:
                s_b = isinstance(t.subject, BlankNode)
                o_b = isinstance(t.object, BlankNode)
                if (not s_b or t.subject in mapping) and (not o_b or t.object in mapping):
                    if _rewrite(t, mapping) not in target:
                        ok = False
                        break
            if ok and extend(i + 1, mapping, used | {cand}):
                return True
            del mapping[node]
        return False

    return extend(0, {}, set())
