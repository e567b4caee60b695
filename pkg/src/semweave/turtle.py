"""Turtle reader and writer for the catalog dialect.

Supported syntax: ``@prefix`` directives, prefixed names, the ``a`` keyword,
predicate lists (``;``), object lists (``,``), anonymous blank-node property
lists (``[...]``), labeled blank nodes (``_:x``), string / typed /
language-tagged literals, bare integers, decimals and booleans, IRIs in
angle brackets, and ``#`` comments. Everything else (collections, ``@base``,
multiline strings) is a syntax error, never a silent skip.

The writer emits a deterministic document: prefix directives sorted by
label, subjects sorted by term text, and blank nodes inlined as ``[...]``
where they are referenced exactly once as an object.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import Diagnostic, TurtleSyntaxError, UndefinedPrefixError
from .graph import Graph
from .terms import (
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_INTEGER,
    XSD_STRING,
    RDF_LANG_STRING,
    BlankNode,
    Iri,
    Literal,
    Term,
    Triple,
    term_sort_key,
)

_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    column: int


def _is_name_start(c: str) -> bool:
    return c.isalpha() or c == "_"


def _is_name_char(c: str) -> bool:
    return c.isalnum() or c in "_-"


class _Lexer:
    """Hand-written scanner tracking 1-based line/column per token."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.column = 1

    def _peek(self, offset: int = 0) -> str | None:
        j = self.pos + offset
        return self.text[j] if j < len(self.text) else None

    def _advance(self) -> str:
        c = self.text[self.pos]
        self.pos += 1
        if c == "\n":
            self.line += 1
            self.column = 1
        else:
            self.column += 1
        return c

    def _error(self, message: str, line: int | None = None, column: int | None = None,
               token: str | None = None, expected: str | None = None):
        raise TurtleSyntaxError(message, line or self.line, column or self.column,
                                token=token, expected=expected)

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        while True:
            tok = self._next_token()
            out.append(tok)
            if tok.kind == "EOF":
                return out

    def _next_token(self) -> Token:
        while True:
            c = self._peek()
            if c is None:
                return Token("EOF", "", self.line, self.column)
            if c.isspace():
                self._advance()
                continue
            if c == "#":
                while self._peek() is not None and self._peek() != "\n":
                    self._advance()
                continue
            break

        line, col = self.line, self.column
        c = self._peek()
        assert c is not None

        if c in ".;,[]":
            self._advance()
            kind = {".": "DOT", ";": "SEMI", ",": "COMMA", "[": "LBRACKET", "]": "RBRACKET"}[c]
            return Token(kind, c, line, col)

        if c == "<":
            self._advance()
            chars: list[str] = []
            while True:
                c = self._peek()
                if c is None or c == "\n":
                    self._error("unterminated IRI", line, col, expected="'>'")
                if c == ">":
                    self._advance()
                    break
                if c.isspace():
                    self._error("whitespace inside IRI", line, col)
                chars.append(self._advance())
            return Token("IRIREF", "".join(chars), line, col)

        if c == '"':
            return Token("STRING", self._lex_string(line, col), line, col)

        if c == "@":
            self._advance()
            word = self._lex_name_run()
            if word == "prefix":
                return Token("PREFIX", "@prefix", line, col)
            if word and word[0].isalpha():
                # Language tag, e.g. @en or @en-GB (only valid after a string;
                # the parser enforces placement).
                return Token("LANGTAG", word, line, col)
            self._error("unknown directive", line, col, token=f"@{word}",
                        expected="'@prefix' or a language tag")

        if c == "^":
            self._advance()
            if self._peek() == "^":
                self._advance()
                return Token("DTYPE", "^^", line, col)
            self._error("lone '^'", line, col, expected="'^^'")

        if c == "_" and self._peek(1) == ":":
            self._advance()
            self._advance()
            label = self._lex_name_run()
            if not label:
                self._error("blank node label missing", line, col)
            return Token("BLANK", label, line, col)

        if c.isdigit() or (c in "+-" and (self._peek(1) or "").isdigit()):
            return self._lex_number(line, col)

        if _is_name_start(c):
            name = self._lex_name_run()
            if self._peek() == ":":
                self._advance()
                local = self._lex_name_run() if _is_name_start(self._peek() or " ") else ""
                return Token("PNAME", f"{name}:{local}", line, col)
            if name == "a":
                return Token("A", "a", line, col)
            if name in ("true", "false"):
                return Token("BOOLEAN", name, line, col)
            self._error("bare name is not valid here", line, col, token=name,
                        expected="a prefixed name, 'a', 'true' or 'false'")

        if c == ":":
            # Empty-prefix name, e.g. :local
            self._advance()
            local = self._lex_name_run() if _is_name_start(self._peek() or " ") else ""
            return Token("PNAME", f":{local}", line, col)

        self._error("unexpected character", line, col, token=c)
        raise AssertionError("unreachable")

    def _lex_name_run(self) -> str:
        chars: list[str] = []
        while True:
            c = self._peek()
            if c is None or not _is_name_char(c):
                return "".join(chars)
            chars.append(self._advance())

    def _lex_number(self, line: int, col: int) -> Token:
        chars: list[str] = []
        if self._peek() in "+-":
            chars.append(self._advance())
        while (self._peek() or "").isdigit():
            chars.append(self._advance())
        # A dot is part of the number only when a digit follows; otherwise it
        # is the statement terminator ("... 1 ." vs "... 1.5").
        if self._peek() == "." and (self._peek(1) or "").isdigit():
            chars.append(self._advance())
            while (self._peek() or "").isdigit():
                chars.append(self._advance())
            return Token("DECIMAL", "".join(chars), line, col)
        return Token("INTEGER", "".join(chars), line, col)

    def _lex_string(self, line: int, col: int) -> str:
        self._advance()  # opening quote
        chars: list[str] = []
        while True:
            c = self._peek()
            if c is None or c == "\n":
                self._error("unterminated string literal", line, col, expected='closing \'"\'')
            if c == '"':
                self._advance()
                return "".join(chars)
            if c == "\\":
                self._advance()
                e = self._peek()
                if e is None:
                    self._error("unterminated escape", line, col)
                if e in _ESCAPES:
                    chars.append(_ESCAPES[e])
                    self._advance()
                elif e in "uU":
                    self._advance()
                    width = 4 if e == "u" else 8
                    digits = ""
                    for _ in range(width):
                        d = self._peek()
                        if d is None or d not in "0123456789abcdefABCDEF":
                            self._error(f"\\{e} escape needs {width} hex digits", self.line, self.column)
                        digits += self._advance()
                    chars.append(chr(int(digits, 16)))
                else:
                    self._error(f"unknown escape '\\{e}'", self.line, self.column)
            else:
                chars.append(self._advance())


class _Parser:
    def __init__(self, tokens: list[Token], base_prefixes: Mapping[str, str] | None = None):
        self.tokens = tokens
        self.pos = 0
        self.prefixes: dict[str, str] = dict(base_prefixes or {})
        self.triples: list[Triple] = []
        self.diagnostics: list[Diagnostic] = []
        self._explicit_labels = {t.value for t in tokens if t.kind == "BLANK"}
        self._anon_counter = 0

    def _peek(self) -> Token:
        return self.tokens[self.pos]

    def _take(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def _expect(self, kind: str, expected: str) -> Token:
        tok = self._take()
        if tok.kind != kind:
            raise TurtleSyntaxError("unexpected token", tok.line, tok.column,
                                    token=tok.value or tok.kind, expected=expected)
        return tok

    def _fresh_blank(self) -> BlankNode:
        # Anonymous nodes are numbered in document order; labels already used
        # explicitly in the document are skipped to avoid accidental merges.
        while True:
            label = f"b{self._anon_counter}"
            self._anon_counter += 1
            if label not in self._explicit_labels:
                return BlankNode(label)

    def parse(self) -> None:
        while self._peek().kind != "EOF":
            if self._peek().kind == "PREFIX":
                self._parse_prefix()
            else:
                self._parse_statement()

    def _parse_prefix(self) -> None:
        self._take()  # @prefix
        name_tok = self._expect("PNAME", "prefix label ending in ':'")
        prefix, _, local = name_tok.value.partition(":")
        if local:
            raise TurtleSyntaxError("prefix declaration must end in ':'", name_tok.line,
                                    name_tok.column, token=name_tok.value)
        iri_tok = self._expect("IRIREF", "namespace IRI in angle brackets")
        if prefix in self.prefixes and self.prefixes[prefix] != iri_tok.value:
            self.diagnostics.append(Diagnostic(
                "warning", f"prefix '{prefix}:' redefined", f"line {name_tok.line}"))
        self.prefixes[prefix] = iri_tok.value
        self._expect("DOT", "'.' after prefix declaration")

    def _parse_statement(self) -> None:
        tok = self._peek()
        if tok.kind == "LBRACKET":
            subject: Term = self._parse_bnode_property_list()
            # A bare "[...] ." statement is allowed; further predicates optional.
            if self._peek().kind != "DOT":
                self._parse_predicate_object_list(subject)
        else:
            subject = self._parse_term(position="subject")
            if isinstance(subject, Literal):
                raise TurtleSyntaxError("literal cannot be a subject", tok.line, tok.column,
                                        token=tok.value)
            self._parse_predicate_object_list(subject)
        self._expect("DOT", "'.' ending the statement")

    def _parse_predicate_object_list(self, subject) -> None:
        while True:
            predicate = self._parse_verb()
            self._parse_object_list(subject, predicate)
            if self._peek().kind == "SEMI":
                while self._peek().kind == "SEMI":
                    self._take()
                # Trailing ';' before '.' or ']' is permitted.
                if self._peek().kind in ("DOT", "RBRACKET", "EOF"):
                    return
                continue
            return

    def _parse_verb(self) -> Iri:
        tok = self._peek()
        if tok.kind == "A":
            self._take()
            return Iri(RDF_TYPE)
        term = self._parse_term(position="predicate")
        if not isinstance(term, Iri):
            raise TurtleSyntaxError("predicate must be an IRI", tok.line, tok.column,
                                    token=tok.value)
        return term

    def _parse_object_list(self, subject, predicate: Iri) -> None:
        while True:
            obj = self._parse_object()
            self.triples.append(Triple(subject, predicate, obj))
            if self._peek().kind == "COMMA":
                self._take()
                continue
            return

    def _parse_object(self) -> Term:
        if self._peek().kind == "LBRACKET":
            return self._parse_bnode_property_list()
        return self._parse_term(position="object")

    def _parse_bnode_property_list(self) -> BlankNode:
        self._expect("LBRACKET", "'['")
        node = self._fresh_blank()
        if self._peek().kind != "RBRACKET":
            self._parse_predicate_object_list(node)
        self._expect("RBRACKET", "']' closing the blank node")
        return node

    def _parse_term(self, position: str) -> Term:
        tok = self._take()
        if tok.kind == "IRIREF":
            return Iri(tok.value)
        if tok.kind == "PNAME":
            return self._resolve_pname(tok)
        if tok.kind == "BLANK":
            return BlankNode(tok.value)
        if tok.kind == "STRING":
            return self._finish_literal(tok.value)
        if tok.kind == "INTEGER":
            return Literal(tok.value, Iri(XSD_INTEGER))
        if tok.kind == "DECIMAL":
            return Literal(tok.value, Iri(XSD_DECIMAL))
        if tok.kind == "BOOLEAN":
            return Literal(tok.value, Iri(XSD_BOOLEAN))
        raise TurtleSyntaxError(f"unexpected token in {position} position", tok.line, tok.column,
                                token=tok.value or tok.kind,
                                expected="an IRI, prefixed name, blank node or literal")

    def _finish_literal(self, text: str) -> Literal:
        tok = self._peek()
        if tok.kind == "LANGTAG":
            self._take()
            return Literal(text, language=tok.value)
        if tok.kind == "DTYPE":
            self._take()
            dtype_tok = self._take()
            if dtype_tok.kind == "IRIREF":
                return Literal(text, Iri(dtype_tok.value))
            if dtype_tok.kind == "PNAME":
                return Literal(text, self._resolve_pname(dtype_tok))
            raise TurtleSyntaxError("datatype must be an IRI", dtype_tok.line, dtype_tok.column,
                                    token=dtype_tok.value or dtype_tok.kind)
        return Literal(text)

    def _resolve_pname(self, tok: Token) -> Iri:
        prefix, _, local = tok.value.partition(":")
        if prefix not in self.prefixes:
            raise UndefinedPrefixError(prefix, tok.line, tok.column)
        return Iri(self.prefixes[prefix] + local)


def parse_turtle(text: str, base_prefixes: Mapping[str, str] | None = None) -> tuple[Graph, list[Diagnostic]]:
    """Parse a Turtle document into a Graph.

    ``base_prefixes`` supplies ambient prefix bindings for excerpt documents
    that omit their own ``@prefix`` block; directives in the text override
    them. Raises TurtleSyntaxError / UndefinedPrefixError with 1-based
    positions on bad input.
    """
    parser = _Parser(_Lexer(text).tokens(), base_prefixes)
    parser.parse()
    return Graph(parser.triples, parser.prefixes), parser.diagnostics


_BARE_INT = "0123456789"


def _is_bare_integer(lex: str) -> bool:
    body = lex[1:] if lex[:1] in "+-" else lex
    return bool(body) and all(c in _BARE_INT for c in body)


def _is_bare_decimal(lex: str) -> bool:
    body = lex[1:] if lex[:1] in "+-" else lex
    head, dot, tail = body.partition(".")
    return dot == "." and bool(tail) and all(c in _BARE_INT for c in head + tail)


def _local_ok(local: str) -> bool:
    return local == "" or (_is_name_start(local[0]) and all(_is_name_char(c) for c in local))


class _Writer:
    def __init__(self, graph: Graph):
        self.graph = graph
        self.namespaces = sorted(graph.prefixes.items(), key=lambda kv: (-len(kv[1]), kv[0]))
        object_refs: dict[BlankNode, int] = {}
        for t in graph:
            if isinstance(t.object, BlankNode):
                object_refs[t.object] = object_refs.get(t.object, 0) + 1
        self.inline: set[BlankNode] = {b for b, n in object_refs.items() if n == 1}
        self._drop_inline_cycles()

    def _drop_inline_cycles(self) -> None:
        # A node may only be inlined if following single-reference links never
        # returns to it; cyclic chains fall back to labeled statements.
        def reaches(start: BlankNode, node: BlankNode, seen: frozenset) -> bool:
            if node in seen:
                return False
            for t in self.graph.match(node, None, None):
                if isinstance(t.object, BlankNode) and t.object in self.inline:
                    if t.object == start or reaches(start, t.object, seen | {node}):
                        return True
            return False

        for b in sorted(self.inline, key=lambda x: x.label):
            if reaches(b, b, frozenset()):
                self.inline.discard(b)

    def _abbreviate(self, iri: Iri) -> str:
        if iri.value == RDF_TYPE:
            return "a"
        for prefix, ns in self.namespaces:
            if iri.value.startswith(ns):
                local = iri.value[len(ns):]
                if _local_ok(local):
                    return f"{prefix}:{local}"
        return f"<{iri.value}>"

    def _literal(self, lit: Literal) -> str:
        dt = lit.datatype.value
        if lit.language is None:
            if dt == XSD_INTEGER and _is_bare_integer(lit.lexical):
                return lit.lexical
            if dt == XSD_DECIMAL and _is_bare_decimal(lit.lexical):
                return lit.lexical
            if dt == XSD_BOOLEAN and lit.lexical in ("true", "false"):
                return lit.lexical
        quoted = '"' + (
            lit.lexical.replace("\\", "\\\\").replace('"', '\\"')
            .replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")
        ) + '"'
        if lit.language is not None:
            return f"{quoted}@{lit.language}"
        if dt in (XSD_STRING, RDF_LANG_STRING):
            return quoted
        return f"{quoted}^^{self._abbreviate(lit.datatype)}"

    def _term(self, term: Term, indent: str) -> str:
        if isinstance(term, Iri):
            return self._abbreviate(term)
        if isinstance(term, Literal):
            return self._literal(term)
        if term in self.inline:
            return self._property_list(term, indent)
        return f"_:{term.label}"

    def _property_list(self, node: BlankNode, indent: str) -> str:
        triples = self.graph.match(node, None, None)
        if not triples:
            return "[]"
        inner = indent + "    "
        parts = self._predicate_objects(node, inner)
        return "[ " + (" ;\n" + inner).join(parts) + " ]"

    def _predicate_objects(self, subject, indent: str) -> list[str]:
        by_pred: dict[Iri, list[Term]] = {}
        for t in self.graph.match(subject, None, None):
            by_pred.setdefault(t.predicate, []).append(t.object)
        # rdf:type renders first as 'a'; the rest sort by abbreviated text.
        def pred_key(p: Iri) -> tuple:
            return (p.value != RDF_TYPE, self._abbreviate(p))

        parts = []
        for pred in sorted(by_pred, key=pred_key):
            objs = sorted(by_pred[pred], key=term_sort_key)
            rendered = ", ".join(self._term(o, indent) for o in objs)
            parts.append(f"{self._abbreviate(pred)} {rendered}")
        return parts

    def write(self) -> str:
        lines = [f"@prefix {p}: <{ns}> ." for p, ns in sorted(self.graph.prefixes.items())]
        if lines:
            lines.append("")

        subjects: list[Term] = []
        for t in self.graph:
            if t.subject not in subjects:
                subjects.append(t.subject)
        subjects.sort(key=term_sort_key)

        for subject in subjects:
            if isinstance(subject, BlankNode) and subject in self.inline:
                continue
            head = self._term(subject, "") if not isinstance(subject, BlankNode) else f"_:{subject.label}"
            parts = self._predicate_objects(subject, "    ")
            body = (" ;\n    ").join(parts)
            lines.append(f"{head} {body} .")
        return "\n".join(lines) + "\n"


def serialize_turtle(graph: Graph) -> str:
    """Deterministic Turtle text that reparses to a graph isomorphic to ``graph``."""
    return _Writer(graph).write()


def format_triples(triples: Iterable[Triple]) -> str:
    """Debug helper: one N-Triples-style line per triple."""
    return "\n".join(str(t) for t in sorted(triples, key=lambda t: str(t)))
