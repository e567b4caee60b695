"""SELECT-query subset: basic graph patterns, OPTIONAL, simple FILTERs.

The fragment covers what catalog queries need: PREFIX declarations, a SELECT
projection, required triple patterns, OPTIONAL groups (left join), FILTER
comparisons on one variable, and blank-node property lists in patterns,
which desugar to fresh non-projected variables. No DISTINCT, ORDER BY,
LIMIT, UNION or aggregates; results are returned in a deterministic
lexicographic order instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

from .errors import Diagnostic, SparqlSyntaxError, UndefinedPrefixError
from .graph import Graph
from .terms import (
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DATE,
    XSD_DECIMAL,
    XSD_INTEGER,
    BlankNode,
    Iri,
    Literal,
    Term,
    term_sort_key,
)

MAX_GROUP_DEPTH = 4
COMPARISON_OPS = ("<=", ">=", "!=", "=", "<", ">")


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


PatternTerm = Union[Term, Variable]


@dataclass(frozen=True)
class TriplePattern:
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm


@dataclass(frozen=True)
class FilterExpr:
    var: Variable
    op: str
    value: Union[Literal, Iri]


@dataclass
class GroupPattern:
    required: list[TriplePattern] = field(default_factory=list)
    optionals: list["GroupPattern"] = field(default_factory=list)
    filters: list[FilterExpr] = field(default_factory=list)

    def variables(self) -> set[Variable]:
        found: set[Variable] = set()
        for tp in self.required:
            for term in (tp.subject, tp.predicate, tp.object):
                if isinstance(term, Variable):
                    found.add(term)
        for opt in self.optionals:
            found |= opt.variables()
        return found


@dataclass
class Query:
    variables: list[Variable]
    pattern: GroupPattern
    prefixes: dict[str, str] = field(default_factory=dict)
    warnings: list[Diagnostic] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Tok:
    kind: str
    value: str
    line: int
    column: int


_PUNCT = {".": "DOT", ";": "SEMI", ",": "COMMA", "[": "LBRACKET", "]": "RBRACKET",
          "{": "LBRACE", "}": "RBRACE", "(": "LPAREN", ")": "RPAREN"}
_KEYWORDS = {"select", "where", "optional", "filter", "prefix"}


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col, i = 1, 1, 0

    def error(message: str, **kw):
        raise SparqlSyntaxError(message, line, col, **kw)

    def step(n: int = 1) -> str:
        nonlocal i, line, col
        chunk = text[i:i + n]
        for c in chunk:
            if c == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += n
        return chunk

    while i < len(text):
        c = text[i]
        if c.isspace():
            step()
            continue
        if c == "#":
            while i < len(text) and text[i] != "\n":
                step()
            continue
        start_line, start_col = line, col
        if c in _PUNCT:
            # A dot between digits belongs to a decimal literal, handled below.
            toks.append(_Tok(_PUNCT[c], c, start_line, start_col))
            step()
            continue
        if c == "?" or c == "$":
            step()
            name = ""
            while i < len(text) and (text[i].isalnum() or text[i] == "_"):
                name += step()
            if not name:
                error("variable name missing")
            toks.append(_Tok("VAR", name, start_line, start_col))
            continue
        if c == "<":
            # '<' opens an IRI only when glued to IRI text; '< ', '<=' and
            # '<5' are comparison operators.
            nxt = text[i + 1:i + 2]
            if nxt == "=":
                step(2)
                toks.append(_Tok("OP", "<=", start_line, start_col))
                continue
            if nxt == "" or nxt.isspace() or nxt.isdigit() or nxt in '?"$+-':
                step()
                toks.append(_Tok("OP", "<", start_line, start_col))
                continue
            step()
            iri = ""
            while i < len(text) and text[i] != ">":
                if text[i].isspace():
                    error("whitespace inside IRI")
                iri += step()
            if i >= len(text):
                error("unterminated IRI", expected="'>'")
            step()
            toks.append(_Tok("IRIREF", iri, start_line, start_col))
            continue
        if c == '"':
            step()
            out = ""
            while True:
                if i >= len(text) or text[i] == "\n":
                    error("unterminated string literal", expected="closing '\"'")
                if text[i] == '"':
                    step()
                    break
                if text[i] == "\\":
                    step()
                    esc = step()
                    mapped = {"t": "\t", "n": "\n", "r": "\r", '"': '"', "'": "'", "\\": "\\"}.get(esc)
                    if mapped is None:
                        error(f"unknown escape '\\{esc}'")
                    out += mapped
                else:
                    out += step()
            toks.append(_Tok("STRING", out, start_line, start_col))
            continue
        if c == "@":
            step()
            tag = ""
            while i < len(text) and (text[i].isalnum() or text[i] == "-"):
                tag += step()
            if not tag:
                error("language tag missing")
            toks.append(_Tok("LANGTAG", tag, start_line, start_col))
            continue
        if c == "^":
            if text[i:i + 2] == "^^":
                step(2)
                toks.append(_Tok("DTYPE", "^^", start_line, start_col))
                continue
            error("lone '^'", expected="'^^'")
        for op in COMPARISON_OPS:
            if text.startswith(op, i):
                step(len(op))
                toks.append(_Tok("OP", op, start_line, start_col))
                break
        else:
            if c.isdigit() or (c in "+-" and i + 1 < len(text) and text[i + 1].isdigit()):
                num = ""
                if c in "+-":
                    num += step()
                while i < len(text) and text[i].isdigit():
                    num += step()
                if text[i:i + 1] == "." and text[i + 1:i + 2].isdigit():
                    num += step()
                    while i < len(text) and text[i].isdigit():
                        num += step()
                    toks.append(_Tok("DECIMAL", num, start_line, start_col))
                else:
                    toks.append(_Tok("INTEGER", num, start_line, start_col))
                continue
            if c.isalpha() or c == "_" or c == ":":
                name = ""
                while i < len(text) and (text[i].isalnum() or text[i] in "_-"):
                    name += step()
                if text[i:i + 1] == ":":
                    step()
                    local = ""
                    while i < len(text) and (text[i].isalnum() or text[i] in "_-"):
                        local += step()
                    toks.append(_Tok("PNAME", f"{name}:{local}", start_line, start_col))
                    continue
                lowered = name.lower()
                if lowered in _KEYWORDS:
                    toks.append(_Tok(lowered.upper(), name, start_line, start_col))
                elif name == "a":
                    toks.append(_Tok("A", name, start_line, start_col))
                elif name in ("true", "false"):
                    toks.append(_Tok("BOOLEAN", name, start_line, start_col))
                else:
                    error("bare name is not valid here", token=name)
                continue
            error("unexpected character", token=c)
    toks.append(_Tok("EOF", "", line, col))
    return toks


class _QueryParser:
    def __init__(self, tokens: list[_Tok], base_prefixes: Mapping[str, str] | None):
        self.tokens = tokens
        self.pos = 0
        self.prefixes: dict[str, str] = dict(base_prefixes or {})
        self._anon = 0

    def _peek(self) -> _Tok:
        return self.tokens[self.pos]

    def _take(self) -> _Tok:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def _expect(self, kind: str, expected: str) -> _Tok:
        tok = self._take()
        if tok.kind != kind:
            raise SparqlSyntaxError("unexpected token", tok.line, tok.column,
                                    token=tok.value or tok.kind, expected=expected)
        return tok

    def _fresh_var(self) -> Variable:
        # Property-list placeholders use a dotted name a user query cannot
        # spell, so they can never collide with projected variables.
        var = Variable(f".b{self._anon}")
        self._anon += 1
        return var

    def parse(self) -> Query:
        while self._peek().kind == "PREFIX":
            self._take()
            pname = self._expect("PNAME", "prefix label ending in ':'")
            prefix, _, local = pname.value.partition(":")
            if local:
                raise SparqlSyntaxError("prefix declaration must end in ':'",
                                        pname.line, pname.column, token=pname.value)
            iri = self._expect("IRIREF", "namespace IRI")
            self.prefixes[prefix] = iri.value
        self._expect("SELECT", "'SELECT'")
        variables: list[Variable] = []
        while self._peek().kind == "VAR":
            variables.append(Variable(self._take().value))
        if not variables:
            tok = self._peek()
            raise SparqlSyntaxError("projection needs at least one variable",
                                    tok.line, tok.column, token=tok.value or tok.kind,
                                    expected="'?name'")
        self._expect("WHERE", "'WHERE'")
        pattern = self._parse_group(depth=1)
        tok = self._peek()
        if tok.kind != "EOF":
            raise SparqlSyntaxError("trailing input after query", tok.line, tok.column,
                                    token=tok.value or tok.kind)

        warnings = []
        in_pattern = pattern.variables()
        for var in variables:
            if var not in in_pattern:
                warnings.append(Diagnostic(
                    "warning", f"projected variable ?{var.name} never appears in the pattern"))
        return Query(variables, pattern, self.prefixes, warnings)

    def _parse_group(self, depth: int) -> GroupPattern:
        if depth > MAX_GROUP_DEPTH:
            tok = self._peek()
            raise SparqlSyntaxError(f"groups nest deeper than {MAX_GROUP_DEPTH}",
                                    tok.line, tok.column)
        self._expect("LBRACE", "'{'")
        group = GroupPattern()
        while True:
            tok = self._peek()
            if tok.kind == "RBRACE":
                self._take()
                return group
            if tok.kind == "EOF":
                raise SparqlSyntaxError("unterminated group", tok.line, tok.column,
                                        expected="'}'")
            if tok.kind == "OPTIONAL":
                self._take()
                group.optionals.append(self._parse_group(depth + 1))
                continue
            if tok.kind == "FILTER":
                self._take()
                group.filters.append(self._parse_filter())
                continue
            self._parse_triples_statement(group)
            # The separating dot is optional before '}' and group keywords.
            if self._peek().kind == "DOT":
                self._take()

    def _parse_filter(self) -> FilterExpr:
        self._expect("LPAREN", "'('")
        var_tok = self._expect("VAR", "a variable")
        op_tok = self._expect("OP", "a comparison operator")
        value = self._parse_term(allow_var=False)
        if isinstance(value, BlankNode):
            raise SparqlSyntaxError("blank node cannot appear in a FILTER",
                                    op_tok.line, op_tok.column)
        self._expect("RPAREN", "')'")
        return FilterExpr(Variable(var_tok.value), op_tok.value, value)

    def _parse_triples_statement(self, group: GroupPattern) -> None:
        tok = self._peek()
        if tok.kind == "LBRACKET":
            subject: PatternTerm = self._parse_property_list(group)
        else:
            subject = self._parse_term(allow_var=True)
            if isinstance(subject, Literal):
                raise SparqlSyntaxError("literal cannot be a subject", tok.line, tok.column,
                                        token=tok.value)
        self._parse_predicate_object_list(subject, group)

    def _parse_predicate_object_list(self, subject: PatternTerm, group: GroupPattern) -> None:
        while True:
            predicate = self._parse_verb()
            while True:
                if self._peek().kind == "LBRACKET":
                    # The linking pattern comes before the bracket's contents,
                    # mirroring the textual order of the query.
                    node = self._fresh_var()
                    group.required.append(TriplePattern(subject, predicate, node))
                    self._parse_property_list_body(node, group)
                else:
                    obj = self._parse_term(allow_var=True)
                    group.required.append(TriplePattern(subject, predicate, obj))
                if self._peek().kind == "COMMA":
                    self._take()
                    continue
                break
            if self._peek().kind == "SEMI":
                while self._peek().kind == "SEMI":
                    self._take()
                if self._peek().kind in ("DOT", "RBRACKET", "RBRACE", "EOF"):
                    return
                continue
            return

    def _parse_verb(self) -> PatternTerm:
        tok = self._peek()
        if tok.kind == "A":
            self._take()
            return Iri(RDF_TYPE)
        term = self._parse_term(allow_var=True)
        if isinstance(term, (Literal, BlankNode)):
            raise SparqlSyntaxError("predicate must be an IRI or variable",
                                    tok.line, tok.column, token=tok.value)
        return term

    def _parse_property_list(self, group: GroupPattern) -> Variable:
        node = self._fresh_var()
        self._parse_property_list_body(node, group)
        return node

    def _parse_property_list_body(self, node: Variable, group: GroupPattern) -> None:
        bracket = self._expect("LBRACKET", "'['")
        if self._peek().kind != "RBRACKET":
            self._parse_predicate_object_list(node, group)
        closing = self._take()
        if closing.kind != "RBRACKET":
            raise SparqlSyntaxError("unexpected token", closing.line, closing.column,
                                    token=closing.value or closing.kind,
                                    expected="']' closing the property list "
                                             f"opened at line {bracket.line}")

    def _parse_term(self, allow_var: bool) -> PatternTerm:
        tok = self._take()
        if tok.kind == "VAR":
            if not allow_var:
                raise SparqlSyntaxError("variable not allowed here", tok.line, tok.column,
                                        token=f"?{tok.value}")
            return Variable(tok.value)
        if tok.kind == "IRIREF":
            return Iri(tok.value)
        if tok.kind == "PNAME":
            prefix, _, local = tok.value.partition(":")
            if prefix not in self.prefixes:
                raise UndefinedPrefixError(prefix, tok.line, tok.column)
            return Iri(self.prefixes[prefix] + local)
        if tok.kind == "STRING":
            nxt = self._peek()
            if nxt.kind == "LANGTAG":
                self._take()
                return Literal(tok.value, language=nxt.value)
            if nxt.kind == "DTYPE":
                self._take()
                dtype = self._parse_term(allow_var=False)
                if not isinstance(dtype, Iri):
                    raise SparqlSyntaxError("datatype must be an IRI", nxt.line, nxt.column)
                return Literal(tok.value, dtype)
            return Literal(tok.value)
        if tok.kind == "INTEGER":
            return Literal(tok.value, Iri(XSD_INTEGER))
        if tok.kind == "DECIMAL":
            return Literal(tok.value, Iri(XSD_DECIMAL))
        if tok.kind == "BOOLEAN":
            return Literal(tok.value, Iri(XSD_BOOLEAN))
        raise SparqlSyntaxError("unexpected token", tok.line, tok.column,
                                token=tok.value or tok.kind,
                                expected="a term or variable")


def parse_query(text: str, prefixes: Mapping[str, str] | None = None) -> Query:
    """Parse a SELECT query. ``prefixes`` seeds ambient namespace bindings."""
    return _QueryParser(_tokenize(text), prefixes).parse()


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

Bindings = dict[Variable, Term]


def _substitute(term: PatternTerm, bindings: Bindings) -> PatternTerm:
    if isinstance(term, Variable):
        return bindings.get(term, term)
    return term


def _match_pattern(tp: TriplePattern, graph: Graph, bindings: Bindings) -> list[Bindings]:
    s = _substitute(tp.subject, bindings)
    p = _substitute(tp.predicate, bindings)
    o = _substitute(tp.object, bindings)
    candidates = graph.match(
        None if isinstance(s, Variable) else s,
        None if isinstance(p, Variable) else p,
        None if isinstance(o, Variable) else o,
    )
    out: list[Bindings] = []
    for triple in candidates:
        extended = dict(bindings)
        ok = True
        for pattern_term, value in ((s, triple.subject), (p, triple.predicate), (o, triple.object)):
            if isinstance(pattern_term, Variable):
                bound = extended.get(pattern_term)
                if bound is None:
                    extended[pattern_term] = value
                elif bound != value:
                    # Same variable twice in one pattern must agree.
                    ok = False
                    break
        if ok:
            out.append(extended)
    return out


def _numeric(term: Term) -> Fraction | None:
    if isinstance(term, Literal) and term.datatype.value in (XSD_INTEGER, XSD_DECIMAL):
        try:
            return Fraction(term.lexical)
        except (ValueError, ZeroDivisionError):
            return None
    return None


def _filter_passes(expr: FilterExpr, bindings: Bindings) -> bool:
    bound = bindings.get(expr.var)
    if bound is None:
        # Comparing an unbound variable is an expression error; errors discard.
        return False
    if expr.op in ("=", "!="):
        equal = _terms_equal(bound, expr.value)
        if equal is None:
            return False
        return equal if expr.op == "=" else not equal
    ordered = _terms_ordered(bound, expr.value)
    if ordered is None:
        return False
    less, equal = ordered
    return {"<": less, "<=": less or equal, ">": not less and not equal,
            ">=": not less}[expr.op]


def _terms_equal(a: Term, b: Term) -> bool | None:
    num_a, num_b = _numeric(a), _numeric(b)
    if num_a is not None and num_b is not None:
        return num_a == num_b
    if isinstance(a, Iri) and isinstance(b, Iri):
        return a == b
    if isinstance(a, Literal) and isinstance(b, Literal):
        if a.datatype == b.datatype and a.language == b.language:
            return a.lexical == b.lexical
        # Different datatypes without numeric promotion: comparison errors,
        # and expression errors discard the solution.
        return None
    return None


def _terms_ordered(a: Term, b: Term) -> tuple[bool, bool] | None:
    """(a < b, a == b) under numeric or date comparison, None if incomparable."""
    num_a, num_b = _numeric(a), _numeric(b)
    if num_a is not None and num_b is not None:
        return (num_a < num_b, num_a == num_b)
    if (isinstance(a, Literal) and isinstance(b, Literal)
            and a.datatype.value == XSD_DATE and b.datatype.value == XSD_DATE):
        # Canonical YYYY-MM-DD forms order correctly as text.
        return (a.lexical < b.lexical, a.lexical == b.lexical)
    return None


def _evaluate_group(group: GroupPattern, graph: Graph, seed: Bindings) -> list[Bindings]:
    solutions = [dict(seed)]
    for tp in group.required:
        solutions = [ext for sol in solutions for ext in _match_pattern(tp, graph, sol)]
        if not solutions:
            break
    for optional in group.optionals:
        joined: list[Bindings] = []
        for sol in solutions:
            extensions = _evaluate_group(optional, graph, sol)
            joined.extend(extensions if extensions else [sol])
        solutions = joined
    for expr in group.filters:
        solutions = [sol for sol in solutions if _filter_passes(expr, sol)]
    return solutions


def _solution_sort_key(variables: list[Variable]):
    def key(sol: Bindings):
        parts = []
        for var in variables:
            term = sol.get(var)
            # Unbound cells sort before any bound term.
            parts.append((-1, "", "", "") if term is None else term_sort_key(term) + ("",) * (4 - len(term_sort_key(term))))
        return tuple(parts)
    return key


def evaluate(query: Query, graph: Graph) -> list[Bindings]:
    """All solutions, projected to the query's variables, deterministically ordered."""
    raw = _evaluate_group(query.pattern, graph, {})
    projected = [
        {var: sol[var] for var in query.variables if var in sol}
        for sol in raw
    ]
    return sorted(projected, key=_solution_sort_key(query.variables))


def format_tsv(query: Query, solutions: list[Bindings]) -> str:
    """Tab-separated results: header of variable names, empty cells when unbound."""
    lines = ["\t".join(f"?{v.name}" for v in query.variables)]
    for sol in solutions:
        cells = []
        for var in query.variables:
            term = sol.get(var)
            if term is None:
                cells.append("")
            elif isinstance(term, Iri):
                cells.append(term.value)
            elif isinstance(term, BlankNode):
                cells.append(f"_:{term.label}")
            else:
                cells.append(term.lexical)
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"
