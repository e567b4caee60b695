"""Command-line entry point.

Conventions:
    * results go to stdout, diagnostics to stderr;
    * every failure prints a machine-parsable ``code: <CODE>`` line on stderr;
    * exit status 0 means success, 1 a validation or typing problem in the
      inputs, 2 an I/O or syntax problem (including usage errors).

The data root for physical files resolves in this order: the
``--data-root`` flag, the ``SEMWEAVE_DATA_ROOT`` environment variable,
then the directory containing the catalog file.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional

from .adapters import open_source
from .catalog import (
    Catalog,
    DomainModel,
    load_catalog,
    load_domain_model,
    validate,
)
from .codes import CliCode
from .dataspec import infer_schema, load_spec
from .errors import (
    AdapterError,
    CatalogError,
    DomainModelError,
    ParseError,
    SpecFormatError,
    SpecReferenceError,
    SpecTypeError,
    UndefinedPrefixError,
    UnknownDatasetError,
)
from .materializer import materialize, write_csv
from .profiler import emit_statistics_triples, profile_dataset
from .sparql import evaluate, format_tsv, parse_query
from .terms import Iri
from .turtle import parse_turtle, serialize_turtle

ENV_DATA_ROOT = "SEMWEAVE_DATA_ROOT"

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2


class CliFailure(Exception):
    def __init__(self, code: CliCode, message: str, exit_code: int):
        self.code = code
        self.exit_code = exit_code
        super().__init__(message)


def _warn(message: str) -> None:
    print(message, file=sys.stderr)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise CliFailure(CliCode.IO_NOT_FOUND, f"no such file: {path}",
                         EXIT_IO) from None
    except OSError as exc:
        raise CliFailure(CliCode.IO_NOT_FOUND, f"cannot read {path}: {exc}",
                         EXIT_IO) from None


def _parse_graph(path: str):
    try:
        graph, diagnostics = parse_turtle(_read_text(path))
    except ParseError as exc:
        raise CliFailure(CliCode.SYNTAX_ERROR, f"{path}: {exc}",
                         EXIT_IO) from None
    for diagnostic in diagnostics:
        _warn(f"{path}: {diagnostic.message}")
    return graph


def _load_catalog(path: str) -> Catalog:
    catalog, diagnostics = load_catalog(_parse_graph(path))
    for diagnostic in diagnostics:
        _warn(f"{path}: {diagnostic.severity}: {diagnostic.message}")
    return catalog


def _load_domain_model(path: Optional[str]) -> DomainModel:
    if path is None:
        from .fixtures import fixture_path

        path = str(fixture_path("mobility-domain.ttl"))
    try:
        return load_domain_model(_parse_graph(path))
    except DomainModelError as exc:
        raise CliFailure(CliCode.VALIDATION_FAILED, f"{path}: {exc}",
                         EXIT_INVALID) from None


def _resolve_data_root(flag: Optional[str], catalog_path: str) -> Path:
    if flag:
        return Path(flag)
    env = os.environ.get(ENV_DATA_ROOT)
    if env:
        return Path(env)
    return Path(catalog_path).resolve().parent


def _dataset(catalog: Catalog, iri: str):
    try:
        return catalog.dataset(Iri(iri))
    except UnknownDatasetError as exc:
        raise CliFailure(CliCode.UNKNOWN_DATASET, str(exc),
                         EXIT_INVALID) from None


def _load_spec_document(path: str, catalog: Catalog, dm: DomainModel):
    try:
        spec, diagnostics = load_spec(_read_text(path), catalog, dm)
    except SpecFormatError as exc:
        raise CliFailure(CliCode.SYNTAX_ERROR, f"{path}: {exc}",
                         EXIT_IO) from None
    for diagnostic in diagnostics:
        _warn(f"{path}: {diagnostic.severity}: {diagnostic.message}")
    return spec


def _write_out(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_catalog_validate(args) -> int:
    catalog = _load_catalog(args.catalog)
    dm = _load_domain_model(args.domain_model)
    violations = validate(catalog, dm)
    for violation in violations:
        subject = (violation.subject.value
                   if isinstance(violation.subject, Iri)
                   else str(violation.subject))
        print(f"{violation.kind.value}\t{subject}\t{violation.message}")
    print(f"{len(violations)} violations")
    if violations:
        raise CliFailure(CliCode.VALIDATION_FAILED,
                         f"catalog has {len(violations)} violations",
                         EXIT_INVALID)
    return EXIT_OK


def cmd_catalog_list(args) -> int:
    catalog = _load_catalog(args.catalog)
    for ds in catalog.datasets:
        print(f"{ds.iri.value}\t{ds.title}")
    return EXIT_OK


def cmd_catalog_describe(args) -> int:
    catalog = _load_catalog(args.catalog)
    ds = _dataset(catalog, args.dataset)
    print(f"dataset\t{ds.iri.value}")
    print(f"title\t{ds.title}")
    if ds.temporal is not None:
        print(f"temporal\t{ds.temporal[0]}\t{ds.temporal[1]}")
    if ds.statistics is not None:
        print(f"instances\t{ds.statistics.number_of_instances}")
    for attr in ds.attributes:
        mapped = "-" if attr.mapping is None else attr.mapping.property.value
        column = "-" if attr.column_number is None else str(attr.column_number)
        print(f"attribute\t{attr.identifier}\t{column}\t{mapped}")
    return EXIT_OK


def cmd_query_run(args) -> int:
    catalog = _load_catalog(args.catalog)
    try:
        query = parse_query(_read_text(args.query),
                            prefixes=catalog.graph.prefixes)
    except (ParseError, UndefinedPrefixError) as exc:
        raise CliFailure(CliCode.SYNTAX_ERROR, f"{args.query}: {exc}",
                         EXIT_IO) from None
    for warning in query.warnings:
        _warn(f"{args.query}: {warning.message}")
    solutions = evaluate(query, catalog.graph)
    sys.stdout.write(format_tsv(query, solutions))
    return EXIT_OK


def cmd_profile(args) -> int:
    catalog = _load_catalog(args.catalog)
    ds = _dataset(catalog, args.dataset)
    data_root = _resolve_data_root(args.data_root, args.catalog)
    try:
        source = open_source(ds.access, data_root)
    except AdapterError as exc:
        raise CliFailure(CliCode.IO_NOT_FOUND, str(exc), EXIT_IO) from None
    result = profile_dataset(ds, source)
    for diagnostic in result.diagnostics:
        _warn(f"{diagnostic.severity}: {diagnostic.message}")
    _write_out(serialize_turtle(emit_statistics_triples(result, ds)), args.out)
    return EXIT_OK


def cmd_spec_check(args) -> int:
    catalog = _load_catalog(args.catalog)
    dm = _load_domain_model(args.domain_model)
    spec = _load_spec_document(args.spec, catalog, dm)
    schema = infer_schema(spec, catalog, dm)
    print(f"ok: {len(spec.steps)} steps, {len(schema)} columns")
    return EXIT_OK


def cmd_spec_schema(args) -> int:
    catalog = _load_catalog(args.catalog)
    dm = _load_domain_model(args.domain_model)
    spec = _load_spec_document(args.spec, catalog, dm)
    print("name\tkind\tdataset\tproperty")
    for column in infer_schema(spec, catalog, dm):
        kind = "-" if column.kind is None else column.kind.value
        dataset = ("-" if column.source_dataset is None
                   else column.source_dataset.value)
        mapped = ("-" if column.mapped_property is None
                  else column.mapped_property.value)
        print(f"{column.name}\t{kind}\t{dataset}\t{mapped}")
    return EXIT_OK


def cmd_materialize(args) -> int:
    catalog = _load_catalog(args.catalog)
    dm = _load_domain_model(args.domain_model)
    spec = _load_spec_document(args.spec, catalog, dm)
    data_root = _resolve_data_root(args.data_root, args.catalog)
    try:
        table = materialize(spec, catalog, dm, data_root)
    except AdapterError as exc:
        raise CliFailure(CliCode.IO_NOT_FOUND, str(exc), EXIT_IO) from None
    for diagnostic in table.diagnostics:
        _warn(f"{diagnostic.severity}: {diagnostic.message}")
    _write_out(write_csv(table), args.out)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    catalog = _load_catalog(args.catalog)
    dm = _load_domain_model(args.domain_model)
    data_root = _resolve_data_root(args.data_root, args.catalog)
    state_dir = Path(args.state_dir) if args.state_dir else None
    app = create_app(catalog, dm, data_root, state_dir=state_dir,
                     max_workers=args.max_workers,
                     cors_origins=tuple(args.cors_origin))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_domain_model_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--domain-model", metavar="FILE", default=None,
        help="domain model Turtle file (default: the bundled mobility model)")


def _add_data_root_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--data-root", metavar="DIR", default=None,
        help=f"directory holding physical data files (default: "
             f"${ENV_DATA_ROOT} or the catalog's directory)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semweave",
        description="Semantic data catalog, specification, and run tools.")
    commands = parser.add_subparsers(dest="command", required=True)

    catalog_cmd = commands.add_parser(
        "catalog", help="inspect and validate catalog files")
    catalog_sub = catalog_cmd.add_subparsers(dest="subcommand", required=True)

    p = catalog_sub.add_parser("validate",
                               help="check a catalog against the domain model")
    p.add_argument("catalog", help="catalog Turtle file")
    _add_domain_model_flag(p)
    p.set_defaults(func=cmd_catalog_validate)

    p = catalog_sub.add_parser("list", help="list datasets")
    p.add_argument("catalog", help="catalog Turtle file")
    p.set_defaults(func=cmd_catalog_list)

    p = catalog_sub.add_parser("describe", help="show a dataset's attributes")
    p.add_argument("catalog", help="catalog Turtle file")
    p.add_argument("dataset", help="dataset IRI")
    p.set_defaults(func=cmd_catalog_describe)

    query_cmd = commands.add_parser("query", help="run queries over a catalog")
    query_sub = query_cmd.add_subparsers(dest="subcommand", required=True)
    p = query_sub.add_parser("run", help="evaluate a query file, print TSV")
    p.add_argument("catalog", help="catalog Turtle file")
    p.add_argument("query", help="query file")
    p.set_defaults(func=cmd_query_run)

    p = commands.add_parser("profile",
                            help="compute dataset statistics as Turtle")
    p.add_argument("catalog", help="catalog Turtle file")
    p.add_argument("dataset", help="dataset IRI")
    p.add_argument("--out", metavar="FILE", default=None,
                   help="write Turtle here instead of stdout")
    _add_data_root_flag(p)
    p.set_defaults(func=cmd_profile)

    spec_cmd = commands.add_parser("spec",
                                   help="check stored specification documents")
    spec_sub = spec_cmd.add_subparsers(dest="subcommand", required=True)
    for name, func, description in (
            ("check", cmd_spec_check, "validate a specification document"),
            ("schema", cmd_spec_schema, "print the result schema as TSV")):
        p = spec_sub.add_parser(name, help=description)
        p.add_argument("catalog", help="catalog Turtle file")
        p.add_argument("spec", help="specification document")
        _add_domain_model_flag(p)
        p.set_defaults(func=func)

    p = commands.add_parser("materialize",
                            help="execute a specification, write CSV")
    p.add_argument("catalog", help="catalog Turtle file")
    p.add_argument("spec", help="specification document")
    p.add_argument("--out", metavar="FILE", default=None,
                   help="write CSV here instead of stdout")
    _add_domain_model_flag(p)
    _add_data_root_flag(p)
    p.set_defaults(func=cmd_materialize)

    p = commands.add_parser("serve", help="start the HTTP service")
    p.add_argument("--catalog", required=True, help="catalog Turtle file")
    _add_domain_model_flag(p)
    _add_data_root_flag(p)
    p.add_argument("--state-dir", metavar="DIR", default=None,
                   help="directory for persisted specification sessions")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--max-workers", type=int, default=2,
                   help="concurrent materialization jobs")
    p.add_argument("--cors-origin", action="append", default=[],
                   metavar="ORIGIN", help="allowed CORS origin (repeatable)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliFailure as exc:
        print(f"code: {exc.code.value}", file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except SpecTypeError as exc:
        print(f"code: {CliCode.TYPE_ERROR.value}", file=sys.stderr)
        print(f"error: [{exc.code.value}] {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SpecReferenceError as exc:
        print(f"code: {CliCode.REFERENCE_ERROR.value}", file=sys.stderr)
        print(f"error: [{exc.code.value}] {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (CatalogError, DomainModelError) as exc:
        print(f"code: {CliCode.VALIDATION_FAILED.value}", file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except BrokenPipeError:
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
