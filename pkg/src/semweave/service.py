"""HTTP facade over the catalog, query, specification, and run layers.

The service owns mutable state the library deliberately avoids: named
specification sessions with optimistic-concurrency revisions, and a
bounded FIFO pool of materialization jobs. Sessions survive restarts by
being persisted as ordinary specification documents in the state
directory; everything else is reconstructed from the catalog.

Physical data access happens only inside materialization jobs. All
catalog, query, schema, and suggestion endpoints operate on metadata
alone.
"""

from __future__ import annotations

import json
import re
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse, Response

from .catalog import (
    AttributeProfile,
    Catalog,
    DatabaseAccess,
    DatasetProfile,
    DomainModel,
    TextFileAccess,
    _kind_of,
    validate,
)
from .codes import ExtractorKind, SemanticKind, ServiceCode, SpecCode
from .dataspec import (
    Column,
    DataSpecification,
    add_step,
    load_spec,
    new_spec,
    replay,
    save_spec,
    step_from_json,
)
from .errors import ParseError, SpecError, UndefinedPrefixError
from .materializer import Table, materialize, render_cell, write_csv
from .sparql import evaluate, parse_query
from .terms import XSD_STRING, BlankNode, Iri, Literal, Term

SESSION_ID_PATTERN = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]{0,63}$")

SPEC_SUFFIX = ".spec.jsonl"
META_SUFFIX = ".meta.json"


# ---------------------------------------------------------------------------
# JSON shapes
# ---------------------------------------------------------------------------

def term_json(term: Term) -> dict:
    if isinstance(term, Iri):
        return {"type": "iri", "value": term.value}
    if isinstance(term, BlankNode):
        return {"type": "bnode", "value": term.label}
    assert isinstance(term, Literal)
    body: dict = {"type": "literal", "value": term.lexical}
    if term.language is not None:
        body["language"] = term.language
    elif term.datatype.value != XSD_STRING:
        body["datatype"] = term.datatype.value
    return body


def access_json(access) -> Optional[dict]:
    if access is None:
        return None
    if isinstance(access, TextFileAccess):
        return {"kind": access.kind.value, "location": access.location,
                "mediaType": access.media_type, "separator": access.separator,
                "hasHeader": access.has_header}
    assert isinstance(access, DatabaseAccess)
    return {"kind": access.kind.value, "connection": access.connection,
            "table": access.table}


def statistics_json(stats) -> Optional[dict]:
    if stats is None:
        return None
    return {"count": stats.count, "nullCount": stats.null_count,
            "distinctCount": stats.distinct_count, "mean": stats.mean,
            "min": stats.minimum, "max": stats.maximum,
            "numeric": stats.numeric}


def attribute_json(attr: AttributeProfile, dm: DomainModel) -> dict:
    kind = _kind_of(attr, dm)
    return {
        "identifier": attr.identifier,
        "label": attr.label,
        "columnNumber": attr.column_number,
        "columnName": attr.column_name,
        "mapping": None if attr.mapping is None else {
            "property": attr.mapping.property.value,
            "domainClass": attr.mapping.domain_class.value,
        },
        "semanticKind": None if kind is None else kind.value,
        "statistics": statistics_json(attr.statistics),
    }


def dataset_json(ds: DatasetProfile, dm: DomainModel) -> dict:
    return {
        "iri": ds.iri.value,
        "title": ds.title,
        "temporal": None if ds.temporal is None else
        {"start": ds.temporal[0], "end": ds.temporal[1]},
        "access": access_json(ds.access),
        "attributeCount": len(ds.attributes),
        "numberOfInstances": None if ds.statistics is None else
        ds.statistics.number_of_instances,
    }


def column_json(column: Column) -> dict:
    return {
        "name": column.name,
        "semanticKind": None if column.kind is None else column.kind.value,
        "mappedProperty": None if column.mapped_property is None else
        column.mapped_property.value,
        "mappedDomain": None if column.mapped_domain is None else
        column.mapped_domain.value,
        "sourceDataset": None if column.source_dataset is None else
        column.source_dataset.value,
        "sourceStep": column.source_step,
        "columnNumber": column.column_number,
        "extractor": None if column.extractor is None else
        column.extractor.value,
        "sourceColumn": column.source_column,
    }


def schema_json(schema) -> list[dict]:
    return [column_json(c) for c in schema]


def error_json(code, message: str, status: int, **extra) -> JSONResponse:
    body = {"code": code.value if hasattr(code, "value") else str(code),
            "message": message}
    body.update({k: v for k, v in extra.items() if v is not None})
    return JSONResponse(body, status_code=status)


def spec_error_json(exc: SpecError, status: int = 422) -> JSONResponse:
    return error_json(exc.code, str(exc), status,
                      column=exc.column, step=exc.step)


# ---------------------------------------------------------------------------
# Sessions and jobs
# ---------------------------------------------------------------------------

@dataclass
class Session:
    spec: DataSpecification
    revision: int = 0


@dataclass
class Job:
    id: str
    spec_id: str
    status: str = "queued"  # queued | running | done | failed
    error: Optional[dict] = None
    table: Optional[Table] = None
    csv_text: Optional[str] = None


class SessionStore:
    """Sessions kept in memory and mirrored as documents on disk."""

    def __init__(self, state_dir: Optional[Path], catalog: Catalog,
                 dm: DomainModel):
        self._dir = state_dir
        self._catalog = catalog
        self._dm = dm
        self.sessions: dict[str, Session] = {}
        if state_dir is not None:
            state_dir.mkdir(parents=True, exist_ok=True)
            self._restore()

    def _restore(self) -> None:
        assert self._dir is not None
        for path in sorted(self._dir.glob(f"*{SPEC_SUFFIX}")):
            spec_id = path.name[:-len(SPEC_SUFFIX)]
            try:
                spec, _ = load_spec(path.read_text(encoding="utf-8"),
                                    self._catalog, self._dm)
            except SpecError:
                # A document the current catalog can no longer replay is
                # left on disk but not resumed.
                continue
            revision = len(spec.steps)
            meta = path.with_name(spec_id + META_SUFFIX)
            if meta.exists():
                try:
                    revision = int(json.loads(
                        meta.read_text(encoding="utf-8"))["revision"])
                except (ValueError, KeyError, json.JSONDecodeError):
                    pass
            self.sessions[spec_id] = Session(spec=spec, revision=revision)

    def persist(self, spec_id: str) -> None:
        if self._dir is None:
            return
        session = self.sessions[spec_id]
        spec_path = self._dir / (spec_id + SPEC_SUFFIX)
        spec_path.write_text(save_spec(session.spec), encoding="utf-8")
        meta_path = self._dir / (spec_id + META_SUFFIX)
        meta_path.write_text(json.dumps({"revision": session.revision}),
                             encoding="utf-8")


# ---------------------------------------------------------------------------
# Application factory
# ---------------------------------------------------------------------------

def create_app(catalog: Catalog, dm: DomainModel, data_root: Path,
               state_dir: Optional[Path] = None, max_workers: int = 2,
               cors_origins: tuple[str, ...] = ()) -> FastAPI:
    app = FastAPI(title="semweave", docs_url=None, redoc_url=None)
    if cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(CORSMiddleware, allow_origins=list(cors_origins),
                           allow_methods=["*"], allow_headers=["*"])

    store = SessionStore(state_dir, catalog, dm)
    jobs: dict[str, Job] = {}
    lock = threading.Lock()
    executor = ThreadPoolExecutor(max_workers=max_workers)
    app.state.executor = executor

    datasets_by_iri = {ds.iri.value: ds for ds in catalog.datasets}

    def not_found(kind: str, name: str) -> JSONResponse:
        return error_json(ServiceCode.NOT_FOUND, f"unknown {kind}: {name}", 404)

    async def read_json_body(request: Request) -> Optional[dict]:
        raw = await request.body()
        if not raw:
            return {}
        try:
            body = json.loads(raw)
        except json.JSONDecodeError:
            return None
        return body if isinstance(body, dict) else None

    # -- catalog ------------------------------------------------------------

    @app.get("/catalog")
    def get_catalog():
        return {"iri": None if catalog.iri is None else catalog.iri.value,
                "datasets": [dataset_json(ds, dm) for ds in catalog.datasets]}

    @app.get("/catalog/datasets")
    def list_datasets():
        return [dataset_json(ds, dm) for ds in catalog.datasets]

    @app.get("/catalog/datasets/{iri:path}/attributes")
    def dataset_attributes(iri: str):
        ds = datasets_by_iri.get(iri)
        if ds is None:
            return not_found("dataset", iri)
        return {"dataset": ds.iri.value,
                "attributes": [attribute_json(a, dm) for a in ds.attributes]}

    @app.get("/catalog/validate")
    def validate_catalog():
        violations = validate(catalog, dm)
        return {"violations": [
            {"kind": v.kind.value,
             "subject": str(v.subject) if not isinstance(v.subject, Iri)
             else v.subject.value,
             "message": v.message}
            for v in violations]}

    # -- queries ------------------------------------------------------------

    @app.post("/query")
    async def run_query(request: Request):
        body = await read_json_body(request)
        if body is None or not isinstance(body.get("query"), str):
            return error_json(ServiceCode.INVALID_BODY,
                              "body must be JSON with a string 'query'", 422)
        try:
            # Catalog prefixes are ambient, so clients may omit PREFIX lines.
            query = parse_query(body["query"], prefixes=catalog.graph.prefixes)
        except (ParseError, UndefinedPrefixError) as exc:
            return error_json(ServiceCode.QUERY_SYNTAX, str(exc), 422)
        solutions = evaluate(query, catalog.graph)
        return {
            "variables": [v.name for v in query.variables],
            "solutions": [
                {var.name: term_json(term) for var, term in solution.items()}
                for solution in solutions],
        }

    # -- specification sessions ---------------------------------------------

    def get_session(spec_id: str) -> Optional[Session]:
        return store.sessions.get(spec_id)

    def session_json(spec_id: str, session: Session, **extra) -> dict:
        schema = replay(session.spec, catalog, dm).schema()
        body = {"id": spec_id, "revision": session.revision,
                "steps": len(session.spec.steps),
                "schema": schema_json(schema)}
        body.update(extra)
        return body

    def check_revision(session: Session, body: dict) -> Optional[JSONResponse]:
        supplied = body.get("revision")
        if supplied is None:
            return None
        if not isinstance(supplied, int) or isinstance(supplied, bool):
            return error_json(ServiceCode.INVALID_BODY,
                              "revision must be an integer", 422)
        if supplied != session.revision:
            return error_json(
                ServiceCode.STALE_REVISION,
                f"revision {supplied} is stale; current is {session.revision}",
                409, revision=session.revision)
        return None

    @app.post("/specs", status_code=201)
    async def create_spec(request: Request):
        body = await read_json_body(request)
        if body is None:
            return error_json(ServiceCode.INVALID_BODY,
                              "body must be a JSON object", 422)
        spec_id = body.get("id")
        if spec_id is None:
            spec_id = uuid.uuid4().hex
        elif (not isinstance(spec_id, str)
              or not SESSION_ID_PATTERN.match(spec_id)):
            return error_json(
                SpecCode.INVALID_PARAM,
                "id must be 1-64 characters of letters, digits, '.', '_', '-'",
                422)
        with lock:
            if spec_id in store.sessions:
                return error_json(ServiceCode.SESSION_EXISTS,
                                  f"specification {spec_id!r} already exists",
                                  409)
            session = Session(spec=new_spec(catalog, spec_id=spec_id))
            store.sessions[spec_id] = session
            store.persist(spec_id)
            return session_json(spec_id, session)

    @app.get("/specs")
    def list_specs():
        with lock:
            return [{"id": spec_id, "revision": session.revision,
                     "steps": len(session.spec.steps)}
                    for spec_id, session in sorted(store.sessions.items())]

    @app.get("/specs/{spec_id}")
    def get_spec(spec_id: str):
        session = get_session(spec_id)
        if session is None:
            return not_found("specification", spec_id)
        with lock:
            return session_json(spec_id, session)

    @app.post("/specs/{spec_id}/steps")
    async def append_step(spec_id: str, request: Request):
        session = get_session(spec_id)
        if session is None:
            return not_found("specification", spec_id)
        body = await read_json_body(request)
        if body is None or not isinstance(body.get("step"), dict):
            return error_json(ServiceCode.INVALID_BODY,
                              "body must be JSON with an object 'step'", 422)
        with lock:
            stale = check_revision(session, body)
            if stale is not None:
                return stale
            try:
                step = step_from_json(body["step"])
                extended, schema = add_step(session.spec, step, catalog, dm)
            except SpecError as exc:
                return spec_error_json(exc)
            session.spec = extended
            session.revision += 1
            store.persist(spec_id)
            return {"id": spec_id, "revision": session.revision,
                    "steps": len(extended.steps),
                    "schema": schema_json(schema)}

    @app.delete("/specs/{spec_id}/steps/last")
    def undo_step(spec_id: str, revision: Optional[int] = None):
        session = get_session(spec_id)
        if session is None:
            return not_found("specification", spec_id)
        with lock:
            if revision is not None and revision != session.revision:
                return error_json(
                    ServiceCode.STALE_REVISION,
                    f"revision {revision} is stale; current is "
                    f"{session.revision}", 409, revision=session.revision)
            if not session.spec.steps:
                return error_json(ServiceCode.NOTHING_TO_UNDO,
                                  "the specification has no steps", 409)
            session.spec = replace(session.spec,
                                   steps=session.spec.steps[:-1])
            session.revision += 1
            store.persist(spec_id)
            return session_json(spec_id, session)

    @app.get("/specs/{spec_id}/schema")
    def spec_schema(spec_id: str):
        session = get_session(spec_id)
        if session is None:
            return not_found("specification", spec_id)
        with lock:
            return session_json(spec_id, session)

    @app.get("/specs/{spec_id}/suggestions")
    def spec_suggestions(spec_id: str):
        session = get_session(spec_id)
        if session is None:
            return not_found("specification", spec_id)
        with lock:
            state = replay(session.spec, catalog, dm)
            extractions = []
            for column in state.schema():
                if column.kind != SemanticKind.TIMESTAMP:
                    continue
                for extractor in (ExtractorKind.WEEKDAY,
                                  ExtractorKind.HOUR_OF_DAY):
                    extractions.append({
                        "step": "extractFeature",
                        "column": column.name,
                        "extractor": extractor.value,
                    })
            integrations = []
            open_lineages = [l for l in state.lineages if not l.consumed]
            for left in open_lineages:
                for right in open_lineages:
                    if left.index == right.index:
                        continue
                    if (left.point_source is not None
                            and right.polyline_source is not None):
                        integrations.append({
                            "step": "integrateDatasets",
                            "left": left.index,
                            "right": right.index,
                            "kind": "SPATIAL_NEAREST",
                            "maxDistanceMeters": 50.0,
                            "pointDataset": left.point_source.value,
                            "polylineDataset": right.polyline_source.value,
                        })
            return {"extractions": extractions, "integrations": integrations}

    @app.get("/specs/{spec_id}/export")
    def export_spec(spec_id: str):
        session = get_session(spec_id)
        if session is None:
            return not_found("specification", spec_id)
        with lock:
            document = save_spec(session.spec)
        return PlainTextResponse(document, media_type="application/x-ndjson")

    @app.post("/specs/import", status_code=201)
    async def import_spec(request: Request):
        raw = await request.body()
        document = raw.decode("utf-8", errors="replace")
        try:
            spec, diagnostics = load_spec(document, catalog, dm)
        except SpecError as exc:
            return spec_error_json(exc)
        with lock:
            spec_id = spec.id
            if (not SESSION_ID_PATTERN.match(spec_id)
                    or spec_id in store.sessions):
                spec_id = uuid.uuid4().hex
                spec = replace(spec, id=spec_id)
            session = Session(spec=spec, revision=len(spec.steps))
            store.sessions[spec_id] = session
            store.persist(spec_id)
            return session_json(
                spec_id, session,
                warnings=[{"severity": d.severity, "message": d.message}
                          for d in diagnostics])

    # -- materialization jobs -----------------------------------------------

    def run_job(job: Job, spec: DataSpecification) -> None:
        job.status = "running"
        try:
            table = materialize(spec, catalog, dm, data_root)
            job.table = table
            job.csv_text = write_csv(table)
            job.status = "done"
        except SpecError as exc:
            job.error = {"code": exc.code.value, "message": str(exc)}
            job.status = "failed"
        except Exception as exc:  # adapter and I/O failures
            job.error = {"code": "RUN_FAILED", "message": str(exc)}
            job.status = "failed"

    @app.post("/specs/{spec_id}/materialize", status_code=202)
    async def materialize_spec(spec_id: str, request: Request):
        session = get_session(spec_id)
        if session is None:
            return not_found("specification", spec_id)
        body = await read_json_body(request)
        if body is None:
            return error_json(ServiceCode.INVALID_BODY,
                              "body must be a JSON object", 422)
        with lock:
            stale = check_revision(session, body)
            if stale is not None:
                return stale
            try:
                replay(session.spec, catalog, dm)
                if not session.spec.steps:
                    raise SpecError(SpecCode.NO_ACTIVE_LINEAGE,
                                    "empty specification cannot be materialized")
            except SpecError as exc:
                return spec_error_json(exc, status=409)
            job = Job(id=uuid.uuid4().hex, spec_id=spec_id)
            jobs[job.id] = job
            executor.submit(run_job, job, session.spec)
            return {"jobId": job.id, "status": job.status,
                    "revision": session.revision}

    @app.get("/jobs/{job_id}")
    def job_status(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            return not_found("job", job_id)
        body = {"id": job.id, "spec": job.spec_id, "status": job.status}
        if job.error is not None:
            body["error"] = job.error
        if job.table is not None:
            body["rowCount"] = len(job.table.rows)
        return body

    @app.get("/jobs/{job_id}/result")
    def job_result(job_id: str, limit: int = 100):
        job = jobs.get(job_id)
        if job is None:
            return not_found("job", job_id)
        if job.status == "failed":
            assert job.error is not None
            return error_json(ServiceCode.JOB_FAILED, job.error["message"],
                              409, cause=job.error["code"])
        if job.status != "done":
            return error_json(ServiceCode.JOB_NOT_FINISHED,
                              f"job is {job.status}", 409)
        table = job.table
        assert table is not None
        limit = max(0, limit)
        return {
            "columns": schema_json(table.columns),
            "rows": [[render_cell(cell) for cell in row]
                     for row in table.rows[:limit]],
            "totalRows": len(table.rows),
            "diagnostics": [{"severity": d.severity, "message": d.message}
                            for d in table.diagnostics],
        }

    @app.get("/jobs/{job_id}/download")
    def job_download(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            return not_found("job", job_id)
        if job.status != "done":
            return error_json(ServiceCode.JOB_NOT_FINISHED,
                              f"job is {job.status}", 409)
        assert job.csv_text is not None
        return Response(
            job.csv_text, media_type="text/csv",
            headers={"Content-Disposition":
                     f'attachment; filename="{job.spec_id}.csv"'})

    return app
