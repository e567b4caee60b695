/**
 * Typed client for the semweave HTTP service.
 *
 * Every exported action is keyed in ENDPOINTS, and the request paths are
 * derived from that registry, so the action-to-endpoint mapping is
 * enforced by construction (and checked by the endpoint-coverage test).
 */

import { apiBase } from "./config.js";

// ---------------------------------------------------------------------------
// Response shapes (mirroring the service's JSON)
// ---------------------------------------------------------------------------

export interface TermJson {
  type: "iri" | "bnode" | "literal";
  value: string;
  language?: string;
  datatype?: string;
}

export interface AccessJson {
  kind: string;
  location?: string | null;
  mediaType?: string | null;
  separator?: string;
  hasHeader?: boolean;
  connection?: string | null;
  table?: string | null;
}

export interface StatisticsJson {
  count: number;
  nullCount: number;
  distinctCount: number;
  mean: string | null;
  min: string | null;
  max: string | null;
  numeric: boolean;
}

export interface AttributeJson {
  identifier: string;
  label: string | null;
  columnNumber: number | null;
  columnName: string | null;
  mapping: { property: string; domainClass: string } | null;
  semanticKind: string | null;
  statistics: StatisticsJson | null;
}

export interface DatasetJson {
  iri: string;
  title: string;
  temporal: { start: string; end: string } | null;
  access: AccessJson | null;
  attributeCount: number;
  numberOfInstances: number | null;
}

export interface ColumnJson {
  name: string;
  semanticKind: string | null;
  mappedProperty: string | null;
  mappedDomain: string | null;
  sourceDataset: string | null;
  sourceStep: number | null;
  columnNumber: number | null;
  extractor: string | null;
  sourceColumn: string | null;
}

export interface SessionJson {
  id: string;
  revision: number;
  steps: number;
  schema: ColumnJson[];
  warnings?: { severity: string; message: string }[];
}

export interface StepResultJson {
  id: string;
  revision: number;
  steps: number;
  schema: ColumnJson[];
}

/** A step in wire form, as stored in specification documents. */
export interface WireStep {
  step: string;
  [field: string]: unknown;
}

export interface ExtractionSuggestion {
  step: "extractFeature";
  column: string;
  extractor: string;
}

export interface IntegrationSuggestion {
  step: "integrateDatasets";
  left: number;
  right: number;
  kind: string;
  maxDistanceMeters: number;
  pointDataset: string;
  polylineDataset: string;
}

export interface SuggestionsJson {
  extractions: ExtractionSuggestion[];
  integrations: IntegrationSuggestion[];
}

export interface QueryResultJson {
  variables: string[];
  solutions: Record<string, TermJson>[];
}

export interface ViolationJson {
  kind: string;
  subject: string;
  message: string;
}

export interface JobJson {
  id: string;
  spec: string;
  status: "queued" | "running" | "done" | "failed";
  error?: { code: string; message: string };
  rowCount?: number;
}

export interface JobResultJson {
  columns: ColumnJson[];
  rows: string[][];
  totalRows: number;
  diagnostics: { severity: string; message: string }[];
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/** A non-2xx response; carries the service's machine-readable code. */
export class ApiError extends Error {
  code: string;
  status: number;
  column?: string;
  step?: number;
  revision?: number;
  cause?: string;

  constructor(status: number, body: Record<string, unknown>) {
    super(typeof body.message === "string" ? body.message : `HTTP ${status}`);
    this.name = "ApiError";
    this.status = status;
    this.code = typeof body.code === "string" ? body.code : "HTTP_ERROR";
    if (typeof body.column === "string") this.column = body.column;
    if (typeof body.step === "number") this.step = body.step;
    if (typeof body.revision === "number") this.revision = body.revision;
    if (typeof body.cause === "string") this.cause = body.cause;
  }
}

// ---------------------------------------------------------------------------
// Endpoint registry and request plumbing
// ---------------------------------------------------------------------------

export const ENDPOINTS = {
  getCatalog: "GET /catalog",
  listDatasets: "GET /catalog/datasets",
  datasetAttributes: "GET /catalog/datasets/{iri}/attributes",
  validateCatalog: "GET /catalog/validate",
  runQuery: "POST /query",
  createSpec: "POST /specs",
  listSpecs: "GET /specs",
  getSpec: "GET /specs/{id}",
  appendStep: "POST /specs/{id}/steps",
  undoStep: "DELETE /specs/{id}/steps/last",
  getSchema: "GET /specs/{id}/schema",
  suggestions: "GET /specs/{id}/suggestions",
  exportSpec: "GET /specs/{id}/export",
  importSpec: "POST /specs/import",
  materialize: "POST /specs/{id}/materialize",
  jobStatus: "GET /jobs/{id}",
  jobResult: "GET /jobs/{id}/result",
  downloadCsv: "GET /jobs/{id}/download",
} as const;

export type EndpointKey = keyof typeof ENDPOINTS;

interface RequestOptions {
  params?: Record<string, string>;
  query?: Record<string, string>;
  body?: unknown;
  rawBody?: string;
  asText?: boolean;
}

function buildUrl(endpoint: string, options: RequestOptions): {
  method: string;
  url: string;
} {
  const [method, template] = endpoint.split(" ", 2);
  let path = template;
  for (const [name, value] of Object.entries(options.params ?? {})) {
    path = path.replace(`{${name}}`, encodeURIComponent(value));
  }
  let url = apiBase() + path;
  if (options.query) {
    url += "?" + new URLSearchParams(options.query).toString();
  }
  return { method, url };
}

async function request<T>(endpoint: string, options: RequestOptions = {}): Promise<T> {
  const { method, url } = buildUrl(endpoint, options);
  const init: RequestInit = { method };
  if (options.rawBody !== undefined) {
    init.body = options.rawBody;
    init.headers = { "content-type": "application/x-ndjson" };
  } else if (options.body !== undefined) {
    init.body = JSON.stringify(options.body);
    init.headers = { "content-type": "application/json" };
  }
  const response = await fetch(url, init);
  if (!response.ok) {
    let body: Record<string, unknown> = {};
    try {
      body = await response.json();
    } catch {
      // non-JSON error body; ApiError falls back to the status line
    }
    throw new ApiError(response.status, body);
  }
  if (options.asText) {
    return (await response.text()) as T;
  }
  return (await response.json()) as T;
}

// ---------------------------------------------------------------------------
// Actions
// ---------------------------------------------------------------------------

export const api = {
  getCatalog(): Promise<{ iri: string | null; datasets: DatasetJson[] }> {
    return request(ENDPOINTS.getCatalog);
  },

  listDatasets(): Promise<DatasetJson[]> {
    return request(ENDPOINTS.listDatasets);
  },

  datasetAttributes(iri: string): Promise<{ dataset: string; attributes: AttributeJson[] }> {
    return request(ENDPOINTS.datasetAttributes, { params: { iri } });
  },

  validateCatalog(): Promise<{ violations: ViolationJson[] }> {
    return request(ENDPOINTS.validateCatalog);
  },

  runQuery(query: string): Promise<QueryResultJson> {
    return request(ENDPOINTS.runQuery, { body: { query } });
  },

  createSpec(id?: string): Promise<SessionJson> {
    return request(ENDPOINTS.createSpec, { body: id === undefined ? {} : { id } });
  },

  listSpecs(): Promise<{ id: string; revision: number; steps: number }[]> {
    return request(ENDPOINTS.listSpecs);
  },

  getSpec(id: string): Promise<SessionJson> {
    return request(ENDPOINTS.getSpec, { params: { id } });
  },

  appendStep(id: string, step: WireStep, revision?: number): Promise<StepResultJson> {
    const body: Record<string, unknown> = { step };
    if (revision !== undefined) body.revision = revision;
    return request(ENDPOINTS.appendStep, { params: { id }, body });
  },

  undoStep(id: string, revision?: number): Promise<SessionJson> {
    const query = revision === undefined ? undefined : { revision: String(revision) };
    return request(ENDPOINTS.undoStep, { params: { id }, query });
  },

  getSchema(id: string): Promise<SessionJson> {
    return request(ENDPOINTS.getSchema, { params: { id } });
  },

  suggestions(id: string): Promise<SuggestionsJson> {
    return request(ENDPOINTS.suggestions, { params: { id } });
  },

  /** The session as a line-oriented specification document. */
  exportSpec(id: string): Promise<string> {
    return request(ENDPOINTS.exportSpec, { params: { id }, asText: true });
  },

  importSpec(document: string): Promise<SessionJson> {
    return request(ENDPOINTS.importSpec, { rawBody: document });
  },

  materialize(id: string, revision?: number): Promise<{ jobId: string; status: string; revision: number }> {
    const body: Record<string, unknown> = {};
    if (revision !== undefined) body.revision = revision;
    return request(ENDPOINTS.materialize, { params: { id }, body });
  },

  jobStatus(id: string): Promise<JobJson> {
    return request(ENDPOINTS.jobStatus, { params: { id } });
  },

  jobResult(id: string, limit = 100): Promise<JobResultJson> {
    return request(ENDPOINTS.jobResult, { params: { id }, query: { limit: String(limit) } });
  },

  /** Fetches the full CSV; the run panel also links this URL directly. */
  downloadCsv(id: string): Promise<string> {
    return request(ENDPOINTS.downloadCsv, { params: { id }, asText: true });
  },
};

export type Api = typeof api;

/** Browser URL for the CSV download link (same endpoint as downloadCsv). */
export function downloadUrl(jobId: string): string {
  return buildUrl(ENDPOINTS.downloadCsv, { params: { id: jobId } }).url;
}
