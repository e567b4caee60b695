import { describe, expect, it } from "vitest";

import { ENDPOINTS, api } from "../src/api.js";

// The service's documented endpoint surface (see the backend README).
const DOCUMENTED = [
  "GET /catalog",
  "GET /catalog/datasets",
  "GET /catalog/datasets/{iri}/attributes",
  "GET /catalog/validate",
  "POST /query",
  "POST /specs",
  "GET /specs",
  "GET /specs/{id}",
  "POST /specs/{id}/steps",
  "DELETE /specs/{id}/steps/last",
  "GET /specs/{id}/schema",
  "GET /specs/{id}/suggestions",
  "GET /specs/{id}/export",
  "POST /specs/import",
  "POST /specs/{id}/materialize",
  "GET /jobs/{id}",
  "GET /jobs/{id}/result",
  "GET /jobs/{id}/download",
];

describe("endpoint coverage", () => {
  it("the client registry covers the documented surface exactly", () => {
    expect(new Set(Object.values(ENDPOINTS))).toEqual(new Set(DOCUMENTED));
  });

  it("every client action is keyed to one registered endpoint", () => {
    // Paths are derived from ENDPOINTS inside the client, so key parity
    // means each action maps to exactly one documented endpoint.
    expect(Object.keys(api).sort()).toEqual(Object.keys(ENDPOINTS).sort());
  });
});
