// @vitest-environment happy-dom
import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiError, type Api, type ColumnJson, type SessionJson } from "../src/api.js";
import { resolveSession } from "../src/app.js";
import { Builder, describeStep, parseDocumentSteps } from "../src/views/builder.js";
import { renderCatalog } from "../src/views/catalog.js";
import { RunPanel } from "../src/views/run.js";
import { clearError, localName, renderError, renderSchema } from "../src/views/schema.js";

const FCD = "https://simple-ml.de/vocab/FCDDataset";
const OSM = "https://simple-ml.de/vocab/OSMDataset";

function column(name: string, overrides: Partial<ColumnJson> = {}): ColumnJson {
  return {
    name,
    semanticKind: "NUMBER",
    mappedProperty: null,
    mappedDomain: null,
    sourceDataset: FCD,
    sourceStep: 0,
    columnNumber: 0,
    extractor: null,
    sourceColumn: null,
    ...overrides,
  };
}

function session(overrides: Partial<SessionJson> = {}): SessionJson {
  return { id: "s1", revision: 0, steps: 0, schema: [], ...overrides };
}

/** All-rejecting client; tests stub just the calls the view makes. */
function stubApi(overrides: Partial<Api>): Api {
  const reject = () => vi.fn().mockRejectedValue(new Error("not stubbed"));
  const base: Record<string, unknown> = {};
  for (const key of [
    "getCatalog", "listDatasets", "datasetAttributes", "validateCatalog",
    "runQuery", "createSpec", "listSpecs", "getSpec", "appendStep",
    "undoStep", "getSchema", "suggestions", "exportSpec", "importSpec",
    "materialize", "jobStatus", "jobResult", "downloadCsv",
  ]) {
    base[key] = reject();
  }
  return { ...base, ...overrides } as Api;
}

async function until(check: () => boolean, ms = 2000): Promise<void> {
  const start = Date.now();
  while (!check()) {
    if (Date.now() - start > ms) throw new Error("condition never became true");
    await new Promise((resolve) => setTimeout(resolve, 5));
  }
}

function panel(): HTMLElement {
  const node = document.createElement("div");
  document.body.append(node);
  return node;
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("pure helpers", () => {
  it("localName trims to the fragment or last path segment", () => {
    expect(localName(FCD)).toBe("FCDDataset");
    expect(localName("http://x.org/ns#speed")).toBe("speed");
    expect(localName(null)).toBe("");
  });

  it("describeStep covers every step kind", () => {
    expect(describeStep({ step: "selectDataset", dataset: FCD })).toContain("FCDDataset");
    expect(describeStep({ step: "selectFeatures", columns: ["a", "b"] })).toContain("a, b");
    expect(describeStep({
      step: "extractFeature", column: "time", extractor: "WEEKDAY", newName: "time (day)",
    })).toContain("WEEKDAY");
    expect(describeStep({ step: "sampleRows", method: "RANDOM", count: 5, seed: 9 }))
      .toContain("seed 9");
    expect(describeStep({
      step: "integrateDatasets", left: 0, right: 1, kind: "SPATIAL_NEAREST", maxDistanceMeters: 50,
    })).toContain("max 50 m");
  });

  it("parseDocumentSteps skips the header line", () => {
    const doc = '{"format": "semweave-spec", "version": 1}\n'
      + '{"step": "selectDataset", "dataset": "d"}\n';
    expect(parseDocumentSteps(doc)).toEqual([{ step: "selectDataset", dataset: "d" }]);
  });
});

describe("schema panel", () => {
  it("shows an empty state before any step", () => {
    const node = panel();
    renderSchema(node, []);
    expect(node.textContent).toContain("No columns yet");
  });

  it("renders one row per column with its derivation", () => {
    const node = panel();
    renderSchema(node, [
      column("speed", { mappedProperty: "https://simple-ml.de/vocab/hasSpeed" }),
      column("time (day)", {
        semanticKind: "CATEGORY", extractor: "WEEKDAY", sourceColumn: "time",
      }),
    ]);
    const rows = node.querySelectorAll("tbody tr");
    expect(rows.length).toBe(2);
    expect(rows[1].textContent).toContain("WEEKDAY of time");
  });

  it("renders the server's error code, column, and step inline", () => {
    const node = panel();
    renderError(node, new ApiError(422, {
      code: "EXTRACTOR_KIND_MISMATCH",
      message: "cannot extract WEEKDAY from a NUMBER column",
      column: "speed",
      step: 1,
    }));
    const box = node.querySelector(".error-box")!;
    expect(box.textContent).toContain("EXTRACTOR_KIND_MISMATCH");
    expect(box.textContent).toContain('column "speed"');
    expect(box.textContent).toContain("step 1");
    clearError(node);
    expect(node.querySelector(".error-box")).toBeNull();
  });
});

describe("catalog browser", () => {
  it("shows an empty state when the catalog has no datasets", async () => {
    const node = panel();
    await renderCatalog(node, stubApi({ listDatasets: vi.fn().mockResolvedValue([]) }));
    expect(node.textContent).toContain("The catalog has no datasets.");
  });

  it("expands a dataset into its attribute table on demand", async () => {
    const node = panel();
    const client = stubApi({
      listDatasets: vi.fn().mockResolvedValue([{
        iri: FCD,
        title: "Floating Car Data",
        temporal: { start: "2017-08-01", end: "2017-12-31" },
        access: null,
        attributeCount: 6,
        numberOfInstances: 3,
      }]),
      datasetAttributes: vi.fn().mockResolvedValue({
        dataset: FCD,
        attributes: [{
          identifier: "speed",
          label: "speed",
          columnNumber: 2,
          columnName: null,
          mapping: {
            property: "https://simple-ml.de/vocab/hasSpeed",
            domainClass: "https://simple-ml.de/vocab/FloatingCarDataPoint",
          },
          semanticKind: "NUMBER",
          statistics: {
            count: 3, nullCount: 0, distinctCount: 3,
            mean: "58.333333333", min: "17", max: "84", numeric: true,
          },
        }],
      }),
    });
    await renderCatalog(node, client);
    expect(node.textContent).toContain("Floating Car Data");
    expect(node.textContent).toContain("coverage 2017-08-01 to 2017-12-31");

    (node.querySelector("button") as HTMLButtonElement).click();
    await until(() => node.querySelector("table.attributes") !== null);
    const table = node.querySelector("table.attributes")!;
    expect(table.textContent).toContain("hasSpeed (FloatingCarDataPoint)");
    expect(table.textContent).toContain("mean=58.333333333");
  });
});

describe("spec builder", () => {
  const EXPORT_EMPTY = '{"format": "semweave-spec", "version": 1, "id": "s1"}\n';
  const NO_SUGGESTIONS = { extractions: [], integrations: [] };

  function datasets() {
    return vi.fn().mockResolvedValue([
      { iri: FCD, title: "Floating Car Data", temporal: null, access: null, attributeCount: 6, numberOfInstances: null },
      { iri: OSM, title: "Streets", temporal: null, access: null, attributeCount: 3, numberOfInstances: null },
    ]);
  }

  it("applies a suggestion chip as a step with the current revision", async () => {
    const appendStep = vi.fn().mockResolvedValue({ id: "s1", revision: 3, steps: 3, schema: [] });
    const client = stubApi({
      listDatasets: datasets(),
      getSpec: vi.fn().mockResolvedValue(session({ revision: 2, steps: 2, schema: [column("time", { semanticKind: "TIMESTAMP" })] })),
      exportSpec: vi.fn().mockResolvedValue(EXPORT_EMPTY),
      suggestions: vi.fn().mockResolvedValue({
        extractions: [{ step: "extractFeature", column: "time", extractor: "WEEKDAY" }],
        integrations: [],
      }),
      appendStep,
    });
    const builder = new Builder(panel(), panel(), client, session());
    await builder.start();

    const chip = [...document.querySelectorAll("button.chip")]
      .find((b) => b.textContent === "WEEKDAY of time") as HTMLButtonElement;
    chip.click();
    await until(() => appendStep.mock.calls.length === 1);
    expect(appendStep).toHaveBeenCalledWith(
      "s1",
      { step: "extractFeature", column: "time", extractor: "WEEKDAY" },
      2,
    );
  });

  it("applies an integration card with the edited distance", async () => {
    const appendStep = vi.fn().mockResolvedValue({ id: "s1", revision: 7, steps: 7, schema: [] });
    const client = stubApi({
      listDatasets: datasets(),
      getSpec: vi.fn().mockResolvedValue(session({ revision: 6, steps: 6, schema: [column("speed")] })),
      exportSpec: vi.fn().mockResolvedValue(EXPORT_EMPTY),
      suggestions: vi.fn().mockResolvedValue({
        extractions: [],
        integrations: [{
          step: "integrateDatasets", left: 0, right: 1, kind: "SPATIAL_NEAREST",
          maxDistanceMeters: 50, pointDataset: FCD, polylineDataset: OSM,
        }],
      }),
      appendStep,
    });
    const builder = new Builder(panel(), panel(), client, session());
    await builder.start();

    const card = document.querySelector(".join-card")!;
    expect(card.textContent).toContain("FCDDataset points to OSMDataset segments");
    (card.querySelector("input") as HTMLInputElement).value = "25";
    (card.querySelector("button") as HTMLButtonElement).click();
    await until(() => appendStep.mock.calls.length === 1);
    expect(appendStep.mock.calls[0][1]).toEqual({
      step: "integrateDatasets", left: 0, right: 1, kind: "SPATIAL_NEAREST", maxDistanceMeters: 25,
    });
  });

  it("renders a rejected step inline and keeps the step list", async () => {
    const schemaPanel = panel();
    const client = stubApi({
      listDatasets: datasets(),
      getSpec: vi.fn().mockResolvedValue(session({ revision: 2, steps: 2, schema: [column("speed")] })),
      exportSpec: vi.fn().mockResolvedValue(
        EXPORT_EMPTY + '{"step": "selectDataset", "dataset": "' + FCD + '"}\n',
      ),
      suggestions: vi.fn().mockResolvedValue(NO_SUGGESTIONS),
      appendStep: vi.fn().mockRejectedValue(new ApiError(422, {
        code: "EXTRACTOR_KIND_MISMATCH", message: "wrong kind", column: "speed", step: 2,
      })),
    });
    const container = panel();
    const builder = new Builder(container, schemaPanel, client, session());
    await builder.start();

    (container.querySelector(".features button") as HTMLButtonElement).click();
    await until(() => schemaPanel.querySelector(".error-box") !== null);
    const box = schemaPanel.querySelector(".error-box")!;
    expect(box.textContent).toContain("EXTRACTOR_KIND_MISMATCH");
    expect(box.textContent).toContain('column "speed"');
    // The step list is still rendered from the server's document.
    expect(container.querySelector(".steps")!.textContent).toContain("Select dataset FCDDataset");
  });

  it("offers a reload when the revision is stale", async () => {
    const getSpec = vi.fn().mockResolvedValue(session({ revision: 5, steps: 5 }));
    const client = stubApi({
      listDatasets: datasets(),
      getSpec,
      exportSpec: vi.fn().mockResolvedValue(EXPORT_EMPTY),
      suggestions: vi.fn().mockResolvedValue(NO_SUGGESTIONS),
      appendStep: vi.fn().mockRejectedValue(new ApiError(409, {
        code: "STALE_REVISION", message: "stale", revision: 5,
      })),
    });
    const container = panel();
    const builder = new Builder(container, panel(), client, session());
    await builder.start();

    (container.querySelector(".pick-dataset button") as HTMLButtonElement).click();
    await until(() => container.querySelector(".stale-banner") !== null);

    const callsBefore = getSpec.mock.calls.length;
    (container.querySelector(".stale-banner button") as HTMLButtonElement).click();
    await until(() => getSpec.mock.calls.length > callsBefore);
    await until(() => container.querySelector(".stale-banner") === null);
  });

  it("undo passes the revision it has", async () => {
    const undoStep = vi.fn().mockResolvedValue(session({ revision: 4, steps: 2 }));
    const client = stubApi({
      listDatasets: datasets(),
      getSpec: vi.fn().mockResolvedValue(session({ revision: 3, steps: 3 })),
      exportSpec: vi.fn().mockResolvedValue(
        EXPORT_EMPTY + '{"step": "selectDataset", "dataset": "' + FCD + '"}\n',
      ),
      suggestions: vi.fn().mockResolvedValue(NO_SUGGESTIONS),
      undoStep,
    });
    const container = panel();
    const builder = new Builder(container, panel(), client, session());
    await builder.start();

    (container.querySelector("button.undo") as HTMLButtonElement).click();
    await until(() => undoStep.mock.calls.length === 1);
    expect(undoStep).toHaveBeenCalledWith("s1", 3);
  });
});

describe("run panel", () => {
  it("previews the finished table and links the download", async () => {
    const client = stubApi({
      materialize: vi.fn().mockResolvedValue({ jobId: "j1", status: "queued", revision: 7 }),
      jobStatus: vi.fn().mockResolvedValue({ id: "j1", spec: "s1", status: "done", rowCount: 3 }),
      jobResult: vi.fn().mockResolvedValue({
        columns: [column("speed"), column("type", { semanticKind: "CATEGORY" })],
        rows: [["74", "motorway_link"], ["84", "motorway"], ["17", "secondary"]],
        totalRows: 3,
        diagnostics: [{ severity: "warning", message: "1 row had no segment" }],
      }),
    });
    const node = panel();
    globalThis.__SEMWEAVE_API__ = "http://service.test";
    new RunPanel(node, client, { id: "s1", revision: 7, steps: 7 }).render();

    (node.querySelector("button.materialize") as HTMLButtonElement).click();
    await until(() => node.querySelector("table.preview") !== null);
    expect(node.querySelectorAll("table.preview tbody tr").length).toBe(3);
    expect(node.textContent).toContain("3 rows (showing 3)");
    expect(node.textContent).toContain("warning: 1 row had no segment");
    const link = node.querySelector("a.download") as HTMLAnchorElement;
    expect(link.href).toBe("http://service.test/jobs/j1/download");
    delete globalThis.__SEMWEAVE_API__;
  });

  it("shows the failure code of a failed run inline", async () => {
    const client = stubApi({
      materialize: vi.fn().mockResolvedValue({ jobId: "j2", status: "queued", revision: 7 }),
      jobStatus: vi.fn().mockResolvedValue({
        id: "j2", spec: "s1", status: "failed",
        error: { code: "RUN_FAILED", message: "file missing" },
      }),
    });
    const node = panel();
    new RunPanel(node, client, { id: "s1", revision: 7, steps: 7 }).render();

    (node.querySelector("button.materialize") as HTMLButtonElement).click();
    await until(() => node.querySelector(".error-box") !== null);
    expect(node.querySelector(".error-box")!.textContent).toContain("RUN_FAILED");
  });

  it("shows a stale-revision conflict from materialize inline", async () => {
    const client = stubApi({
      materialize: vi.fn().mockRejectedValue(new ApiError(409, {
        code: "STALE_REVISION", message: "stale", revision: 9,
      })),
    });
    const node = panel();
    new RunPanel(node, client, { id: "s1", revision: 7, steps: 7 }).render();

    (node.querySelector("button.materialize") as HTMLButtonElement).click();
    await until(() => node.querySelector(".error-box") !== null);
    expect(node.querySelector(".error-box")!.textContent).toContain("STALE_REVISION");
  });
});

describe("session resolution", () => {
  it("resumes the session named in the URL", async () => {
    const getSpec = vi.fn().mockResolvedValue(session({ id: "mine", steps: 4 }));
    const client = stubApi({ getSpec });
    const resolved = await resolveSession(client, "?spec=mine");
    expect(resolved.id).toBe("mine");
    expect(getSpec).toHaveBeenCalledWith("mine");
  });

  it("creates a fresh session when the named one is gone", async () => {
    const client = stubApi({
      getSpec: vi.fn().mockRejectedValue(new ApiError(404, { code: "NOT_FOUND", message: "no" })),
      createSpec: vi.fn().mockResolvedValue(session({ id: "fresh" })),
    });
    const resolved = await resolveSession(client, "?spec=gone");
    expect(resolved.id).toBe("fresh");
  });

  it("creates a session when the URL names none", async () => {
    const client = stubApi({ createSpec: vi.fn().mockResolvedValue(session({ id: "new" })) });
    const resolved = await resolveSession(client, "");
    expect(resolved.id).toBe("new");
  });
});
