import {
  ApiError,
  type Api,
  type DatasetJson,
  type SessionJson,
  type SuggestionsJson,
  type WireStep,
} from "../api.js";
import { clear, el } from "../dom.js";
import { clearError, localName, renderError, renderSchema } from "./schema.js";

/** Shared view of the server-side session; the server owns the truth. */
export interface SessionHandle {
  id: string;
  revision: number;
  steps: number;
}

export function describeStep(step: WireStep): string {
  switch (step.step) {
    case "selectDataset":
      return `Select dataset ${localName(String(step.dataset))}`;
    case "selectFeatures":
      return `Keep features: ${(step.columns as string[]).join(", ")}`;
    case "extractFeature":
      return `Extract ${step.extractor} from "${step.column}" as "${step.newName}"`;
    case "sampleRows": {
      const seed = step.seed === undefined || step.seed === null ? "" : `, seed ${step.seed}`;
      return `Sample ${step.count} rows (${step.method}${seed})`;
    }
    case "integrateDatasets":
      return `Join lineages ${step.left} and ${step.right} (${step.kind}, max ${step.maxDistanceMeters} m)`;
    default:
      return JSON.stringify(step);
  }
}

/** Steps of an exported specification document (header line skipped). */
export function parseDocumentSteps(document: string): WireStep[] {
  return document
    .split("\n")
    .filter((line) => line.trim() !== "")
    .map((line) => JSON.parse(line) as WireStep)
    .filter((obj) => !("format" in obj));
}

export class Builder {
  private container: HTMLElement;
  private schemaPanel: HTMLElement;
  private client: Api;
  readonly session: SessionHandle;
  private datasets: DatasetJson[] = [];
  private onChange: () => void;

  constructor(
    container: HTMLElement,
    schemaPanel: HTMLElement,
    client: Api,
    session: SessionJson,
    onChange: () => void = () => {},
  ) {
    this.container = container;
    this.schemaPanel = schemaPanel;
    this.client = client;
    this.session = { id: session.id, revision: session.revision, steps: session.steps };
    this.onChange = onChange;
  }

  async start(): Promise<void> {
    this.datasets = await this.client.listDatasets();
    await this.refresh();
  }

  /** Re-read everything from the server and re-render. */
  async refresh(): Promise<void> {
    const view = await this.client.getSpec(this.session.id);
    this.session.revision = view.revision;
    this.session.steps = view.steps;
    const [document, suggestions] = await Promise.all([
      this.client.exportSpec(this.session.id),
      this.client.suggestions(this.session.id),
    ]);
    this.render(view, parseDocumentSteps(document), suggestions);
    this.onChange();
  }

  /** Append one step; on 422 the spec is unchanged and the error shows inline. */
  private async apply(step: WireStep): Promise<void> {
    clearError(this.schemaPanel);
    try {
      const result = await this.client.appendStep(this.session.id, step, this.session.revision);
      this.session.revision = result.revision;
      this.session.steps = result.steps;
      await this.refresh();
    } catch (error) {
      this.handleFailure(error);
    }
  }

  private async undo(): Promise<void> {
    clearError(this.schemaPanel);
    try {
      const view = await this.client.undoStep(this.session.id, this.session.revision);
      this.session.revision = view.revision;
      this.session.steps = view.steps;
      await this.refresh();
    } catch (error) {
      this.handleFailure(error);
    }
  }

  private handleFailure(error: unknown): void {
    if (error instanceof ApiError && error.code === "STALE_REVISION") {
      this.renderStalePrompt();
      return;
    }
    renderError(this.schemaPanel, error);
  }

  /** Another client moved the session forward; offer to reload, never clobber. */
  private renderStalePrompt(): void {
    const banner = el(
      "div",
      { className: "stale-banner" },
      el("span", { text: "This session changed elsewhere. " }),
      el("button", {
        text: "Reload session",
        onClick: () => {
          banner.remove();
          void this.refresh();
        },
      }),
    );
    this.container.prepend(banner);
  }

  private render(view: SessionJson, steps: WireStep[], suggestions: SuggestionsJson): void {
    clear(this.container);
    this.container.append(el("h2", { text: `Specification "${view.id}"` }));
    this.renderSteps(steps);
    this.renderDatasetPicker();
    this.renderFeatureBoxes(view);
    this.renderSampling(view);
    this.renderSuggestions(suggestions);
    renderSchema(this.schemaPanel, view.schema);
  }

  private renderSteps(steps: WireStep[]): void {
    const section = el("section", { className: "steps" }, el("h3", { text: "Steps" }));
    if (steps.length === 0) {
      section.append(el("p", { className: "empty", text: "No steps yet." }));
    } else {
      const list = el("ol");
      for (const step of steps) {
        list.append(el("li", { text: describeStep(step) }));
      }
      section.append(list);
      section.append(el("button", {
        className: "undo",
        text: "Undo last step",
        onClick: () => void this.undo(),
      }));
    }
    this.container.append(section);
  }

  private renderDatasetPicker(): void {
    const section = el("section", { className: "pick-dataset" }, el("h3", { text: "Add dataset" }));
    const select = el("select");
    for (const ds of this.datasets) {
      const option = el("option", { text: ds.title, value: ds.iri });
      select.append(option);
    }
    section.append(select);
    section.append(el("button", {
      text: "Select dataset",
      onClick: () => void this.apply({ step: "selectDataset", dataset: select.value }),
    }));
    this.container.append(section);
  }

  private renderFeatureBoxes(view: SessionJson): void {
    if (view.schema.length === 0) return;
    const section = el("section", { className: "features" }, el("h3", { text: "Features" }));
    const boxes: { name: string; input: HTMLInputElement }[] = [];
    for (const column of view.schema) {
      const input = el("input", { type: "checkbox", checked: true });
      boxes.push({ name: column.name, input });
      section.append(el("label", {}, input, ` ${column.name}`));
    }
    section.append(el("button", {
      text: "Keep selected",
      onClick: () => {
        const columns = boxes.filter((b) => b.input.checked).map((b) => b.name);
        void this.apply({ step: "selectFeatures", columns });
      },
    }));
    this.container.append(section);
  }

  private renderSampling(view: SessionJson): void {
    if (view.schema.length === 0) return;
    const section = el("section", { className: "sampling" }, el("h3", { text: "Sampling" }));
    const method = el("select");
    method.append(el("option", { text: "HEAD", value: "HEAD" }));
    method.append(el("option", { text: "RANDOM", value: "RANDOM" }));
    const count = el("input", { type: "number", value: "100" });
    const seed = el("input", { type: "number", value: "0" });
    section.append(method, el("label", {}, " rows ", count), el("label", {}, " seed ", seed));
    section.append(el("button", {
      text: "Sample",
      onClick: () => {
        const step: WireStep = {
          step: "sampleRows",
          method: method.value,
          count: Number(count.value),
        };
        if (method.value === "RANDOM") step.seed = Number(seed.value);
        void this.apply(step);
      },
    }));
    this.container.append(section);
  }

  /** Suggestions are opt-in: rendered as chips and cards, applied on click only. */
  private renderSuggestions(suggestions: SuggestionsJson): void {
    const section = el("section", { className: "suggestions" }, el("h3", { text: "Suggestions" }));
    if (suggestions.extractions.length === 0 && suggestions.integrations.length === 0) {
      section.append(el("p", { className: "empty", text: "Nothing to suggest for the current steps." }));
      this.container.append(section);
      return;
    }
    for (const chip of suggestions.extractions) {
      section.append(el("button", {
        className: "chip",
        text: `${chip.extractor} of ${chip.column}`,
        onClick: () => void this.apply({
          step: "extractFeature",
          column: chip.column,
          extractor: chip.extractor,
        }),
      }));
    }
    for (const card of suggestions.integrations) {
      const distance = el("input", { type: "number", value: String(card.maxDistanceMeters) });
      const join = el(
        "div",
        { className: "join-card" },
        el("p", { text: `Join ${localName(card.pointDataset)} points to ${localName(card.polylineDataset)} segments` }),
        el("label", {}, "max distance (m) ", distance),
        el("button", {
          text: "Integrate",
          onClick: () => void this.apply({
            step: "integrateDatasets",
            left: card.left,
            right: card.right,
            kind: card.kind,
            maxDistanceMeters: Number(distance.value),
          }),
        }),
      );
      section.append(join);
    }
    this.container.append(section);
  }
}
