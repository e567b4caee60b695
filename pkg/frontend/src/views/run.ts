import { ApiError, downloadUrl, type Api, type JobResultJson } from "../api.js";
import { clear, el } from "../dom.js";
import { pollJob } from "../jobs.js";
import type { SessionHandle } from "./builder.js";
import { renderError } from "./schema.js";

export const PREVIEW_LIMIT = 100;

function previewTable(result: JobResultJson): HTMLTableElement {
  const head = el("tr");
  for (const column of result.columns) {
    head.append(el("th", { text: column.name }));
  }
  const body = el("tbody");
  for (const row of result.rows) {
    const tr = el("tr");
    for (const cell of row) {
      tr.append(el("td", { text: cell }));
    }
    body.append(tr);
  }
  const table = el("table", { className: "preview" }, el("thead", {}, head));
  table.append(body);
  return table;
}

/**
 * Materialize button, job status line, bounded preview, download link.
 * The preview shows at most PREVIEW_LIMIT rows; full data is download-only.
 */
export class RunPanel {
  private container: HTMLElement;
  private client: Api;
  private session: SessionHandle;

  constructor(container: HTMLElement, client: Api, session: SessionHandle) {
    this.container = container;
    this.client = client;
    this.session = session;
  }

  render(): void {
    clear(this.container);
    this.container.append(el("h2", { text: "Run" }));
    this.container.append(el("button", {
      className: "materialize",
      text: "Materialize",
      onClick: () => void this.materialize(),
    }));
    this.container.append(el("p", { className: "status", text: "" }));
    this.container.append(el("div", { className: "outcome" }));
  }

  private statusLine(): HTMLElement {
    return this.container.querySelector(".status") as HTMLElement;
  }

  private outcome(): HTMLElement {
    return this.container.querySelector(".outcome") as HTMLElement;
  }

  private async materialize(): Promise<void> {
    const outcome = this.outcome();
    clear(outcome);
    try {
      const { jobId } = await this.client.materialize(this.session.id, this.session.revision);
      const job = await pollJob(this.client, jobId, (j) => {
        this.statusLine().textContent = `job ${j.status}`;
      });
      if (job.status === "failed") {
        renderError(outcome, new ApiError(409, {
          code: job.error?.code ?? "RUN_FAILED",
          message: job.error?.message ?? "the run failed",
        }));
        return;
      }
      const result = await this.client.jobResult(jobId, PREVIEW_LIMIT);
      this.renderResult(outcome, jobId, result);
    } catch (error) {
      renderError(outcome, error);
    }
  }

  private renderResult(outcome: HTMLElement, jobId: string, result: JobResultJson): void {
    const shown = Math.min(result.totalRows, result.rows.length);
    outcome.append(el("p", { text: `${result.totalRows} rows (showing ${shown})` }));
    outcome.append(previewTable(result));
    for (const diagnostic of result.diagnostics) {
      outcome.append(el("p", { className: "diagnostic", text: `${diagnostic.severity}: ${diagnostic.message}` }));
    }
    outcome.append(el("a", {
      className: "download",
      text: "Download CSV",
      href: downloadUrl(jobId),
      download: `${this.session.id}.csv`,
    }));
  }
}
