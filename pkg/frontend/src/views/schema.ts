import { ApiError, type ColumnJson } from "../api.js";
import { clear, el } from "../dom.js";

/** Local part of an IRI, for compact display. */
export function localName(iri: string | null): string {
  if (iri === null) return "";
  const cut = Math.max(iri.lastIndexOf("/"), iri.lastIndexOf("#"));
  return cut === -1 ? iri : iri.slice(cut + 1);
}

/**
 * The live result schema. The server's inferred schema is the single
 * source of truth; this only renders what it was given.
 */
export function renderSchema(container: HTMLElement, columns: ColumnJson[]): void {
  clear(container);
  container.append(el("h3", { text: "Result schema" }));
  if (columns.length === 0) {
    container.append(el("p", { className: "empty", text: "No columns yet. Select a dataset to begin." }));
    return;
  }
  const head = el(
    "tr",
    {},
    el("th", { text: "column" }),
    el("th", { text: "kind" }),
    el("th", { text: "source" }),
    el("th", { text: "derivation" }),
  );
  const table = el("table", { className: "schema" }, el("thead", {}, head));
  const body = el("tbody");
  for (const column of columns) {
    const derivation = column.extractor === null
      ? localName(column.mappedProperty)
      : `${column.extractor} of ${column.sourceColumn}`;
    body.append(el(
      "tr",
      {},
      el("td", { text: column.name }),
      el("td", { text: column.semanticKind ?? "" }),
      el("td", { text: localName(column.sourceDataset) }),
      el("td", { text: derivation }),
    ));
  }
  table.append(body);
  container.append(table);
}

/**
 * Inline, non-blocking error box showing the server's machine-readable
 * code and, when present, the offending column and step.
 */
export function renderError(container: HTMLElement, error: unknown): void {
  clearError(container);
  const box = el("div", { className: "error-box" });
  if (error instanceof ApiError) {
    box.append(el("span", { className: "error-code", text: error.code }));
    if (error.column !== undefined) {
      box.append(el("span", { className: "error-column", text: ` column "${error.column}"` }));
    }
    if (error.step !== undefined) {
      box.append(el("span", { className: "error-step", text: ` step ${error.step}` }));
    }
    box.append(el("span", { text: `: ${error.message}` }));
  } else {
    box.append(el("span", { text: String(error) }));
  }
  container.prepend(box);
}

export function clearError(container: HTMLElement): void {
  for (const stale of container.querySelectorAll(".error-box")) {
    stale.remove();
  }
}
