import type { Api, AttributeJson, DatasetJson } from "../api.js";
import { clear, el } from "../dom.js";
import { localName } from "./schema.js";

function statisticsText(attr: AttributeJson): string {
  const stats = attr.statistics;
  if (stats === null) return "";
  const parts = [`n=${stats.count}`];
  if (stats.mean !== null) parts.push(`mean=${stats.mean}`);
  if (stats.min !== null) parts.push(`min=${stats.min}`);
  if (stats.max !== null) parts.push(`max=${stats.max}`);
  return parts.join(" ");
}

function attributeTable(attributes: AttributeJson[]): HTMLTableElement {
  const head = el(
    "tr",
    {},
    el("th", { text: "attribute" }),
    el("th", { text: "column" }),
    el("th", { text: "kind" }),
    el("th", { text: "maps to" }),
    el("th", { text: "statistics" }),
  );
  const body = el("tbody");
  for (const attr of attributes) {
    const locator = attr.columnNumber !== null ? `#${attr.columnNumber}` : attr.columnName ?? "";
    const mapping = attr.mapping === null
      ? ""
      : `${localName(attr.mapping.property)} (${localName(attr.mapping.domainClass)})`;
    body.append(el(
      "tr",
      {},
      el("td", { text: attr.identifier }),
      el("td", { text: locator }),
      el("td", { text: attr.semanticKind ?? "" }),
      el("td", { text: mapping }),
      el("td", { text: statisticsText(attr) }),
    ));
  }
  const table = el("table", { className: "attributes" }, el("thead", {}, head));
  table.append(body);
  return table;
}

function datasetCard(ds: DatasetJson, client: Api): HTMLElement {
  const details = el("div", { className: "dataset-details" });
  let loaded = false;
  const card = el(
    "section",
    { className: "dataset-card" },
    el("h3", { text: ds.title }),
    el("p", { className: "iri", text: ds.iri }),
  );
  if (ds.temporal !== null) {
    card.append(el("p", { text: `coverage ${ds.temporal.start} to ${ds.temporal.end}` }));
  }
  const counts = ds.numberOfInstances === null
    ? `${ds.attributeCount} attributes`
    : `${ds.attributeCount} attributes, ${ds.numberOfInstances} instances`;
  card.append(el("p", { text: counts }));
  card.append(el("button", {
    text: "Show attributes",
    onClick: async () => {
      if (loaded) {
        details.hidden = !details.hidden;
        return;
      }
      const { attributes } = await client.datasetAttributes(ds.iri);
      details.append(attributeTable(attributes));
      loaded = true;
    },
  }));
  card.append(details);
  return card;
}

/** Dataset list with expandable attribute tables. */
export async function renderCatalog(container: HTMLElement, client: Api): Promise<void> {
  clear(container);
  container.append(el("h2", { text: "Data catalog" }));
  const datasets = await client.listDatasets();
  if (datasets.length === 0) {
    container.append(el("p", { className: "empty", text: "The catalog has no datasets." }));
    return;
  }
  for (const ds of datasets) {
    container.append(datasetCard(ds, client));
  }
}
