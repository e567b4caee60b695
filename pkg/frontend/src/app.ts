import { api, type Api, type SessionJson } from "./api.js";
import { el } from "./dom.js";
import { Builder } from "./views/builder.js";
import { renderCatalog } from "./views/catalog.js";
import { RunPanel } from "./views/run.js";

/**
 * Resume the session named in the URL, or create a fresh one and record
 * its id in the URL so a reload returns to the same spec.
 */
export async function resolveSession(client: Api, search: string): Promise<SessionJson> {
  const requested = new URLSearchParams(search).get("spec");
  if (requested !== null) {
    try {
      return await client.getSpec(requested);
    } catch {
      // fall through: the named session is gone; start a fresh one
    }
  }
  return client.createSpec();
}

export async function initApp(root: HTMLElement, client: Api = api): Promise<void> {
  const catalogPanel = el("div", { className: "panel catalog-panel" });
  const builderPanel = el("div", { className: "panel builder-panel" });
  const schemaPanel = el("div", { className: "panel schema-panel" });
  const runPanel = el("div", { className: "panel run-panel" });
  root.append(catalogPanel, builderPanel, schemaPanel, runPanel);

  await renderCatalog(catalogPanel, client);

  const session = await resolveSession(client, location.search);
  const url = new URL(location.href);
  if (url.searchParams.get("spec") !== session.id) {
    url.searchParams.set("spec", session.id);
    history.replaceState(null, "", url.toString());
  }

  const builder = new Builder(builderPanel, schemaPanel, client, session);
  const run = new RunPanel(runPanel, client, builder.session);
  run.render();
  await builder.start();
}

const mount = typeof document !== "undefined" ? document.getElementById("app") : null;
if (mount !== null) {
  void initApp(mount);
}
