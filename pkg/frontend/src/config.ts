/** API base URL resolution: explicit override, ?api= parameter, same origin. */

declare global {
  // eslint-disable-next-line no-var
  var __SEMWEAVE_API__: string | undefined;
}

export function apiBase(): string {
  if (globalThis.__SEMWEAVE_API__) {
    return globalThis.__SEMWEAVE_API__.replace(/\/+$/, "");
  }
  if (typeof location !== "undefined") {
    const fromQuery = new URLSearchParams(location.search).get("api");
    if (fromQuery) return fromQuery.replace(/\/+$/, "");
    return location.origin;
  }
  return "http://127.0.0.1:8000";
}
