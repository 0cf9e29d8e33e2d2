import { ApiError, fetchDistribution, fetchSpo } from "./api.js";
import { RequestToken, loadHistory, pushHistory } from "./state.js";
import { renderError, renderLoading, renderSpoResult } from "./view.js";
import { renderScatter } from "./scatter.js";
import type { QueryInput } from "./types.js";

export interface AppElements {
  form: HTMLFormElement;
  entity: HTMLInputElement;
  role: HTMLSelectElement;
  predicate: HTMLInputElement;
  results: HTMLElement;
  history: HTMLElement;
  scatter: HTMLElement;
}

/** Wire the console. Exported so tests can mount it on a fresh DOM. */
export function createApp(root: AppElements): { runQuery(input: QueryInput): Promise<void> } {
  const tokens = new RequestToken();

  function renderHistory(): void {
    root.history.replaceChildren();
    for (const entry of loadHistory()) {
      const item = document.createElement("button");
      item.type = "button";
      item.setAttribute("data-testid", "history-entry");
      item.textContent = `${entry.role}=${entry.entity} · ${entry.predicate}`;
      item.addEventListener("click", () => void runQuery(entry));
      root.history.appendChild(item);
    }
  }

  async function showDistribution(e: string, c: string): Promise<void> {
    root.scatter.replaceChildren();
    try {
      const rows = await fetchDistribution(e, c);
      const caption = document.createElement("p");
      caption.textContent = `${e} vs ${c} across ${rows.length} subjects`;
      root.scatter.append(caption, renderScatter(rows));
    } catch (err) {
      const message = document.createElement("p");
      message.setAttribute("data-testid", "scatter-error");
      message.textContent = `distribution unavailable: ${
        err instanceof ApiError ? err.message : String(err)}`;
      root.scatter.appendChild(message);
    }
  }

  async function runQuery(input: QueryInput): Promise<void> {
    const token = tokens.next();
    root.entity.value = input.entity;
    root.role.value = input.role;
    root.predicate.value = input.predicate;
    renderLoading(root.results);
    try {
      const result = await fetchSpo(input);
      if (tokens.isStale(token)) return; // a newer query superseded this one
      pushHistory(input);
      renderHistory();
      renderSpoResult(root.results, result, {
        onPivot: (predicateIri) =>
          void runQuery({ ...input, predicate: predicateIri }),
        onDistribution: (e, c) => void showDistribution(e, c),
      });
    } catch (err) {
      if (tokens.isStale(token)) return;
      const message = err instanceof ApiError ? err.message : String(err);
      renderError(root.results, message, () => void runQuery(input));
    }
  }

  root.form.addEventListener("submit", (event) => {
    event.preventDefault();
    const entity = root.entity.value.trim();
    const predicate = root.predicate.value.trim();
    if (!entity || !predicate) {
      // malformed input never reaches the service
      renderError(root.results, "entity and predicate are both required",
        () => undefined);
      return;
    }
    void runQuery({
      role: root.role.value === "object" ? "object" : "subject",
      entity,
      predicate,
    });
  });

  renderHistory();
  return { runQuery };
}

function mount(): void {
  const byId = (id: string) => document.getElementById(id);
  createApp({
    form: byId("query-form") as HTMLFormElement,
    entity: byId("entity") as HTMLInputElement,
    role: byId("role") as HTMLSelectElement,
    predicate: byId("predicate") as HTMLInputElement,
    results: byId("results") as HTMLElement,
    history: byId("history") as HTMLElement,
    scatter: byId("scatter") as HTMLElement,
  });
}

if (typeof document !== "undefined" && document.getElementById("query-form")) {
  mount();
}
