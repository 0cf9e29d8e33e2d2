import type { Alignment, ObjectValue, SpoResult } from "./types.js";

export interface ViewHandlers {
  onPivot(predicateIri: string): void;
  onDistribution(e: string, c: string): void;
}

export function formatValue(v: ObjectValue): string {
  if (v.kind === "csvlist" && Array.isArray(v.value)) {
    return v.value.join(", ");
  }
  return String(v.value);
}

/** The (enumerating, counting) pair behind one alignment row, determined by
 * the ranking direction of the query predicate. */
export function pairOf(queryPredicate: string, alignment: Alignment): { e: string; c: string } {
  if (alignment.direction === "counting_to_enumerating") {
    return { e: alignment.predicate.iri, c: queryPredicate };
  }
  return { e: queryPredicate, c: alignment.predicate.iri };
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) node.textContent = text;
  return node;
}

function alignmentTable(
  queryPredicate: string,
  rows: Alignment[],
  handlers: ViewHandlers,
): HTMLTableElement {
  const table = el("table", { class: "alignments" });
  const head = el("tr");
  for (const title of ["aligned predicate", "combined", "support", "values", ""]) {
    head.appendChild(el("th", {}, title));
  }
  table.appendChild(head);
  for (const alignment of rows) {
    const tr = el("tr", { "data-testid": "alignment-row" });

    const label = alignment.predicate.inverted
      ? `${alignment.predicate.base_label}^-1`
      : alignment.predicate.base_label;
    const pivot = el("button", {
      "data-testid": "pivot-btn",
      title: alignment.predicate.iri,
      type: "button",
    }, label);
    pivot.addEventListener("click", () => handlers.onPivot(alignment.predicate.iri));
    const labelCell = el("td");
    labelCell.appendChild(pivot);
    tr.appendChild(labelCell);

    tr.appendChild(el("td", { "data-testid": "combined" },
      alignment.combined.toFixed(3)));
    tr.appendChild(el("td", { "data-testid": "support" },
      String(alignment.support)));
    tr.appendChild(el("td", { "data-testid": "values" },
      alignment.values.map(formatValue).join("; ")));

    const pair = pairOf(queryPredicate, alignment);
    const dist = el("button", {
      "data-testid": "dist-btn",
      type: "button",
    }, "distribution");
    dist.addEventListener("click", () => handlers.onDistribution(pair.e, pair.c));
    const actions = el("td");
    actions.appendChild(dist);
    tr.appendChild(actions);

    table.appendChild(tr);
  }
  return table;
}

export function renderSpoResult(
  container: HTMLElement,
  result: SpoResult,
  handlers: ViewHandlers,
): void {
  container.replaceChildren();

  const query = result.query;
  const anchor = query.subject ?? query.object ?? "";
  container.appendChild(el("h2", { "data-testid": "query-heading" },
    query.subject !== null
      ? `${anchor} — ${query.predicate} — ?`
      : `? — ${query.predicate} — ${anchor}`));

  const answers = el("section", { "data-testid": "answers" });
  answers.appendChild(el("h3", {}, `answers (${result.answers.length})`));
  const list = el("ul");
  for (const value of result.answers) {
    const item = el("li", { "data-kind": value.kind }, formatValue(value));
    list.appendChild(item);
  }
  answers.appendChild(list);
  container.appendChild(answers);

  if (result.alignments.length === 0) {
    container.appendChild(el("p", { "data-testid": "empty-state" },
      "no aligned predicates above the support threshold"));
    return;
  }

  // group by has_values, preserving the ranked order inside each group
  const withValues = result.alignments.filter((a) => a.has_values);
  const withoutValues = result.alignments.filter((a) => !a.has_values);
  for (const [testid, title, rows] of [
    ["alignments-missing", "aligned set predicates without values (potential gaps)", withoutValues],
    ["alignments-present", "aligned set predicates with values", withValues],
  ] as const) {
    if (rows.length === 0) continue;
    const section = el("section", { "data-testid": testid });
    section.appendChild(el("h3", {}, `${title} (${rows.length})`));
    section.appendChild(alignmentTable(query.predicate, rows, handlers));
    container.appendChild(section);
  }
}

export function renderError(
  container: HTMLElement,
  message: string,
  onRetry: () => void,
): void {
  container.replaceChildren();
  const box = el("div", { "data-testid": "error", class: "error" });
  box.appendChild(el("span", {}, `query failed: ${message} `));
  const retry = el("button", { "data-testid": "retry-btn", type: "button" }, "retry");
  retry.addEventListener("click", onRetry);
  box.appendChild(retry);
  container.appendChild(box);
}

export function renderLoading(container: HTMLElement): void {
  container.replaceChildren(el("p", { "data-testid": "loading" }, "querying…"));
}
