import type { QueryInput } from "./types.js";

const HISTORY_KEY = "setpred.history";
const HISTORY_LIMIT = 25;

/** Session-scoped query history supporting the curator's iterative loop. */
export function loadHistory(): QueryInput[] {
  try {
    const raw = sessionStorage.getItem(HISTORY_KEY);
    return raw ? (JSON.parse(raw) as QueryInput[]) : [];
  } catch {
    return [];
  }
}

export function pushHistory(entry: QueryInput): QueryInput[] {
  const history = loadHistory().filter(
    (item) =>
      !(item.role === entry.role && item.entity === entry.entity &&
        item.predicate === entry.predicate),
  );
  history.unshift(entry);
  const trimmed = history.slice(0, HISTORY_LIMIT);
  sessionStorage.setItem(HISTORY_KEY, JSON.stringify(trimmed));
  return trimmed;
}

/** One in-flight query at a time: responses carrying an superseded token
 * are discarded. */
export class RequestToken {
  private current = 0;

  next(): number {
    return ++this.current;
  }

  isStale(token: number): boolean {
    return token !== this.current;
  }
}
