import type { DistributionRow, QueryInput, SpoResult } from "./types.js";

/** Base URL of the query service; set window.SETPRED_API before loading
 * the app to point somewhere other than the page origin. */
export function apiBase(): string {
  const value = (globalThis as { SETPRED_API?: string }).SETPRED_API;
  return value ? value.replace(/\/$/, "") : "";
}

export function spoUrl(input: QueryInput): string {
  const params = new URLSearchParams();
  params.set(input.role, input.entity);
  params.set("predicate", input.predicate);
  return `${apiBase()}/spo?${params.toString()}`;
}

export function distributionUrl(e: string, c: string): string {
  const params = new URLSearchParams({ e, c });
  return `${apiBase()}/distribution?${params.toString()}`;
}

export class ApiError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
  }
}

async function checked(url: string): Promise<Response> {
  let response: Response;
  try {
    response = await fetch(url);
  } catch (err) {
    throw new ApiError(`service unreachable (${String(err)})`);
  }
  if (!response.ok) {
    let detail = `HTTP ${response.status}`;
    try {
      const body = (await response.json()) as { error?: string };
      if (body.error) detail = body.error;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(detail, response.status);
  }
  return response;
}

export async function fetchSpo(input: QueryInput): Promise<SpoResult> {
  const response = await checked(spoUrl(input));
  return (await response.json()) as SpoResult;
}

export function parseDistributionCsv(text: string): DistributionRow[] {
  const lines = text.trim().split("\n");
  if (lines.length === 0 || lines[0] !== "subject,n_e,v_c,anomaly") {
    throw new ApiError(`unexpected distribution header: ${lines[0] ?? ""}`);
  }
  return lines.slice(1).filter((line) => line.length > 0).map((line) => {
    const [subject, nE, vC, anomaly] = line.split(",");
    return {
      subject: subject ?? "",
      n_e: Number(nE),
      v_c: Number(vC),
      anomaly: anomaly === "1",
    };
  });
}

export async function fetchDistribution(e: string, c: string): Promise<DistributionRow[]> {
  const response = await checked(distributionUrl(e, c));
  return parseDistributionCsv(await response.text());
}
