/** Wire types mirroring the query-service JSON. The console renders these
 * verbatim and never recomputes scores. */

export interface PredicateRef {
  iri: string;
  base_label: string;
  inverted: boolean;
  kb: string;
}

export interface ObjectValue {
  kind: "entity" | "integer" | "decimal" | "date" | "text" | "csvlist";
  value: string | number | string[];
}

export type Direction = "counting_to_enumerating" | "enumerating_to_counting";

export interface Alignment {
  predicate: PredicateRef;
  direction: Direction;
  combined: number;
  support: number;
  values: ObjectValue[];
  has_values: boolean;
}

export interface SpoResult {
  query: { subject: string | null; predicate: string; object: string | null };
  answers: ObjectValue[];
  alignments: Alignment[];
}

export interface DistributionRow {
  subject: string;
  n_e: number;
  v_c: number;
  anomaly: boolean;
}

export interface QueryInput {
  role: "subject" | "object";
  entity: string;
  predicate: string;
}
