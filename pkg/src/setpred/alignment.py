"""Alignment of enumerating and counting predicates.

For every same-KB (enumerating, counting) pair sharing at least one
subject we compute nine heuristic scores in three families (subject
co-occurrence, per-subject value distribution, label similarity) plus a
per-direction combined score, and rank the top-k partners of each source
predicate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .kb import CSVLIST, ENTITY, INTEGER, ObjectValue, PredicateId, TripleIndex
from .labels import EmbeddingTable, cosine_similarity, embed_label, tokenize_label
from .stats import percentile, predicate_from_dict, predicate_to_dict

COUNTING_TO_ENUMERATING = "counting_to_enumerating"
ENUMERATING_TO_COUNTING = "enumerating_to_counting"
DIRECTIONS = (COUNTING_TO_ENUMERATING, ENUMERATING_TO_COUNTING)

METRICS = (
    "absolute", "jaccard", "conditional_e", "conditional_c", "pmi",
    "perfect_match_ratio", "correlation", "ptile_vm", "cosine_sim",
)

# One representative per heuristic family, per ranking direction.
DEFAULT_REPRESENTATIVES = {
    COUNTING_TO_ENUMERATING: ("conditional_e", "correlation", "cosine_sim"),
    ENUMERATING_TO_COUNTING: ("pmi", "perfect_match_ratio", "cosine_sim"),
}

VALUE_AGGREGATIONS = ("max", "mean", "latest")


class AlignmentError(Exception):
    pass


@dataclass(frozen=True)
class CooccurrenceRecord:
    subject: str
    n_e: int
    v_c: float


@dataclass
class AlignmentPair:
    e: PredicateId
    c: PredicateId
    kb: str
    support: int
    n_subjects_e: int
    n_subjects_c: int
    n_subjects_total: int
    scores: dict
    records: tuple
    flags: dict

    def to_dict(self, combined: Optional[float] = None, direction: Optional[str] = None,
                rank: Optional[int] = None) -> dict:
        scores = dict(self.scores)
        if combined is not None:
            scores["combined"] = combined
        d = {
            "e": predicate_to_dict(self.e),
            "c": predicate_to_dict(self.c),
            "kb": self.kb,
            "support": self.support,
            "n_subjects_e": self.n_subjects_e,
            "n_subjects_c": self.n_subjects_c,
            "n_subjects_total": self.n_subjects_total,
            "scores": scores,
            "flags": self.flags,
        }
        if direction is not None:
            d["direction"] = direction
        if rank is not None:
            d["rank"] = rank
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "AlignmentPair":
        scores = {k: v for k, v in d["scores"].items() if k in METRICS}
        return cls(
            e=predicate_from_dict(d["e"]),
            c=predicate_from_dict(d["c"]),
            kb=d["kb"],
            support=d["support"],
            n_subjects_e=d["n_subjects_e"],
            n_subjects_c=d["n_subjects_c"],
            n_subjects_total=d["n_subjects_total"],
            scores=scores,
            records=(),
            flags=d.get("flags", {}),
        )


# --- co-occurrence family -------------------------------------------------

def metric_absolute(shared: int) -> float:
    return float(shared)


def metric_jaccard(n_e_subjects: int, n_c_subjects: int, shared: int) -> float:
    return shared / (n_e_subjects + n_c_subjects - shared)


def metric_conditional_e(shared: int, n_e_subjects: int) -> float:
    return shared / n_e_subjects


def metric_conditional_c(shared: int, n_c_subjects: int) -> float:
    return shared / n_c_subjects


def metric_pmi(shared: int, n_e_subjects: int, n_c_subjects: int, n_total: int) -> float:
    """log2 of observed vs independent co-occurrence over subjects."""
    if shared == 0:
        return float("-inf")
    return math.log2((shared * n_total) / (n_e_subjects * n_c_subjects))


# --- value-distribution family ---------------------------------------------

def metric_perfect_match_ratio(records: Sequence[CooccurrenceRecord]) -> float:
    if not records:
        raise AlignmentError("no co-occurrence records")
    return sum(1 for r in records if r.n_e == r.v_c) / len(records)


def metric_correlation(records: Sequence[CooccurrenceRecord]) -> float:
    """Pearson correlation of (n_e, v_c); 0 when undefined (fewer than two
    records or zero variance on either side)."""
    n = len(records)
    if n < 2:
        return 0.0
    xs = [r.n_e for r in records]
    ys = [r.v_c for r in records]
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    syy = sum((y - my) ** 2 for y in ys)
    if sxx == 0.0 or syy == 0.0:
        return 0.0
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return sxy / math.sqrt(sxx * syy)


def metric_ptile_vm(records: Sequence[CooccurrenceRecord]) -> float:
    """min of the two ratios of 90th-percentile values (nearest-rank) of the
    co-occurring distributions; 0 when either percentile is 0."""
    if not records:
        raise AlignmentError("no co-occurrence records")
    p_e = percentile(sorted(r.n_e for r in records), 90)
    p_c = percentile(sorted(r.v_c for r in records), 90)
    if p_e == 0 or p_c == 0:
        return 0.0
    return min(p_e / p_c, p_c / p_e)


# --- construction -----------------------------------------------------------

def enumerated_object_count(objects: Iterable[ObjectValue]) -> int:
    """Distinct entity objects plus the item counts of comma-list objects."""
    entities = set()
    csv_items = 0
    for o in objects:
        if o.kind == ENTITY:
            entities.add(o.value)
        elif o.kind == CSVLIST:
            csv_items += len(o.value)
    return len(entities) + csv_items


def aggregate_count_value(objects: Iterable[ObjectValue], mode: str = "max"):
    """Collapse a subject's integer values for a counting predicate."""
    ints = [o.value for o in objects if o.kind == INTEGER]
    if not ints:
        return None
    if mode == "max":
        return max(ints)
    if mode == "mean":
        return sum(ints) / len(ints)
    if mode == "latest":
        return ints[-1]
    raise AlignmentError(f"unknown aggregation mode: {mode}")


def _subject_groups(index: TripleIndex, predicate: PredicateId) -> dict:
    groups: dict[str, list[ObjectValue]] = {}
    for t in index.triples_of(predicate):
        groups.setdefault(t.subject, []).append(t.object)
    return groups


def enumerating_subject_counts(index: TripleIndex, e: PredicateId) -> dict:
    """subject -> enumerated object count, for subjects with >=1 countable
    object."""
    counts = {
        s: enumerated_object_count(objs)
        for s, objs in _subject_groups(index, e).items()
    }
    return {s: n for s, n in counts.items() if n >= 1}


def counting_subject_values(index: TripleIndex, c: PredicateId,
                            value_agg: str = "max") -> dict:
    """subject -> aggregated integer value, for subjects with >=1 integer
    object."""
    values = {
        s: aggregate_count_value(objs, value_agg)
        for s, objs in _subject_groups(index, c).items()
    }
    return {s: v for s, v in values.items() if v is not None}


def pair_from_index(
    index: TripleIndex,
    e: PredicateId,
    c: PredicateId,
    value_agg: str = "max",
    embeddings: Optional[EmbeddingTable] = None,
) -> Optional[AlignmentPair]:
    """Score a single (e, c) pair; None when they share no subject."""
    se = enumerating_subject_counts(index, e)
    sc = counting_subject_values(index, c, value_agg)
    if not se or not sc or e.kb != c.kb:
        return None
    return _score_pair(index, e, c, se, sc, embeddings)


class AlignmentTable:
    """All scored pairs for one or more KBs, plus the source registries."""

    def __init__(self, pairs, enumerating, counting):
        self.pairs: list[AlignmentPair] = list(pairs)
        self.enumerating: dict[str, PredicateId] = {p.iri: p for p in enumerating}
        self.counting: dict[str, PredicateId] = {p.iri: p for p in counting}
        self._by_e: dict[str, list[AlignmentPair]] = {}
        self._by_c: dict[str, list[AlignmentPair]] = {}
        for pair in self.pairs:
            self._by_e.setdefault(pair.e.iri, []).append(pair)
            self._by_c.setdefault(pair.c.iri, []).append(pair)

    def candidates(self, source: PredicateId, direction: str) -> list[AlignmentPair]:
        if direction == COUNTING_TO_ENUMERATING:
            if source.iri not in self.counting:
                raise AlignmentError(f"unknown source predicate: {source.iri}")
            return list(self._by_c.get(source.iri, []))
        if direction == ENUMERATING_TO_COUNTING:
            if source.iri not in self.enumerating:
                raise AlignmentError(f"unknown source predicate: {source.iri}")
            return list(self._by_e.get(source.iri, []))
        raise AlignmentError(f"unknown direction: {direction}")

    def sources(self, direction: str) -> list[PredicateId]:
        side = self.counting if direction == COUNTING_TO_ENUMERATING else self.enumerating
        return sorted(side.values(), key=lambda p: p.iri)


def _score_pair(index, e, c, se, sc, embeddings) -> Optional[AlignmentPair]:
    shared = sorted(set(se) & set(sc))
    if not shared:
        return None
    records = tuple(CooccurrenceRecord(s, se[s], sc[s]) for s in shared)
    n_total = index.subject_count(e.kb)
    flags = {}
    correlation = metric_correlation(records)
    if len(records) < 2 or len({r.n_e for r in records}) == 1 \
            or len({r.v_c for r in records}) == 1:
        flags["correlation"] = "undefined"
    ptile = metric_ptile_vm(records)
    if ptile == 0.0:
        flags["ptile_vm"] = "zero_percentile"
    if embeddings is not None:
        cos = cosine_similarity(
            embed_label(tokenize_label(e.base_label), embeddings),
            embed_label(tokenize_label(c.base_label), embeddings),
        )
    else:
        cos = 0.0
        flags["cosine_sim"] = "no_embeddings"
    scores = {
        "absolute": metric_absolute(len(records)),
        "jaccard": metric_jaccard(len(se), len(sc), len(records)),
        "conditional_e": metric_conditional_e(len(records), len(se)),
        "conditional_c": metric_conditional_c(len(records), len(sc)),
        "pmi": metric_pmi(len(records), len(se), len(sc), n_total),
        "perfect_match_ratio": metric_perfect_match_ratio(records),
        "correlation": correlation,
        "ptile_vm": ptile,
        "cosine_sim": cos,
    }
    return AlignmentPair(
        e=e, c=c, kb=e.kb,
        support=len(records),
        n_subjects_e=len(se),
        n_subjects_c=len(sc),
        n_subjects_total=n_total,
        scores=scores,
        records=records,
        flags=flags,
    )


def build_alignment_table(
    index: TripleIndex,
    enumerating: Sequence[PredicateId],
    counting: Sequence[PredicateId],
    embeddings: Optional[EmbeddingTable] = None,
    value_agg: str = "max",
) -> AlignmentTable:
    """Join the classifier outputs over the triple index and score every
    co-occurring same-KB pair."""
    if value_agg not in VALUE_AGGREGATIONS:
        raise AlignmentError(f"unknown aggregation mode: {value_agg}")

    e_subjects = {e.iri: enumerating_subject_counts(index, e) for e in enumerating}
    c_subjects = {c.iri: counting_subject_values(index, c, value_agg)
                  for c in counting}

    pairs = []
    for e in sorted(enumerating, key=lambda p: p.iri):
        if not e_subjects[e.iri]:
            continue
        for c in sorted(counting, key=lambda p: p.iri):
            if c.kb != e.kb or not c_subjects[c.iri]:
                continue
            pair = _score_pair(index, e, c, e_subjects[e.iri], c_subjects[c.iri],
                               embeddings)
            if pair is not None:
                pairs.append(pair)
    return AlignmentTable(pairs, enumerating, counting)


# --- combined score and ranking ---------------------------------------------

def min_max_normalize(values: Sequence[float]) -> list[float]:
    """Min-max over a candidate pool; a constant pool normalizes to 1."""
    lo, hi = min(values), max(values)
    if hi == lo:
        return [1.0] * len(values)
    return [(v - lo) / (hi - lo) for v in values]


def combined_from_normalized(normalized: Sequence[float]) -> float:
    return sum(normalized) / len(normalized)


def combined_scores(
    candidates: Sequence[AlignmentPair],
    direction: str,
    representatives: Optional[Sequence[str]] = None,
    mode: str = "normalized",
) -> list[float]:
    """Combined score per candidate: the mean of one representative metric
    per family, min-max normalized across the candidate pool (or taken raw
    with mode="raw")."""
    if direction not in DIRECTIONS:
        raise AlignmentError(f"unknown direction: {direction}")
    reps = tuple(representatives or DEFAULT_REPRESENTATIVES[direction])
    if not candidates:
        return []
    columns = []
    for metric in reps:
        raw = [p.scores[metric] for p in candidates]
        columns.append(min_max_normalize(raw) if mode == "normalized" else raw)
    return [combined_from_normalized([col[i] for col in columns])
            for i in range(len(candidates))]


@dataclass(frozen=True)
class RankedAlignment:
    pair: AlignmentPair
    combined: float
    rank: int


def target_of(pair: AlignmentPair, direction: str) -> PredicateId:
    return pair.e if direction == COUNTING_TO_ENUMERATING else pair.c


def rank_alignments(
    table: AlignmentTable,
    source: PredicateId,
    direction: str,
    k: int = 3,
    min_support: int = 50,
    combine: str = "normalized",
    representatives: Optional[Sequence[str]] = None,
) -> list[RankedAlignment]:
    """Top-k same-KB partners of a source predicate by combined score.

    Candidates below min_support are dropped before normalization; ties
    break by support, then by target IRI.
    """
    candidates = [p for p in table.candidates(source, direction)
                  if p.support >= min_support]
    combined = combined_scores(candidates, direction, representatives, combine)
    order = sorted(
        range(len(candidates)),
        key=lambda i: (
            -combined[i],
            -candidates[i].support,
            target_of(candidates[i], direction).iri,
        ),
    )
    return [
        RankedAlignment(candidates[i], combined[i], rank)
        for rank, i in enumerate(order[:k], start=1)
    ]


# --- value-distribution export ----------------------------------------------

DISTRIBUTION_HEADER = "subject,n_e,v_c,anomaly"


def export_value_distribution(pair: AlignmentPair) -> list[tuple]:
    """One row per co-occurring subject, sorted by subject; anomaly marks
    subjects whose counting value is below the enumerated count."""
    if not pair.records:
        raise AlignmentError("pair has no co-occurrence records")
    return [
        (r.subject, r.n_e, r.v_c, 1 if r.v_c < r.n_e else 0)
        for r in sorted(pair.records, key=lambda r: r.subject)
    ]


def write_distribution_csv(pair: AlignmentPair, fh) -> int:
    rows = export_value_distribution(pair)
    fh.write(DISTRIBUTION_HEADER + "\n")
    for subject, n_e, v_c, anomaly in rows:
        fh.write(f"{subject},{n_e},{v_c},{anomaly}\n")
    return len(rows)


def read_distribution_csv(fh) -> list[tuple]:
    header = fh.readline().strip()
    if header != DISTRIBUTION_HEADER:
        raise AlignmentError(f"unexpected header: {header}")
    rows = []
    for line in fh:
        if not line.strip():
            continue
        subject, n_e, v_c, anomaly = line.rstrip("\n").split(",")
        v = float(v_c)
        rows.append((subject, int(n_e), int(v) if v.is_integer() else v, int(anomaly)))
    return rows


def write_pairs_jsonl(table: AlignmentTable, fh) -> None:
    for pair in sorted(table.pairs, key=lambda p: (p.kb, p.e.iri, p.c.iri)):
        fh.write(json.dumps(pair.to_dict(), sort_keys=True) + "\n")


def read_pairs_jsonl(fh) -> list[AlignmentPair]:
    return [AlignmentPair.from_dict(json.loads(line)) for line in fh if line.strip()]
