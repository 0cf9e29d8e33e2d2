"""Per-predicate descriptive statistics.

For every predicate we track the datatype distribution of its objects plus
three five-number summaries: objects per subject (functionality), the
integer object values themselves, and integer-valued triples per subject.
Accumulators are value-semantic and mergeable across subject-disjoint
partitions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .kb import CSVLIST, INTEGER, OBJECT_KINDS, PredicateId, Triple


class StatsError(Exception):
    pass


def percentile(values: Sequence[float], p: float) -> float:
    """Nearest-rank percentile over a sorted sequence (no interpolation).

    The result is the element at 1-based index ceil(p*n/100); p=0 maps to
    the first element.
    """
    if len(values) == 0:
        raise StatsError("empty distribution")
    if not 0 <= p <= 100:
        raise StatsError(f"percentile out of range: {p}")
    rank = max(1, math.ceil(p * len(values) / 100))
    return values[rank - 1]


@dataclass(frozen=True)
class FiveNumber:
    mean: float
    min: float
    max: float
    p10: float
    p90: float
    defined: bool = True

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "FiveNumber":
        ordered = sorted(values)
        return cls(
            mean=sum(ordered) / len(ordered),
            min=ordered[0],
            max=ordered[-1],
            p10=percentile(ordered, 10),
            p90=percentile(ordered, 90),
        )

    @classmethod
    def undefined(cls) -> "FiveNumber":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, defined=False)

    def to_dict(self) -> dict:
        return {
            "mean": self.mean, "min": self.min, "max": self.max,
            "p10": self.p10, "p90": self.p90, "defined": self.defined,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FiveNumber":
        return cls(d["mean"], d["min"], d["max"], d["p10"], d["p90"], d.get("defined", True))


@dataclass(frozen=True)
class DatatypeDistribution:
    """Fraction of a predicate's triples per object kind; sums to 1."""

    frac_entity: float = 0.0
    frac_integer: float = 0.0
    frac_decimal: float = 0.0
    frac_date: float = 0.0
    frac_csvlist: float = 0.0
    frac_text: float = 0.0

    @classmethod
    def from_counts(cls, counts: dict, total: int) -> "DatatypeDistribution":
        return cls(*(counts.get(kind, 0) / total for kind in OBJECT_KINDS))

    def fraction(self, kind: str) -> float:
        return getattr(self, f"frac_{kind}")

    def to_dict(self) -> dict:
        return {kind: self.fraction(kind) for kind in OBJECT_KINDS}

    @classmethod
    def from_dict(cls, d: dict) -> "DatatypeDistribution":
        return cls(*(d[kind] for kind in OBJECT_KINDS))


@dataclass(frozen=True)
class PredicateStats:
    predicate: PredicateId
    triple_count: int
    subject_count: int
    datatypes: DatatypeDistribution
    functionality: FiveNumber
    int_values: FiveNumber
    int_per_subject: FiveNumber

    def to_dict(self) -> dict:
        return {
            "predicate": predicate_to_dict(self.predicate),
            "triple_count": self.triple_count,
            "subject_count": self.subject_count,
            "datatypes": self.datatypes.to_dict(),
            "functionality": self.functionality.to_dict(),
            "int_values": self.int_values.to_dict(),
            "int_per_subject": self.int_per_subject.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PredicateStats":
        return cls(
            predicate=predicate_from_dict(d["predicate"]),
            triple_count=d["triple_count"],
            subject_count=d["subject_count"],
            datatypes=DatatypeDistribution.from_dict(d["datatypes"]),
            functionality=FiveNumber.from_dict(d["functionality"]),
            int_values=FiveNumber.from_dict(d["int_values"]),
            int_per_subject=FiveNumber.from_dict(d["int_per_subject"]),
        )


def predicate_to_dict(p: PredicateId) -> dict:
    return {"iri": p.iri, "base_label": p.base_label, "inverted": p.inverted, "kb": p.kb}


def predicate_from_dict(d: dict) -> PredicateId:
    return PredicateId(d["iri"], d["base_label"], d["inverted"], d["kb"])


class StatsAccumulator:
    """Mergeable single-predicate accumulator.

    Merging assumes the partitions hold disjoint triples; subject counts are
    summed, so subject-disjoint splits reproduce single-pass statistics
    exactly. Input is expected to be deduplicated upstream.
    """

    def __init__(self, predicate: PredicateId):
        self.predicate = predicate
        self._objects_per_subject: dict[str, int] = {}
        self._ints_per_subject: dict[str, int] = {}
        self._int_values: list[int] = []
        self._kind_counts: dict[str, int] = {}

    def add(self, triple: Triple) -> None:
        if triple.predicate != self.predicate:
            raise StatsError(
                f"accumulator for {self.predicate.iri} got triple of {triple.predicate.iri}"
            )
        s = triple.subject
        self._objects_per_subject[s] = self._objects_per_subject.get(s, 0) + 1
        kind = triple.object.kind
        self._kind_counts[kind] = self._kind_counts.get(kind, 0) + 1
        if kind == INTEGER:
            self._ints_per_subject[s] = self._ints_per_subject.get(s, 0) + 1
            self._int_values.append(triple.object.value)

    def merge(self, other: "StatsAccumulator") -> "StatsAccumulator":
        if other.predicate != self.predicate:
            raise StatsError("cannot merge accumulators of different predicates")
        merged = StatsAccumulator(self.predicate)
        for acc in (self, other):
            for s, n in acc._objects_per_subject.items():
                merged._objects_per_subject[s] = merged._objects_per_subject.get(s, 0) + n
            for s, n in acc._ints_per_subject.items():
                merged._ints_per_subject[s] = merged._ints_per_subject.get(s, 0) + n
            for kind, n in acc._kind_counts.items():
                merged._kind_counts[kind] = merged._kind_counts.get(kind, 0) + n
        merged._int_values = sorted(self._int_values + other._int_values)
        return merged

    def finalize(self) -> PredicateStats:
        if not self._objects_per_subject:
            raise StatsError("no triples accumulated")
        triple_count = sum(self._objects_per_subject.values())
        int_values = sorted(self._int_values)
        return PredicateStats(
            predicate=self.predicate,
            triple_count=triple_count,
            subject_count=len(self._objects_per_subject),
            datatypes=DatatypeDistribution.from_counts(self._kind_counts, triple_count),
            functionality=FiveNumber.from_values(list(self._objects_per_subject.values())),
            int_values=FiveNumber.from_values(int_values) if int_values else FiveNumber.undefined(),
            int_per_subject=(
                FiveNumber.from_values(list(self._ints_per_subject.values()))
                if self._ints_per_subject
                else FiveNumber.undefined()
            ),
        )


def compute_stats(triples: Iterable[Triple]) -> PredicateStats:
    """Single-pass statistics over the (deduplicated) triples of one predicate."""
    unique = set(triples)
    if not unique:
        raise StatsError("no triples given")
    predicates = {t.predicate for t in unique}
    if len(predicates) != 1:
        raise StatsError("triples span multiple predicates")
    acc = StatsAccumulator(predicates.pop())
    for t in sorted(unique, key=lambda t: (t.subject, str(t.object.value))):
        acc.add(t)
    return acc.finalize()


def write_stats_jsonl(stats: Iterable[PredicateStats], fh) -> None:
    for st in sorted(stats, key=lambda s: s.predicate.iri):
        fh.write(json.dumps(st.to_dict(), sort_keys=True) + "\n")


def read_stats_jsonl(fh) -> list[PredicateStats]:
    return [PredicateStats.from_dict(json.loads(line)) for line in fh if line.strip()]
