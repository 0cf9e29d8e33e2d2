"""Domain/range profiling of predicates over a fixed high-level class set.

Each predicate gets a domain and a range class by majority vote over a
seeded sample of its subjects and entity objects. Entities missing from the
class map fall back to Thing; literal-only ranges become Literal.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Iterable, Optional

from .kb import ENTITY, PredicateId, TripleIndex
from .stats import predicate_from_dict, predicate_to_dict

PERSON = "Person"
PLACE = "Place"
ORGANIZATION = "Organization"
EVENT = "Event"
WORK = "Work"
THING = "Thing"
LITERAL = "Literal"

# Tie-break order for majority votes; Literal never competes (it only
# appears for entity-free ranges).
CLASS_ORDER = (PERSON, PLACE, ORGANIZATION, EVENT, WORK, THING)
HIGH_LEVEL_CLASSES = CLASS_ORDER + (LITERAL,)


class TypeProfileError(Exception):
    pass


@dataclass(frozen=True)
class TypeProfile:
    predicate: PredicateId
    domain: str
    range: str
    domain_sample_size: int
    range_sample_size: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "predicate": predicate_to_dict(self.predicate),
            "domain": self.domain,
            "range": self.range,
            "domain_sample_size": self.domain_sample_size,
            "range_sample_size": self.range_sample_size,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TypeProfile":
        return cls(
            predicate_from_dict(d["predicate"]), d["domain"], d["range"],
            d["domain_sample_size"], d["range_sample_size"], d["seed"],
        )


def load_class_map(fh) -> dict[str, str]:
    """Read an entity<TAB>class mapping; unknown class names are rejected."""
    mapping: dict[str, str] = {}
    for lineno, line in enumerate(fh, start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise TypeProfileError(f"class map line {lineno}: expected 2 columns")
        entity, cls = parts[0].strip(), parts[1].strip()
        if cls not in CLASS_ORDER:
            raise TypeProfileError(f"class map line {lineno}: unknown entity class {cls!r}")
        mapping[entity] = cls
    return mapping


def reservoir_sample(items: Iterable[str], n: int, seed: int) -> list[str]:
    """Algorithm-R reservoir sample, deterministic for a given seed."""
    rng = random.Random(seed)
    reservoir: list[str] = []
    for i, item in enumerate(items):
        if i < n:
            reservoir.append(item)
        else:
            j = rng.randint(0, i)
            if j < n:
                reservoir[j] = item
    return reservoir


def sample_entities(
    index: TripleIndex,
    predicate: PredicateId,
    role: str,
    n: int = 100,
    seed: int = 0,
) -> list[str]:
    """Uniform sample (without replacement) of a predicate's subject or
    object entities. Object sampling only sees entity objects, so a
    literal-only predicate yields an empty list.
    """
    triples = index.triples_of(predicate)
    if not triples:
        raise TypeProfileError(f"predicate {predicate.iri} has no triples")
    if role == "subject":
        pool = {t.subject for t in triples}
    elif role == "object":
        pool = {t.object.value for t in triples if t.object.kind == ENTITY}
    else:
        raise TypeProfileError(f"unknown role: {role}")
    return reservoir_sample(sorted(pool), n, seed)


def majority_class(entities: Iterable[str], class_map: dict[str, str]) -> str:
    """Most frequent mapped class; unmapped entities count as Thing, an empty
    entity list means a literal-only range. Ties break by CLASS_ORDER.
    """
    tally: dict[str, int] = {}
    empty = True
    for e in entities:
        empty = False
        cls = class_map.get(e, THING)
        tally[cls] = tally.get(cls, 0) + 1
    if empty:
        return LITERAL
    best = max(CLASS_ORDER, key=lambda c: (tally.get(c, 0), -CLASS_ORDER.index(c)))
    return best


def profile_predicate(
    index: TripleIndex,
    predicate: PredicateId,
    class_map: dict[str, str],
    n: int = 100,
    seed: int = 0,
) -> TypeProfile:
    subjects = sample_entities(index, predicate, "subject", n, seed)
    objects = sample_entities(index, predicate, "object", n, seed)
    return TypeProfile(
        predicate=predicate,
        domain=majority_class(subjects, class_map),
        range=majority_class(objects, class_map),
        domain_sample_size=len(subjects),
        range_sample_size=len(objects),
        seed=seed,
    )


def write_profiles_jsonl(profiles: Iterable[TypeProfile], fh) -> None:
    for prof in sorted(profiles, key=lambda p: p.predicate.iri):
        fh.write(json.dumps(prof.to_dict(), sort_keys=True) + "\n")


def read_profiles_jsonl(fh) -> list[TypeProfile]:
    return [TypeProfile.from_dict(json.loads(line)) for line in fh if line.strip()]
