"""Knowledge-base triple ingestion.

Parses N-Triples and TSV dumps into typed triples, classifies object
datatypes, materializes inverse triples for entity-valued facts, and
applies the minimum-frequency predicate filter.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

INVERSE_MARKER = "^-1"

KB_DBP_RAW = "DBP-raw"
KB_DBP_MAP = "DBP-map"
KB_WD_TRUTHY = "WD-truthy"
KB_FREEBASE = "Freebase"
KNOWN_KBS = (KB_DBP_RAW, KB_DBP_MAP, KB_WD_TRUTHY, KB_FREEBASE)

# Object datatype kinds.
ENTITY = "entity"
INTEGER = "integer"
DECIMAL = "decimal"
DATE = "date"
TEXT = "text"
CSVLIST = "csvlist"
OBJECT_KINDS = (ENTITY, INTEGER, DECIMAL, DATE, CSVLIST, TEXT)

_INTEGER_RE = re.compile(r"^[+-]?\d+$")
_DECIMAL_RE = re.compile(r"^[+-]?(\d+\.\d*|\.\d+)([eE][+-]?\d+)?$|^[+-]?\d+[eE][+-]?\d+$")
_CALENDAR_DATE_RE = re.compile(r"^[+-]?\d{4}-\d{2}(-\d{2})?([T ].*)?$")

DATE_YEAR_MIN = 1900
DATE_YEAR_MAX = 2020

# Datatype hints accepted from typed literals and TSV hint columns. Keys are
# lowercase local names (XSD IRIs are reduced to their fragment).
_HINT_KINDS = {
    "integer": INTEGER, "int": INTEGER, "long": INTEGER, "short": INTEGER,
    "byte": INTEGER, "nonnegativeinteger": INTEGER, "positiveinteger": INTEGER,
    "negativeinteger": INTEGER, "nonpositiveinteger": INTEGER,
    "unsignedint": INTEGER, "unsignedlong": INTEGER,
    "decimal": DECIMAL, "float": DECIMAL, "double": DECIMAL,
    "date": DATE, "datetime": DATE, "gyear": DATE, "gyearmonth": DATE,
    "string": TEXT, "langstring": TEXT, "text": TEXT,
    "entity": ENTITY, "csvlist": CSVLIST,
}


class KbError(Exception):
    """Raised for contract violations in the ingestion layer."""


@dataclass(frozen=True)
class PredicateId:
    """A KB predicate; inverse predicates share the forward base_label."""

    iri: str
    base_label: str
    inverted: bool = False
    kb: str = "custom"

    def inverse(self) -> "PredicateId":
        if self.inverted:
            raise KbError(f"predicate {self.iri} is already an inverse")
        return PredicateId(self.iri + INVERSE_MARKER, self.base_label, True, self.kb)


@dataclass(frozen=True)
class ObjectValue:
    """One triple object: exactly one of the six datatype kinds."""

    kind: str
    value: Union[str, int, float, tuple]

    @classmethod
    def entity(cls, entity_id: str) -> "ObjectValue":
        return cls(ENTITY, entity_id)

    @classmethod
    def integer(cls, v: int) -> "ObjectValue":
        return cls(INTEGER, int(v))

    @classmethod
    def decimal(cls, v: float) -> "ObjectValue":
        return cls(DECIMAL, float(v))

    @classmethod
    def date(cls, v: Union[int, str]) -> "ObjectValue":
        return cls(DATE, v)

    @classmethod
    def text(cls, v: str) -> "ObjectValue":
        return cls(TEXT, v)

    @classmethod
    def csv_list(cls, items: Iterable[str]) -> "ObjectValue":
        items = tuple(items)
        if len(items) < 2 or any(("," in it) or not it for it in items):
            raise KbError("csv list requires >=2 non-empty comma-free items")
        return cls(CSVLIST, items)


@dataclass(frozen=True)
class Triple:
    subject: str
    predicate: PredicateId
    object: ObjectValue

    def __post_init__(self):
        if not self.subject:
            raise KbError("triple subject must be non-empty")


@dataclass(frozen=True)
class ParseError:
    line: int
    reason: str


def local_name(iri: str) -> str:
    """Human-readable label for an IRI: the fragment after the last #, / or :."""
    name = iri.rstrip("/#")
    for sep in ("#", "/", ":"):
        if sep in name:
            name = name.rsplit(sep, 1)[1]
    return name or iri


class PredicateCatalog:
    """Registry of predicates seen during ingestion, keyed by IRI.

    Inverse predicates are derived here so the forward label is reused and
    an inverse is never re-inverted.
    """

    def __init__(self, kb: str = "custom"):
        self.kb = kb
        self._by_iri: dict[str, PredicateId] = {}

    def register(self, iri: str, label: Optional[str] = None) -> PredicateId:
        pred = self._by_iri.get(iri)
        if pred is None:
            if iri.endswith(INVERSE_MARKER):
                forward = self.register(iri[: -len(INVERSE_MARKER)], label)
                return self.inverse_of(forward)
            pred = PredicateId(iri, label or local_name(iri), False, self.kb)
            self._by_iri[iri] = pred
        return pred

    def inverse_of(self, pred: PredicateId) -> PredicateId:
        if pred.inverted:
            raise KbError(f"cannot invert inverse predicate {pred.iri}")
        inv = pred.inverse()
        existing = self._by_iri.get(inv.iri)
        if existing is None:
            self._by_iri[inv.iri] = inv
            existing = inv
        return existing

    def get(self, iri: str) -> Optional[PredicateId]:
        return self._by_iri.get(iri)

    def __contains__(self, iri: str) -> bool:
        return iri in self._by_iri

    def __iter__(self) -> Iterator[PredicateId]:
        return iter(self._by_iri.values())

    def __len__(self) -> int:
        return len(self._by_iri)


def _is_numeric(text: str) -> bool:
    return bool(_INTEGER_RE.match(text) or _DECIMAL_RE.match(text))


def _try_csv_list(lexical: str) -> Optional[ObjectValue]:
    if "," not in lexical:
        return None
    items = [item.strip() for item in lexical.split(",")]
    if len(items) < 2:
        return None
    if any(not item or _is_numeric(item) for item in items):
        return None
    return ObjectValue(CSVLIST, tuple(items))


def classify_object(
    lexical: str,
    datatype_hint: Optional[str] = None,
    date_heuristic: bool = True,
) -> ObjectValue:
    """Classify a literal into one of the six object kinds. Total function.

    An explicit datatype hint wins over the untyped heuristics; in
    particular the bare-year date heuristic only applies to untyped
    integers. Unparseable hinted values fall back to text.
    """
    lexical = lexical.strip()
    if datatype_hint:
        kind = _HINT_KINDS.get(local_name(datatype_hint.strip()).lower())
        if kind == ENTITY:
            return ObjectValue(ENTITY, lexical)
        if kind == INTEGER:
            if _INTEGER_RE.match(lexical):
                return ObjectValue(INTEGER, int(lexical))
            return ObjectValue(TEXT, lexical)
        if kind == DECIMAL:
            try:
                return ObjectValue(DECIMAL, float(lexical))
            except ValueError:
                return ObjectValue(TEXT, lexical)
        if kind == DATE:
            if _INTEGER_RE.match(lexical):
                return ObjectValue(DATE, int(lexical))
            return ObjectValue(DATE, lexical)
        if kind == CSVLIST:
            parsed = _try_csv_list(lexical)
            return parsed if parsed is not None else ObjectValue(TEXT, lexical)
        if kind == TEXT:
            # Comma-separated strings are still a string datatype; refine.
            parsed = _try_csv_list(lexical)
            return parsed if parsed is not None else ObjectValue(TEXT, lexical)
        # Unknown hint: fall through to the untyped rules.

    if _INTEGER_RE.match(lexical):
        v = int(lexical)
        if date_heuristic and DATE_YEAR_MIN <= v <= DATE_YEAR_MAX:
            return ObjectValue(DATE, v)
        return ObjectValue(INTEGER, v)
    if _DECIMAL_RE.match(lexical):
        return ObjectValue(DECIMAL, float(lexical))
    if _CALENDAR_DATE_RE.match(lexical):
        return ObjectValue(DATE, lexical)
    parsed = _try_csv_list(lexical)
    if parsed is not None:
        return parsed
    return ObjectValue(TEXT, lexical)


# ---------------------------------------------------------------------------
# N-Triples / TSV parsing
# ---------------------------------------------------------------------------

_NT_LINE_RE = re.compile(r"^<([^<>]*)>\s+<([^<>]*)>\s+(.+?)\s*\.\s*$")
_NT_LITERAL_RE = re.compile(
    r'^"((?:[^"\\]|\\.)*)"(?:\^\^<([^<>]*)>|@[A-Za-z][A-Za-z0-9-]*)?$'
)

_UNESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t", "r": "\r"}


def _unescape_literal(s: str) -> str:
    def sub(m: re.Match) -> str:
        c = m.group(1)
        if c[0] == "u":
            return chr(int(c[1:], 16))
        if c[0] == "U":
            return chr(int(c[1:], 16))
        return _UNESCAPES.get(c, c)

    return re.sub(r"\\(u[0-9a-fA-F]{4}|U[0-9a-fA-F]{8}|.)", sub, s)


def _escape_literal(s: str) -> str:
    return (
        s.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


def parse_triples(
    lines: Iterable[Union[str, bytes]],
    format: str = "ntriples",
    catalog: Optional[PredicateCatalog] = None,
    date_heuristic: bool = True,
) -> Iterator[Union[Triple, ParseError]]:
    """Stream triples (or per-line parse errors) from a dump.

    Memory use is bounded: one line at a time. Blank lines and `#` comments
    are skipped in both formats. Line numbers are 1-based.
    """
    if format not in ("ntriples", "tsv"):
        raise KbError(f"unknown format: {format}")
    if catalog is None:
        catalog = PredicateCatalog()
    parse_one = _parse_ntriples_line if format == "ntriples" else _parse_tsv_line
    for lineno, raw in enumerate(lines, start=1):
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError:
                yield ParseError(lineno, "undecodable line (not UTF-8)")
                continue
        line = raw.rstrip("\n").rstrip("\r")
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield parse_one(line, lineno, catalog, date_heuristic)


def _parse_ntriples_line(
    line: str, lineno: int, catalog: PredicateCatalog, date_heuristic: bool
) -> Union[Triple, ParseError]:
    m = _NT_LINE_RE.match(line.strip())
    if not m:
        return ParseError(lineno, "incomplete statement")
    subject, pred_iri, obj_part = m.group(1), m.group(2), m.group(3)
    if not subject:
        return ParseError(lineno, "empty subject IRI")
    predicate = catalog.register(pred_iri)
    if obj_part.startswith("<") and obj_part.endswith(">"):
        entity = obj_part[1:-1]
        if not entity:
            return ParseError(lineno, "empty object IRI")
        return Triple(subject, predicate, ObjectValue(ENTITY, entity))
    lm = _NT_LITERAL_RE.match(obj_part)
    if not lm:
        return ParseError(lineno, "malformed object term")
    lexical = _unescape_literal(lm.group(1))
    return Triple(subject, predicate, classify_object(lexical, lm.group(2), date_heuristic))


def _parse_tsv_line(
    line: str, lineno: int, catalog: PredicateCatalog, date_heuristic: bool
) -> Union[Triple, ParseError]:
    cols = line.split("\t")
    if len(cols) < 3 or len(cols) > 4:
        return ParseError(lineno, "incomplete statement" if len(cols) < 3 else "too many columns")
    subject, pred_iri, lexical = cols[0].strip(), cols[1].strip(), cols[2]
    hint = cols[3].strip() if len(cols) == 4 and cols[3].strip() else None
    if not subject:
        return ParseError(lineno, "empty subject")
    if not pred_iri:
        return ParseError(lineno, "empty predicate")
    predicate = catalog.register(pred_iri)
    return Triple(subject, predicate, classify_object(lexical, hint, date_heuristic))


_XSD = "http://www.w3.org/2001/XMLSchema#"
_NT_DATATYPES = {
    INTEGER: _XSD + "integer",
    DECIMAL: _XSD + "decimal",
    TEXT: _XSD + "string",
    CSVLIST: _XSD + "string",
}


def serialize_triple(triple: Triple, format: str = "ntriples") -> str:
    """Render one triple so that re-parsing yields an equal triple."""
    obj = triple.object
    if format == "tsv":
        lexical = ", ".join(obj.value) if obj.kind == CSVLIST else str(obj.value)
        return f"{triple.subject}\t{triple.predicate.iri}\t{lexical}\t{obj.kind}"
    if format != "ntriples":
        raise KbError(f"unknown format: {format}")
    if obj.kind == ENTITY:
        term = f"<{obj.value}>"
    elif obj.kind == DATE:
        if isinstance(obj.value, int):
            term = f'"{obj.value}"^^<{_XSD}gYear>'
        else:
            term = f'"{_escape_literal(str(obj.value))}"^^<{_XSD}date>'
    else:
        lexical = ", ".join(obj.value) if obj.kind == CSVLIST else str(obj.value)
        term = f'"{_escape_literal(lexical)}"^^<{_NT_DATATYPES[obj.kind]}>'
    return f"<{triple.subject}> <{triple.predicate.iri}> {term} ."


def write_catalog_jsonl(predicates: Iterable[PredicateId], fh) -> None:
    for p in sorted(predicates, key=lambda p: p.iri):
        fh.write(json.dumps(
            {"iri": p.iri, "base_label": p.base_label,
             "inverted": p.inverted, "kb": p.kb},
            sort_keys=True,
        ) + "\n")


def read_catalog_jsonl(fh) -> dict:
    """iri -> PredicateId, from the persisted catalog."""
    out = {}
    for line in fh:
        if not line.strip():
            continue
        d = json.loads(line)
        out[d["iri"]] = PredicateId(d["iri"], d["base_label"], d["inverted"], d["kb"])
    return out


def read_triples_artifact(triples_fh, predicates: dict) -> TripleIndex:
    """Rebuild the index from a TSV triples artifact plus its catalog; the
    catalog carries the KB tags and inverse flags."""
    index = TripleIndex()
    for item in parse_triples(triples_fh, "tsv"):
        if isinstance(item, ParseError):
            raise KbError(f"bad triples artifact line {item.line}: {item.reason}")
        pred = predicates.get(item.predicate.iri)
        if pred is None:
            raise KbError(f"triples artifact references unknown predicate "
                          f"{item.predicate.iri}")
        index.add(Triple(item.subject, pred, item.object))
    return index


def write_error_log(errors: Iterable[ParseError], fh, file: str = "") -> int:
    """Sidecar error log: one JSON object per line {line, file, reason}."""
    n = 0
    for err in errors:
        fh.write(json.dumps({"line": err.line, "file": file, "reason": err.reason}) + "\n")
        n += 1
    return n


def materialize_inverses(
    triples: Iterable[Triple], catalog: PredicateCatalog
) -> list[Triple]:
    """Return input plus (o, p^-1, s) for every entity-object (s, p, o), deduplicated.

    Inverse predicates are never re-inverted.
    """
    out: list[Triple] = []
    seen: set[Triple] = set()
    inverses: list[Triple] = []
    for t in triples:
        if t in seen:
            continue
        seen.add(t)
        out.append(t)
        if t.object.kind == ENTITY and not t.predicate.inverted:
            inv_pred = catalog.inverse_of(t.predicate)
            inverses.append(Triple(t.object.value, inv_pred, ObjectValue(ENTITY, t.subject)))
    for t in inverses:
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def filter_frequent(counts: dict, min_count: int = 50) -> set:
    """Predicates appearing in at least min_count triples (inclusive)."""
    return {p for p, n in counts.items() if n >= min_count}


class TripleIndex:
    """Deduplicated in-memory triple store with per-predicate access paths."""

    def __init__(self):
        self._triples: set[Triple] = set()
        self._by_predicate: dict[PredicateId, list[Triple]] = {}
        self._subjects_by_kb: dict[str, set[str]] = {}

    @classmethod
    def from_triples(cls, triples: Iterable[Triple]) -> "TripleIndex":
        idx = cls()
        for t in triples:
            idx.add(t)
        return idx

    def add(self, triple: Triple) -> bool:
        if triple in self._triples:
            return False
        self._triples.add(triple)
        self._by_predicate.setdefault(triple.predicate, []).append(triple)
        self._subjects_by_kb.setdefault(triple.predicate.kb, set()).add(triple.subject)
        return True

    def __len__(self) -> int:
        return len(self._triples)

    def predicates(self) -> list[PredicateId]:
        return sorted(self._by_predicate, key=lambda p: p.iri)

    def triples_of(self, predicate: PredicateId) -> list[Triple]:
        return self._by_predicate.get(predicate, [])

    def triple_counts(self) -> dict[PredicateId, int]:
        return {p: len(ts) for p, ts in self._by_predicate.items()}

    def subjects_of(self, predicate: PredicateId) -> set[str]:
        return {t.subject for t in self.triples_of(predicate)}

    def subject_count(self, kb: Optional[str] = None) -> int:
        if kb is None:
            return len(set().union(*self._subjects_by_kb.values())) if self._subjects_by_kb else 0
        return len(self._subjects_by_kb.get(kb, ()))

    def objects_for(self, subject: str, predicate: PredicateId) -> list[ObjectValue]:
        return [t.object for t in self.triples_of(predicate) if t.subject == subject]

    def subjects_with_object(self, predicate: PredicateId, entity_id: str) -> list[str]:
        return sorted(
            t.subject
            for t in self.triples_of(predicate)
            if t.object.kind == ENTITY and t.object.value == entity_id
        )
