"""Read-only SPO query service.

Serves single-triple queries plus the ranked aligned set predicates of the
query predicate, backed by immutable pipeline artifacts loaded once at
startup. Endpoints: /health, /predicates, /spo, /alignments,
/pairs/{e}/{c}/distribution (with a /distribution?e=&c= alias for IRIs
containing slashes).
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from . import __version__
from .alignment import (
    COUNTING_TO_ENUMERATING, ENUMERATING_TO_COUNTING,
    pair_from_index, write_distribution_csv,
)
from .kb import (
    ENTITY, ObjectValue, PredicateId, TripleIndex,
    read_catalog_jsonl, read_triples_artifact,
)
from .stats import predicate_to_dict


class ServiceError(Exception):
    pass


def _object_to_json(obj: ObjectValue) -> dict:
    value = list(obj.value) if isinstance(obj.value, tuple) else obj.value
    return {"kind": obj.kind, "value": value}


@dataclass
class ServiceState:
    """Immutable artifact snapshot shared by all requests."""

    index: TripleIndex
    predicates: dict  # iri -> PredicateId
    ranked: dict  # direction -> source iri -> [ranked pair dict, ...]
    enumerating: set
    counting: set
    value_agg: str = "max"

    @classmethod
    def from_objects(cls, index, ranked_records, enumerating=(), counting=(),
                     value_agg="max"):
        predicates = {p.iri: p for p in index.predicates()}
        ranked: dict = {COUNTING_TO_ENUMERATING: {}, ENUMERATING_TO_COUNTING: {}}
        for rec in ranked_records:
            direction = rec["direction"]
            source = rec["c"]["iri"] if direction == COUNTING_TO_ENUMERATING else rec["e"]["iri"]
            ranked.setdefault(direction, {}).setdefault(source, []).append(rec)
        for by_source in ranked.values():
            for records in by_source.values():
                records.sort(key=lambda r: r["rank"])
        return cls(index, predicates, ranked,
                   set(enumerating), set(counting), value_agg)

    def resolve_predicate(self, name: str) -> Optional[PredicateId]:
        if name in self.predicates:
            return self.predicates[name]
        matches = [p for p in self.predicates.values() if p.base_label == name
                   and not p.inverted]
        matches = matches or [p for p in self.predicates.values()
                              if (p.base_label + "^-1" if p.inverted else p.base_label) == name]
        if len(matches) == 1:
            return matches[0]
        return None


def load_service_state(
    triples_path: Path,
    catalog_path: Path,
    ranked_path: Path,
    classified_paths: dict,
    value_agg: str = "max",
) -> ServiceState:
    """Load artifacts, failing with the offending path in the message."""
    for path in [triples_path, catalog_path, ranked_path, *classified_paths.values()]:
        if not Path(path).exists():
            raise ServiceError(f"missing artifact: {path}")

    with open(catalog_path) as fh:
        predicates = read_catalog_jsonl(fh)
    with open(triples_path) as fh:
        index = read_triples_artifact(fh, predicates)

    with open(ranked_path) as fh:
        ranked_records = [json.loads(line) for line in fh if line.strip()]

    classified = {}
    for kind, path in classified_paths.items():
        with open(path) as fh:
            rows = [json.loads(line) for line in fh if line.strip()]
        classified[kind] = {
            r["predicate"]["iri"] for r in rows if r["label"] and not r.get("id_filtered")
        }
    return ServiceState.from_objects(
        index, ranked_records,
        classified.get("enumerating", set()), classified.get("counting", set()),
        value_agg,
    )


def create_app(state: ServiceState, cors_origin: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="setpred query service", version=__version__)
    if cors_origin:
        app.add_middleware(
            CORSMiddleware, allow_origins=[cors_origin],
            allow_methods=["GET"], allow_headers=["*"],
        )

    def error(status: int, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": message})

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "version": __version__,
            "triples": len(state.index),
            "predicates": len(state.predicates),
        }

    @app.get("/predicates")
    def predicates(kb: Optional[str] = None):
        counts = {p.iri: n for p, n in state.index.triple_counts().items()}
        rows = []
        for iri, p in sorted(state.predicates.items()):
            if kb and p.kb != kb:
                continue
            rows.append({
                **predicate_to_dict(p),
                "triple_count": counts.get(iri, 0),
                "enumerating": iri in state.enumerating,
                "counting": iri in state.counting,
            })
        return rows

    def _alignments_for(source_iri: str, k: Optional[int] = None) -> list:
        merged = []
        for direction in (COUNTING_TO_ENUMERATING, ENUMERATING_TO_COUNTING):
            for rec in state.ranked.get(direction, {}).get(source_iri, []):
                target = rec["e"] if direction == COUNTING_TO_ENUMERATING else rec["c"]
                merged.append((rec["scores"]["combined"], rec, target, direction))
        merged.sort(key=lambda item: (-item[0], item[2]["iri"]))
        if k is not None:
            merged = merged[:k]
        return merged

    @app.get("/spo")
    def spo(request: Request, predicate: str,
            subject: Optional[str] = None, object: Optional[str] = None,
            k: Optional[int] = None):
        if (subject is None) == (object is None):
            return error(400, "exactly one of subject and object required")
        pred = state.resolve_predicate(predicate)
        if pred is None:
            return error(404, "unknown predicate")
        anchor = subject if subject is not None else object
        if subject is not None:
            answers = sorted(
                state.index.objects_for(subject, pred),
                key=lambda o: (o.kind, str(o.value)),
            )
        else:
            answers = [
                ObjectValue(ENTITY, s)
                for s in state.index.subjects_with_object(pred, object)
            ]
        alignments = []
        for combined, rec, target, direction in _alignments_for(pred.iri, k):
            target_pred = state.predicates.get(target["iri"])
            values = []
            if target_pred is not None:
                values = sorted(
                    state.index.objects_for(anchor, target_pred),
                    key=lambda o: (o.kind, str(o.value)),
                )
            alignments.append({
                "predicate": target,
                "direction": direction,
                "combined": combined,
                "support": rec["support"],
                "values": [_object_to_json(v) for v in values],
                "has_values": bool(values),
            })
        return {
            "query": {"subject": subject, "predicate": pred.iri, "object": object},
            "answers": [_object_to_json(o) for o in answers],
            "alignments": alignments,
        }

    @app.get("/alignments")
    def alignments(predicate: str, k: Optional[int] = None,
                   direction: Optional[str] = None):
        pred = state.resolve_predicate(predicate)
        if pred is None:
            return error(404, "unknown predicate")
        rows = []
        for combined, rec, target, rec_direction in _alignments_for(pred.iri, k):
            if direction and rec_direction != direction:
                continue
            rows.append(rec)
        return {"predicate": pred.iri, "alignments": rows}

    def _distribution(e_name: str, c_name: str):
        e = state.resolve_predicate(e_name)
        c = state.resolve_predicate(c_name)
        if e is None or c is None:
            return error(404, "unknown predicate")
        pair = pair_from_index(state.index, e, c, state.value_agg)
        if pair is None:
            return error(404, "unknown pair")
        buf = io.StringIO()
        write_distribution_csv(pair, buf)
        return PlainTextResponse(buf.getvalue(), media_type="text/csv")

    @app.get("/pairs/{e}/{c}/distribution")
    def pair_distribution(e: str, c: str):
        return _distribution(e, c)

    @app.get("/distribution")
    def distribution_alias(e: str, c: str):
        return _distribution(e, c)

    return app


def serve(
    state: ServiceState,
    host: str = "127.0.0.1",
    port: int = 8040,
    workers: int = 0,
    cors_origin: Optional[str] = None,
):  # pragma: no cover - exercised via the CLI against a live socket
    import uvicorn

    app = create_app(state, cors_origin)
    uvicorn.run(app, host=host, port=port,
                limit_concurrency=workers or None, log_level="info")
