"""Pipeline command line.

Stages: ingest -> stats -> profile -> features -> train -> classify ->
align -> evaluate / export-distribution / serve. Every stage writes its
artifacts plus a manifest (inputs, config hash, seed, versions) into the
artifacts directory. Re-running a stage with identical inputs, config and
seed reproduces the artifacts byte for byte (manifests differ only in
their timestamp).

Exit codes: 0 ok, 1 processing failure, 2 config error, 3 missing artifact
dependency.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, alignment, classifier, evaluate, kb, labels, service, stats, typeprof
from .config import Config, ConfigError, load_config

EXIT_PROCESSING = 1
EXIT_CONFIG = 2
EXIT_MISSING = 3

TRIPLES = "triples.tsv"
CATALOG = "catalog.jsonl"
ERRORS_LOG = "errors.log"
STATS = "stats.jsonl"
PROFILES = "profiles.jsonl"
FEATURES = {k: f"features_{k}.jsonl" for k in classifier.KINDS}
MODELS = {k: f"model_{k}.json" for k in classifier.KINDS}
CLASSIFIED = {k: f"classified_{k}.jsonl" for k in classifier.KINDS}
PAIRS = "alignment_pairs.jsonl"
RANKED = "alignments_ranked.jsonl"

_STAGE_OF_ARTIFACT = {
    TRIPLES: "ingestion", CATALOG: "ingestion", STATS: "stats",
    PROFILES: "profile",
    FEATURES["enumerating"]: "feature", FEATURES["counting"]: "feature",
    MODELS["enumerating"]: "model", MODELS["counting"]: "model",
    CLASSIFIED["enumerating"]: "classification",
    CLASSIFIED["counting"]: "classification",
    PAIRS: "alignment", RANKED: "alignment",
}


class MissingArtifact(Exception):
    pass


def _require(out_dir: Path, *names: str) -> list:
    paths = []
    for name in names:
        path = out_dir / name
        if not path.exists():
            stage = _STAGE_OF_ARTIFACT.get(name, "upstream")
            raise MissingArtifact(f"{stage} artifacts missing: {path}")
        paths.append(path)
    return paths


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_dir: Path, stage: str, inputs, config: Config, seed=None):
    manifest = {
        "stage": stage,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "config_hash": config.digest(),
        "seed": seed,
        "versions": {
            "setpred": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
        },
        "inputs": {str(p): _sha256(Path(p)) for p in inputs if Path(p).exists()},
    }
    with open(out_dir / f"manifest_{stage}.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _opt(flag_value, config: Config, section: str, key: str, default, cast="str"):
    if flag_value is not None:
        return flag_value
    getter = {"str": config.get, "int": config.get_int, "bool": config.get_bool}[cast]
    return getter(section, key, default)


def _out_dir(args, config: Config) -> Path:
    out = _opt(args.out, config, "paths", "artifacts", "artifacts")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_index(out_dir: Path):
    triples_path, catalog_path = _require(out_dir, TRIPLES, CATALOG)
    with open(catalog_path) as fh:
        predicates = kb.read_catalog_jsonl(fh)
    with open(triples_path) as fh:
        index = kb.read_triples_artifact(fh, predicates)
    return index, predicates


def _read_jsonl(path: Path) -> list:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def _write_jsonl(path: Path, rows) -> None:
    with open(path, "w") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")


# --- stages -------------------------------------------------------------------

def cmd_ingest(args, config: Config) -> int:
    out_dir = _out_dir(args, config)
    input_path = Path(_opt(args.input, config, "paths", "input", None) or "")
    if not str(input_path):
        raise ConfigError("no input file (--input or paths.input)")
    if not input_path.exists():
        raise MissingArtifact(f"input file missing: {input_path}")
    format = _opt(args.format, config, "ingest", "format", "ntriples")
    kb_tag = _opt(args.kb, config, "ingest", "kb", "custom")
    inverse = _opt(args.inverse, config, "ingest", "inverse", True, "bool")
    dedup = _opt(args.dedup, config, "ingest", "dedup", True, "bool")
    date_heuristic = _opt(None, config, "ingest", "date_heuristic", True, "bool")

    catalog = kb.PredicateCatalog(kb_tag)
    triples, errors = [], []
    with open(input_path, encoding="utf-8") as fh:
        for item in kb.parse_triples(fh, format, catalog, date_heuristic):
            (triples if isinstance(item, kb.Triple) else errors).append(item)
    if inverse:
        triples = kb.materialize_inverses(triples, catalog)
    if dedup:
        triples = sorted(set(triples), key=lambda t: (t.subject, t.predicate.iri,
                                                      t.object.kind, str(t.object.value)))
    with open(out_dir / TRIPLES, "w") as fh:
        for t in triples:
            fh.write(kb.serialize_triple(t, "tsv") + "\n")
    with open(out_dir / CATALOG, "w") as fh:
        kb.write_catalog_jsonl(catalog, fh)
    with open(out_dir / ERRORS_LOG, "w") as fh:
        kb.write_error_log(errors, fh, file=str(input_path))
    _write_manifest(out_dir, "ingest", [input_path], config)
    print(f"ingest: {len(triples)} triples, {len(catalog)} predicates, "
          f"{len(errors)} parse errors -> {out_dir}")
    return 0


def cmd_stats(args, config: Config) -> int:
    out_dir = _out_dir(args, config)
    index, predicates = _load_index(out_dir)
    min_count = _opt(args.min_count, config, "stats", "min_count", 50, "int")
    counts = {p.iri: n for p, n in index.triple_counts().items()}
    frequent = kb.filter_frequent(counts, min_count)
    results = [
        stats.compute_stats(index.triples_of(predicates[iri]))
        for iri in sorted(frequent)
    ]
    with open(out_dir / STATS, "w") as fh:
        stats.write_stats_jsonl(results, fh)
    _write_manifest(out_dir, "stats", [out_dir / TRIPLES], config)
    print(f"stats: {len(results)}/{len(counts)} predicates at min_count={min_count}")
    return 0


def cmd_profile(args, config: Config) -> int:
    out_dir = _out_dir(args, config)
    index, predicates = _load_index(out_dir)
    (stats_path,) = _require(out_dir, STATS)
    class_map_path = Path(_opt(args.class_map, config, "paths", "class_map", ""))
    if not str(class_map_path) or not class_map_path.exists():
        raise MissingArtifact(f"class map missing: {class_map_path}")
    samples = _opt(args.samples, config, "profile", "samples", 100, "int")
    seed = _opt(args.seed, config, "profile", "seed", 0, "int")
    with open(class_map_path) as fh:
        class_map = typeprof.load_class_map(fh)
    with open(stats_path) as fh:
        stat_rows = stats.read_stats_jsonl(fh)
    profiles = [
        typeprof.profile_predicate(index, st.predicate, class_map, samples, seed)
        for st in stat_rows
    ]
    with open(out_dir / PROFILES, "w") as fh:
        typeprof.write_profiles_jsonl(profiles, fh)
    _write_manifest(out_dir, "profile", [stats_path, class_map_path], config, seed)
    print(f"profile: {len(profiles)} predicates (samples={samples}, seed={seed})")
    return 0


def cmd_features(args, config: Config) -> int:
    out_dir = _out_dir(args, config)
    stats_path, profiles_path = _require(out_dir, STATS, PROFILES)
    freq_path = Path(_opt(args.freq_table, config, "paths", "freq_table", ""))
    if not str(freq_path) or not freq_path.exists():
        raise MissingArtifact(f"frequency table missing: {freq_path}")
    kinds = classifier.KINDS if args.kind == "both" else (args.kind,)
    with open(freq_path) as fh:
        provider = labels.TsvFrequencyProvider.load(fh)
    with open(stats_path) as fh:
        stat_rows = stats.read_stats_jsonl(fh)
    with open(profiles_path) as fh:
        profiles = {p.predicate.iri: p for p in typeprof.read_profiles_jsonl(fh)}

    # optional: append the label's mean word vector to the features
    embeddings = None
    if args.embeddings:
        emb_path = Path(args.embeddings)
        if not emb_path.exists():
            raise MissingArtifact(f"embeddings file missing: {emb_path}")
        with open(emb_path) as fh:
            embeddings = labels.EmbeddingTable.load(fh)

    inputs = [stats_path, profiles_path, freq_path]
    for kind in kinds:
        rows = []
        for st in stat_rows:
            profile = profiles.get(st.predicate.iri)
            if profile is None:
                continue
            try:
                ratio = labels.plural_singular_ratio(
                    provider, labels.inflect(st.predicate.base_label))
            except labels.LabelError:
                ratio = None
            embedding = None
            if embeddings is not None:
                embedding = labels.embed_label(
                    labels.tokenize_label(st.predicate.base_label), embeddings)
            fv = classifier.assemble_features(
                st, profile, ratio, kind, embedding,
                embeddings.dimension if embeddings is not None else 0)
            rows.append(fv.to_dict())
        _write_jsonl(out_dir / FEATURES[kind], rows)
        print(f"features: {len(rows)} {kind} vectors")
    _write_manifest(out_dir, "features", inputs, config)
    return 0


def _load_labeled_examples(labels_path: Path, features_by_iri: dict, kind: str):
    """Join a labels (or class-judgments) file with assembled features."""
    rows = _read_jsonl(labels_path)
    examples = []
    dropped = 0
    missing = 0
    for row in rows:
        if row.get("kind", kind) != kind:
            continue
        iri = row["predicate"] if isinstance(row["predicate"], str) \
            else row["predicate"]["iri"]
        if "label" in row:
            label = bool(row["label"])
        else:
            agg = evaluate.aggregate_class_judgments(row["responses"])
            if agg.dropped:
                dropped += 1
                continue
            label = agg.label
        fv = features_by_iri.get(iri)
        if fv is None:
            missing += 1
            continue
        examples.append(classifier.LabeledExample(fv, label, fv.predicate.kb))
    return examples, dropped, missing


def cmd_train(args, config: Config) -> int:
    out_dir = _out_dir(args, config)
    kind = args.kind
    (features_path,) = _require(out_dir, FEATURES[kind])
    labels_path = Path(_opt(args.labels, config, "paths", "labels", ""))
    if not str(labels_path) or not labels_path.exists():
        raise MissingArtifact(f"labels file missing: {labels_path}")
    model_kind = _opt(args.model, config, "train", "model", "lasso")
    seed = _opt(args.seed, config, "train", "seed", 0, "int")

    features_by_iri = {
        fv.predicate.iri: fv
        for fv in (classifier.FeatureVector.from_dict(d)
                   for d in _read_jsonl(features_path))
    }
    examples, dropped, missing = _load_labeled_examples(labels_path, features_by_iri, kind)
    if len(examples) < 2:
        raise ConfigError(f"not enough labeled {kind} examples: {len(examples)}")
    model = classifier.train(examples, kind=model_kind, seed=seed)
    with open(out_dir / MODELS[kind], "w") as fh:
        fh.write(model.to_json() + "\n")
    summary = {"examples": len(examples), "dropped_judgments": dropped,
               "unmatched_labels": missing, "model": model_kind}
    if args.loo:
        summary["loo"] = classifier.loo_cv(examples, kind=model_kind, seed=seed)
    _write_manifest(out_dir, f"train_{kind}", [features_path, labels_path], config, seed)
    print(f"train[{kind}/{model_kind}]: " + json.dumps(summary, sort_keys=True))
    return 0


def cmd_classify(args, config: Config) -> int:
    out_dir = _out_dir(args, config)
    kinds = classifier.KINDS if args.kind == "both" else (args.kind,)
    id_filter = _opt(args.id_filter, config, "classify", "id_filter", True, "bool")
    for kind in kinds:
        (features_path,) = _require(out_dir, FEATURES[kind])
        model_path = Path(args.model_file) if args.model_file and len(kinds) == 1 \
            else out_dir / MODELS[kind]
        if not model_path.exists():
            raise MissingArtifact(f"model artifacts missing: {model_path}")
        with open(model_path) as fh:
            model = classifier.TrainedModel.from_json(fh.read())
        rows = []
        kept = 0
        for d in _read_jsonl(features_path):
            fv = classifier.FeatureVector.from_dict(d)
            pred = classifier.predict(model, fv)
            filtered = bool(
                id_filter and pred.label
                and classifier.identifier_filter(fv.predicate.base_label)
            )
            kept += pred.label and not filtered
            rows.append({
                "predicate": stats.predicate_to_dict(fv.predicate),
                "kind": kind,
                "probability": pred.probability,
                "label": pred.label,
                "id_filtered": filtered,
            })
        _write_jsonl(out_dir / CLASSIFIED[kind], rows)
        print(f"classify[{kind}]: {kept}/{len(rows)} predicates kept")
        _write_manifest(out_dir, f"classify_{kind}", [features_path, model_path], config)
    return 0


def _classified_set(out_dir: Path, kind: str, predicates: dict) -> list:
    rows = _read_jsonl(out_dir / CLASSIFIED[kind])
    return [predicates[r["predicate"]["iri"]] for r in rows
            if r["label"] and not r["id_filtered"]
            and r["predicate"]["iri"] in predicates]


def cmd_align(args, config: Config) -> int:
    out_dir = _out_dir(args, config)
    _require(out_dir, CLASSIFIED["enumerating"], CLASSIFIED["counting"])
    index, predicates = _load_index(out_dir)
    min_support = _opt(args.min_support, config, "align", "min_support", 50, "int")
    k = _opt(args.k, config, "align", "k", 3, "int")
    combine = _opt(args.combine, config, "align", "combine", "normalized")
    value_agg = _opt(args.value_agg, config, "align", "value_agg", "max")
    directions = alignment.DIRECTIONS if args.direction is None else (args.direction,)

    embeddings = None
    emb_path = Path(_opt(args.embeddings, config, "paths", "embeddings", ""))
    if str(emb_path):
        if not emb_path.exists():
            raise MissingArtifact(f"embeddings file missing: {emb_path}")
        with open(emb_path) as fh:
            embeddings = labels.EmbeddingTable.load(fh)

    enum_preds = _classified_set(out_dir, "enumerating", predicates)
    count_preds = _classified_set(out_dir, "counting", predicates)
    table = alignment.build_alignment_table(index, enum_preds, count_preds,
                                            embeddings, value_agg)
    with open(out_dir / PAIRS, "w") as fh:
        alignment.write_pairs_jsonl(table, fh)

    ranked_rows = []
    for direction in directions:
        for source in table.sources(direction):
            for r in alignment.rank_alignments(table, source, direction, k,
                                               min_support, combine):
                ranked_rows.append(r.pair.to_dict(r.combined, direction, r.rank))
    ranked_rows.sort(key=lambda d: (d["direction"], d["kb"],
                                    d["c"]["iri"] if d["direction"] == alignment.COUNTING_TO_ENUMERATING
                                    else d["e"]["iri"], d["rank"]))
    _write_jsonl(out_dir / RANKED, ranked_rows)
    _write_manifest(out_dir, "align",
                    [out_dir / CLASSIFIED["enumerating"],
                     out_dir / CLASSIFIED["counting"], out_dir / TRIPLES], config)
    print(f"align: {len(table.pairs)} pairs, {len(ranked_rows)} ranked rows "
          f"(min_support={min_support}, k={k}, combine={combine})")
    return 0


def _ndcg_report(out_dir: Path, judgments: list, ks: list, min_support: int) -> dict:
    with open(out_dir / PAIRS) as fh:
        pairs = alignment.read_pairs_jsonl(fh)
    grade_map = {}
    for j in judgments:
        key = (j["direction"], j["source"], j["target"])
        grade_map[key] = evaluate.aggregate_relevance(j["responses"])

    report = {}
    for direction in alignment.DIRECTIONS:
        sources = {}
        for pair in pairs:
            if pair.support < min_support:
                continue
            src = pair.c.iri if direction == alignment.COUNTING_TO_ENUMERATING else pair.e.iri
            sources.setdefault(src, []).append(pair)
        judged_sources = {
            src: cands for src, cands in sources.items()
            if any((direction, src,
                    alignment.target_of(p, direction).iri) in grade_map for p in cands)
        }
        agreement = {}
        for component, table in (("relatedness", evaluate.RELATEDNESS_GRADES),
                                 ("completeness", evaluate.COMPLETENESS_GRADES)):
            lists = [[table[r[component]] for r in j["responses"]]
                     for j in judgments if j["direction"] == direction]
            agreement[component] = evaluate.pooled_std(lists)
        per_metric = {}
        rankings = list(alignment.METRICS) + ["combined"]
        for metric in rankings:
            sums = {k: 0.0 for k in ks}
            for src, cands in sorted(judged_sources.items()):
                if metric == "combined":
                    keys = alignment.combined_scores(cands, direction)
                else:
                    keys = [p.scores[metric] for p in cands]
                order = sorted(
                    range(len(cands)),
                    key=lambda i: (-keys[i], -cands[i].support,
                                   alignment.target_of(cands[i], direction).iri),
                )
                grades = [
                    grade_map.get(
                        (direction, src, alignment.target_of(cands[i], direction).iri),
                        0.0,
                    )
                    for i in order
                ]
                for k in ks:
                    sums[k] += evaluate.ndcg_at_k(grades, k)
            n = max(len(judged_sources), 1)
            per_metric[metric] = {str(k): sums[k] / n for k in ks}
        report[direction] = {"sources": len(judged_sources), "ndcg": per_metric,
                             "pooled_std": agreement}
    return report


def _print_ndcg_table(report: dict, ks: list) -> None:
    directions = list(report)
    header = ["Metric"] + [f"{d}@{k}" for d in directions for k in ks]
    widths = [max(22, len(header[0]))] + [max(len(h), 8) for h in header[1:]]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for metric in list(alignment.METRICS) + ["combined"]:
        row = [metric.ljust(widths[0])]
        i = 1
        for d in directions:
            for k in ks:
                row.append(f"{report[d]['ndcg'][metric][str(k)]:.3f}".ljust(widths[i]))
                i += 1
        print("  ".join(row))


def cmd_evaluate(args, config: Config) -> int:
    out_dir = _out_dir(args, config)
    if args.transfer:
        return _evaluate_transfer(args, config, out_dir)
    if not args.judgments:
        raise ConfigError("evaluate needs --judgments or --transfer")
    judgments_path = Path(args.judgments)
    if not judgments_path.exists():
        raise MissingArtifact(f"judgments file missing: {judgments_path}")
    rows = _read_jsonl(judgments_path)
    if not rows:
        raise ConfigError(f"empty judgments file: {judgments_path}")
    is_relevance = isinstance(rows[0].get("responses", [None])[0], dict)

    if is_relevance:
        _require(out_dir, PAIRS)
        ks = [int(x) for x in args.ndcg_k.split(",")]
        min_support = _opt(args.min_support, config, "align", "min_support", 50, "int")
        report = _ndcg_report(out_dir, rows, ks, min_support)
        with open(out_dir / "evaluation_ndcg.json", "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
        _print_ndcg_table(report, ks)
    else:
        report = {}
        for kind in classifier.KINDS:
            path = out_dir / CLASSIFIED[kind]
            if not path.exists():
                continue
            predictions = {
                r["predicate"]["iri"]: (r["label"] and not r["id_filtered"])
                for r in _read_jsonl(path)
            }
            preds, expected = [], []
            dropped = skipped = 0
            for row in rows:
                if row.get("kind") != kind:
                    continue
                agg = evaluate.aggregate_class_judgments(row["responses"])
                if agg.dropped:
                    dropped += 1
                    continue
                iri = row["predicate"] if isinstance(row["predicate"], str) \
                    else row["predicate"]["iri"]
                if iri not in predictions:
                    skipped += 1
                    continue
                preds.append(predictions[iri])
                expected.append(agg.label)
            if preds:
                scores = evaluate.prf1(preds, expected)
                pos = sum(expected)
                grade_lists = [
                    [evaluate.CLASS_GRADES[r] for r in row["responses"]]
                    for row in rows if row.get("kind") == kind
                ]
                report[kind] = {
                    **scores,
                    "random": classifier.random_baseline(pos, len(expected) - pos),
                    "pooled_std": evaluate.pooled_std(grade_lists),
                    "examples": len(preds), "dropped": dropped, "unmatched": skipped,
                }
                print(f"evaluate[{kind}]: P {scores['precision']:.1f} "
                      f"R {scores['recall']:.1f} F1 {scores['f1']:.1f} "
                      f"({len(preds)} judged, {dropped} dropped)")
        with open(out_dir / "evaluation_classification.json", "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    _write_manifest(out_dir, "evaluate", [judgments_path], config)
    return 0


def _evaluate_transfer(args, config: Config, out_dir: Path) -> int:
    kind = args.kind if args.kind != "both" else "enumerating"
    (features_path,) = _require(out_dir, FEATURES[kind])
    labels_path = Path(args.labels or _opt(None, config, "paths", "labels", ""))
    if not str(labels_path) or not labels_path.exists():
        raise MissingArtifact(f"labels file missing: {labels_path}")
    model_kind = _opt(args.model, config, "train", "model", "lasso")
    seed = _opt(args.seed, config, "train", "seed", 0, "int")
    features_by_iri = {
        fv.predicate.iri: fv
        for fv in (classifier.FeatureVector.from_dict(d)
                   for d in _read_jsonl(features_path))
    }
    examples, _, _ = _load_labeled_examples(labels_path, features_by_iri, kind)
    datasets = {}
    for ex in examples:
        datasets.setdefault(ex.kb, []).append(ex)
    matrix = evaluate.transfer_matrix(datasets, kind=model_kind, seed=seed)
    with open(out_dir / "evaluation_transfer.json", "w") as fh:
        json.dump(matrix.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(matrix.format_table())
    return 0


def cmd_export_distribution(args, config: Config) -> int:
    out_dir = _out_dir(args, config)
    index, predicates = _load_index(out_dir)
    value_agg = _opt(None, config, "align", "value_agg", "max")
    try:
        e_iri, c_iri = [part.strip() for part in args.pair.split(",", 1)]
    except ValueError:
        raise ConfigError("--pair expects 'enumerating_iri,counting_iri'") from None
    if e_iri not in predicates or c_iri not in predicates:
        missing = e_iri if e_iri not in predicates else c_iri
        raise ConfigError(f"unknown predicate: {missing}")
    pair = alignment.pair_from_index(index, predicates[e_iri], predicates[c_iri],
                                     value_agg)
    if pair is None:
        raise ConfigError(f"predicates share no subjects: {args.pair}")
    out_file = Path(args.out_file) if args.out_file else (
        out_dir / f"distribution_{kb.local_name(e_iri)}_{kb.local_name(c_iri)}.csv"
    )
    with open(out_file, "w") as fh:
        n = alignment.write_distribution_csv(pair, fh)
    print(f"export-distribution: {n} rows -> {out_file}")
    return 0


def cmd_serve(args, config: Config) -> int:
    out_dir = _out_dir(args, config)
    host = _opt(args.host, config, "service", "host", "127.0.0.1")
    port = _opt(args.port, config, "service", "port", 8040, "int")
    workers = _opt(None, config, "service", "workers", 0, "int")
    cors = _opt(None, config, "service", "cors_origin", "")
    value_agg = _opt(None, config, "align", "value_agg", "max")
    try:
        state = service.load_service_state(
            out_dir / TRIPLES, out_dir / CATALOG, out_dir / RANKED,
            {k: out_dir / CLASSIFIED[k] for k in classifier.KINDS},
            value_agg,
        )
    except service.ServiceError as e:
        raise MissingArtifact(str(e)) from None
    print(f"serving on {host}:{port} ({len(state.index)} triples)")
    service.serve(state, host, port, workers, cors or None)
    return 0


# --- parser -------------------------------------------------------------------

def _bool_flag(sub, name, help_on):
    group = sub.add_mutually_exclusive_group()
    dest = name.replace("-", "_")
    group.add_argument(f"--{name}", dest=dest, action="store_true", default=None,
                       help=help_on)
    group.add_argument(f"--no-{name}", dest=dest, action="store_false", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="setpred",
        description="Identify and align enumerating/counting set predicates in a KB.",
    )
    parser.add_argument("--config", help="INI config file")
    parser.add_argument("--out", help="artifacts directory (paths.artifacts)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a dump into the triples artifact")
    p.add_argument("--input")
    p.add_argument("--format", choices=["ntriples", "tsv"])
    p.add_argument("--kb")
    _bool_flag(p, "inverse", "materialize inverse triples (default on)")
    _bool_flag(p, "dedup", "deduplicate triples (default on)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", help="per-predicate statistics")
    p.add_argument("--min-count", type=int)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("profile", help="domain/range type profiles")
    p.add_argument("--class-map")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("features", help="assemble classifier features")
    p.add_argument("--freq-table")
    p.add_argument("--embeddings")
    p.add_argument("--kind", choices=["enumerating", "counting", "both"],
                   default="both")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train", help="fit a classifier")
    p.add_argument("--model", choices=list(classifier.MODEL_KINDS))
    p.add_argument("--labels")
    p.add_argument("--seed", type=int)
    p.add_argument("--kind", choices=["enumerating", "counting"], required=True)
    p.add_argument("--loo", action="store_true", help="also report LOO-CV scores")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="predict set predicates")
    p.add_argument("--model-file")
    p.add_argument("--kind", choices=["enumerating", "counting", "both"],
                   default="both")
    _bool_flag(p, "id-filter", "drop id/code-labeled predicates (default on)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("align", help="score and rank predicate pairs")
    p.add_argument("--min-support", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--direction", choices=list(alignment.DIRECTIONS))
    p.add_argument("--combine", choices=["normalized", "raw"])
    p.add_argument("--embeddings")
    p.add_argument("--value-agg", choices=list(alignment.VALUE_AGGREGATIONS))
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("evaluate", help="evaluate classification or alignment")
    p.add_argument("--judgments")
    p.add_argument("--ndcg-k", default="1,3")
    p.add_argument("--transfer", action="store_true")
    p.add_argument("--labels")
    p.add_argument("--model", choices=list(classifier.MODEL_KINDS))
    p.add_argument("--seed", type=int)
    p.add_argument("--kind", choices=["enumerating", "counting", "both"],
                   default="both")
    p.add_argument("--min-support", type=int)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("export-distribution", help="value-distribution CSV for a pair")
    p.add_argument("--pair", required=True, help="enumerating_iri,counting_iri")
    p.add_argument("--out-file")
    p.set_defaults(func=cmd_export_distribution)

    p = sub.add_parser("serve", help="run the query service")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config) if args.config else Config.empty()
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args, config)
    except MissingArtifact as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MISSING
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as e:  # processing failure
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PROCESSING


def entrypoint() -> None:  # pragma: no cover
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
