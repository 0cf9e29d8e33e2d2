"""Alignment tests: the nine heuristics, combined score, ranking, and the
value-distribution export, checked against an independent brute-force
reference on seeded micro-KBs."""

import io
import math
import random

import pytest

from oracle_alignment import make_micro_kb, reference_pair_scores, vocab_embeddings
from setpred.alignment import (
    COUNTING_TO_ENUMERATING, ENUMERATING_TO_COUNTING, METRICS,
    AlignmentError, AlignmentPair, CooccurrenceRecord,
    aggregate_count_value, build_alignment_table, combined_from_normalized,
    combined_scores, enumerated_object_count, export_value_distribution,
    metric_absolute, metric_conditional_c, metric_conditional_e,
    metric_correlation, metric_jaccard, metric_perfect_match_ratio,
    metric_pmi, metric_ptile_vm, min_max_normalize, rank_alignments,
    read_distribution_csv, read_pairs_jsonl, target_of, write_distribution_csv,
    write_pairs_jsonl,
)
from setpred.kb import (
    CSVLIST, ENTITY, INTEGER,
    ObjectValue, PredicateCatalog, Triple, TripleIndex,
)


def _records(pairs):
    return tuple(CooccurrenceRecord(f"s{i}", a, b) for i, (a, b) in enumerate(pairs))


class TestCooccurrenceMetrics:
    def test_formula_arithmetic(self):
        assert metric_absolute(4) == 4
        assert metric_jaccard(10, 5, 4) == pytest.approx(4 / 11)
        assert metric_conditional_e(4, 10) == pytest.approx(0.4)
        assert metric_conditional_c(4, 5) == pytest.approx(0.8)
        assert metric_pmi(4, 10, 5, 100) == pytest.approx(3.0)

    def test_identical_subject_sets(self):
        assert metric_jaccard(7, 7, 7) == 1.0
        assert metric_conditional_e(7, 7) == 1.0
        assert metric_conditional_c(7, 7) == 1.0

    def test_pmi_upper_bound_attained_on_subset(self):
        # e always co-occurs with c: shared == |S_e|
        n_e, n_c, n = 5, 20, 100
        assert metric_pmi(n_e, n_e, n_c, n) == pytest.approx(-math.log2(n_c / n))

    def test_pmi_no_cooccurrence_is_minus_inf(self):
        assert metric_pmi(0, 5, 5, 100) == float("-inf")


class TestValueDistributionMetrics:
    def test_perfect_match_all(self):
        assert metric_perfect_match_ratio(_records([(2, 2), (5, 5)])) == 1.0

    def test_perfect_match_hand_count(self):
        assert metric_perfect_match_ratio(
            _records([(2, 2), (3, 5), (1, 1), (4, 9)])
        ) == 0.5

    def test_correlation_perfect_linear(self):
        assert metric_correlation(_records([(1, 1), (2, 2), (5, 5)])) == pytest.approx(1.0)

    def test_correlation_constant_is_zero(self):
        assert metric_correlation(_records([(1, 4), (2, 4), (3, 4)])) == 0.0

    def test_correlation_single_record_is_zero(self):
        assert metric_correlation(_records([(3, 3)])) == 0.0

    def test_ptile_equal_is_one(self):
        assert metric_ptile_vm(_records([(3, 3), (9, 9)])) == 1.0

    def test_ptile_three_to_one(self):
        records = _records([(3, 9)])
        assert metric_ptile_vm(records) == pytest.approx(1 / 3)

    def test_ptile_symmetric_under_swap(self):
        a = _records([(3, 9), (2, 5), (4, 12)])
        swapped = _records([(9, 3), (5, 2), (12, 4)])
        assert metric_ptile_vm(a) == pytest.approx(metric_ptile_vm(swapped))

    def test_ptile_zero_percentile_is_zero(self):
        assert metric_ptile_vm(_records([(1, 0), (2, 0)])) == 0.0


class TestAggregation:
    def test_max_default(self):
        objs = [ObjectValue(INTEGER, 5), ObjectValue(INTEGER, 7)]
        assert aggregate_count_value(objs) == 7

    def test_mean_and_latest_modes(self):
        objs = [ObjectValue(INTEGER, 5), ObjectValue(INTEGER, 7)]
        assert aggregate_count_value(objs, "mean") == 6.0
        assert aggregate_count_value(objs, "latest") == 7

    def test_no_integers_is_none(self):
        assert aggregate_count_value([ObjectValue(ENTITY, "x")]) is None

    def test_enumerated_count_entities_and_csv(self):
        objs = [
            ObjectValue(ENTITY, "a"), ObjectValue(ENTITY, "a"),
            ObjectValue(ENTITY, "b"), ObjectValue(CSVLIST, ("x", "y", "z")),
        ]
        assert enumerated_object_count(objs) == 5  # 2 distinct + 3 items


def _tiny_kb():
    """Two enumerating and two counting predicates over shared subjects."""
    catalog = PredicateCatalog("custom")
    child = catalog.register("http://x/child", "child")
    works = catalog.register("http://x/worksFor", "worksFor")
    n_child = catalog.register("http://x/childCount", "childCount")
    n_staff = catalog.register("http://x/staffTotal", "staffTotal")
    triples = []
    for i in range(8):
        s = f"s{i}"
        for j in range(i % 3 + 1):
            triples.append(Triple(s, child, ObjectValue(ENTITY, f"kid{i}_{j}")))
        triples.append(Triple(s, n_child, ObjectValue(INTEGER, i % 3 + 1)))
    for i in range(4, 12):
        s = f"s{i}"
        triples.append(Triple(s, works, ObjectValue(ENTITY, f"org{i % 2}")))
        triples.append(Triple(s, n_staff, ObjectValue(INTEGER, 10 * i)))
    idx = TripleIndex.from_triples(triples)
    return idx, [child, works], [n_child, n_staff], catalog


class TestBuildTable:
    def test_disjoint_subjects_pair_absent(self):
        catalog = PredicateCatalog("custom")
        e = catalog.register("e")
        c = catalog.register("c")
        idx = TripleIndex.from_triples([
            Triple("a", e, ObjectValue(ENTITY, "x")),
            Triple("b", c, ObjectValue(INTEGER, 1)),
        ])
        table = build_alignment_table(idx, [e], [c])
        assert table.pairs == []

    def test_pair_scores_match_reference(self):
        idx, enum_preds, count_preds, _ = _tiny_kb()
        table = build_alignment_table(idx, enum_preds, count_preds)
        by_key = {(p.e.iri, p.c.iri): p for p in table.pairs}
        for e in enum_preds:
            for c in count_preds:
                expected = reference_pair_scores(idx, e, c)
                if expected is None:
                    assert (e.iri, c.iri) not in by_key
                    continue
                got = by_key[(e.iri, c.iri)].scores
                for metric in METRICS:
                    assert got[metric] == pytest.approx(expected[metric], abs=1e-12), metric

    def test_cross_kb_pairs_not_built(self):
        cat_a, cat_b = PredicateCatalog("DBP-raw"), PredicateCatalog("WD-truthy")
        e = cat_a.register("e")
        c = cat_b.register("c")
        idx = TripleIndex.from_triples([
            Triple("a", e, ObjectValue(ENTITY, "x")),
            Triple("a", c, ObjectValue(INTEGER, 1)),
        ])
        assert build_alignment_table(idx, [e], [c]).pairs == []

    def test_max_aggregation_in_records(self):
        catalog = PredicateCatalog("custom")
        e = catalog.register("e")
        c = catalog.register("c")
        idx = TripleIndex.from_triples([
            Triple("a", e, ObjectValue(ENTITY, "x")),
            Triple("a", c, ObjectValue(INTEGER, 5)),
            Triple("a", c, ObjectValue(INTEGER, 7)),
        ])
        (pair,) = build_alignment_table(idx, [e], [c]).pairs
        assert pair.records[0].v_c == 7

    def test_brute_force_equivalence_micro_kbs(self):
        embeddings = vocab_embeddings()
        for seed in range(25):
            idx, enum_preds, count_preds, _ = make_micro_kb(seed)
            table = build_alignment_table(idx, enum_preds, count_preds, embeddings)
            by_key = {(p.e.iri, p.c.iri): p for p in table.pairs}
            for e in enum_preds:
                for c in count_preds:
                    expected = reference_pair_scores(idx, e, c, embeddings)
                    if expected is None:
                        assert (e.iri, c.iri) not in by_key
                        continue
                    got = by_key[(e.iri, c.iri)].scores
                    for metric in METRICS:
                        assert got[metric] == pytest.approx(expected[metric], abs=1e-12), (
                            seed, e.iri, c.iri, metric,
                        )

    def test_metric_range_invariants(self):
        for seed in range(40, 55):
            idx, enum_preds, count_preds, _ = make_micro_kb(seed)
            table = build_alignment_table(idx, enum_preds, count_preds)
            for pair in table.pairs:
                s = pair.scores
                assert s["jaccard"] <= s["conditional_e"] + 1e-12
                assert s["jaccard"] <= s["conditional_c"] + 1e-12
                for name in ("jaccard", "conditional_e", "conditional_c",
                             "perfect_match_ratio", "ptile_vm"):
                    assert -1e-12 <= s[name] <= 1 + 1e-12
                assert -1 - 1e-12 <= s["correlation"] <= 1 + 1e-12
                p_e = pair.n_subjects_e / pair.n_subjects_total
                p_c = pair.n_subjects_c / pair.n_subjects_total
                bound = min(-math.log2(p_e), -math.log2(p_c))
                assert s["pmi"] <= bound + 1e-12


class TestCombined:
    def test_mean_of_normalized(self):
        assert combined_from_normalized([0.2, 0.4, 0.9]) == pytest.approx(0.5)

    def test_single_candidate_normalizes_to_one(self):
        assert min_max_normalize([0.37]) == [1.0]

    def test_constant_pool_normalizes_to_one(self):
        assert min_max_normalize([2.0, 2.0, 2.0]) == [1.0, 1.0, 1.0]

    def _pair(self, scores):
        catalog = PredicateCatalog("custom")
        return AlignmentPair(
            e=catalog.register("e"), c=catalog.register("c"), kb="custom",
            support=60, n_subjects_e=80, n_subjects_c=70, n_subjects_total=200,
            scores=scores, records=(), flags={},
        )

    def _scores(self, **overrides):
        base = {m: 0.5 for m in METRICS}
        base["pmi"] = 1.0
        base.update(overrides)
        return base

    def test_unused_metric_does_not_change_combined(self):
        a = [self._pair(self._scores()), self._pair(self._scores(conditional_e=0.9))]
        before = combined_scores(a, COUNTING_TO_ENUMERATING)
        a[0].scores["absolute"] = 999.0  # not a representative in this direction
        assert combined_scores(a, COUNTING_TO_ENUMERATING) == before

    def test_all_representatives_maximal_gives_one(self):
        best = self._pair(self._scores(conditional_e=0.9, correlation=0.8, cosine_sim=0.7))
        worse = self._pair(self._scores(conditional_e=0.1, correlation=0.0, cosine_sim=0.2))
        combined = combined_scores([best, worse], COUNTING_TO_ENUMERATING)
        assert combined[0] == 1.0

    def test_raw_mode_means_raw_scores(self):
        p = self._pair(self._scores(pmi=2.0, perfect_match_ratio=0.5, cosine_sim=0.2))
        (got,) = combined_scores([p], ENUMERATING_TO_COUNTING, mode="raw")
        assert got == pytest.approx((2.0 + 0.5 + 0.2) / 3)

    def test_unknown_direction_rejected(self):
        with pytest.raises(AlignmentError):
            combined_scores([], "sideways")


class TestRanking:
    def _table_with_support(self, supports):
        catalog = PredicateCatalog("custom")
        c = catalog.register("http://x/count", "count")
        pairs = []
        enum_preds = []
        for i, sup in enumerate(supports):
            e = catalog.register(f"http://x/e{i}", f"e{i}")
            enum_preds.append(e)
            pairs.append(AlignmentPair(
                e=e, c=c, kb="custom", support=sup,
                n_subjects_e=sup + 10, n_subjects_c=100, n_subjects_total=300,
                scores={m: random.Random(i).random() for m in METRICS},
                records=(), flags={},
            ))
        from setpred.alignment import AlignmentTable
        return AlignmentTable(pairs, enum_preds, [c]), c

    def test_below_support_threshold_empty(self):
        table, c = self._table_with_support([10, 49])
        assert rank_alignments(table, c, COUNTING_TO_ENUMERATING, min_support=50) == []

    def test_order_matches_full_sort_oracle(self):
        table, c = self._table_with_support([60, 70, 80, 90, 100])
        ranked = rank_alignments(table, c, COUNTING_TO_ENUMERATING, k=5, min_support=50)
        candidates = table.candidates(c, COUNTING_TO_ENUMERATING)
        combined = combined_scores(candidates, COUNTING_TO_ENUMERATING)
        oracle = sorted(
            zip(candidates, combined),
            key=lambda pc: (-pc[1], -pc[0].support, pc[0].e.iri),
        )
        assert [r.pair.e.iri for r in ranked] == [p.e.iri for p, _ in oracle]
        assert [r.combined for r in ranked] == [cb for _, cb in oracle]

    def test_k1_is_prefix_of_k3(self):
        table, c = self._table_with_support([60, 70, 80, 90, 100])
        top1 = rank_alignments(table, c, COUNTING_TO_ENUMERATING, k=1, min_support=50)
        top3 = rank_alignments(table, c, COUNTING_TO_ENUMERATING, k=3, min_support=50)
        assert [r.pair.e.iri for r in top3][:1] == [r.pair.e.iri for r in top1]

    def test_unknown_source_rejected(self):
        table, _ = self._table_with_support([60])
        ghost = PredicateCatalog("custom").register("http://x/ghost")
        with pytest.raises(AlignmentError, match="unknown source"):
            rank_alignments(table, ghost, COUNTING_TO_ENUMERATING)

    def test_duplicated_input_triples_do_not_change_ranking(self):
        idx, enum_preds, count_preds, _ = _tiny_kb()
        doubled = TripleIndex.from_triples(
            [t for p in idx.predicates() for t in idx.triples_of(p)] * 2
        )
        t1 = build_alignment_table(idx, enum_preds, count_preds)
        t2 = build_alignment_table(doubled, enum_preds, count_preds)
        for c in count_preds:
            r1 = rank_alignments(t1, c, COUNTING_TO_ENUMERATING, min_support=1)
            r2 = rank_alignments(t2, c, COUNTING_TO_ENUMERATING, min_support=1)
            assert [(r.pair.e.iri, r.combined) for r in r1] == \
                   [(r.pair.e.iri, r.combined) for r in r2]

    def test_target_of_direction(self):
        table, c = self._table_with_support([60])
        pair = table.pairs[0]
        assert target_of(pair, COUNTING_TO_ENUMERATING) == pair.e
        assert target_of(pair, ENUMERATING_TO_COUNTING) == pair.c


class TestDistributionExport:
    def _pair(self):
        catalog = PredicateCatalog("custom")
        return AlignmentPair(
            e=catalog.register("e"), c=catalog.register("c"), kb="custom",
            support=3, n_subjects_e=3, n_subjects_c=3, n_subjects_total=5,
            scores={}, flags={},
            records=(
                CooccurrenceRecord("s2", 3, 2),
                CooccurrenceRecord("s1", 2, 2),
                CooccurrenceRecord("s3", 1, 9),
            ),
        )

    def test_row_count_and_header(self):
        buf = io.StringIO()
        n = write_distribution_csv(self._pair(), buf)
        lines = buf.getvalue().strip().split("\n")
        assert n == 3 and len(lines) == 4
        assert lines[0] == "subject,n_e,v_c,anomaly"

    def test_anomaly_flags_undercount(self):
        rows = export_value_distribution(self._pair())
        flags = {subject: anomaly for subject, _, _, anomaly in rows}
        assert flags == {"s1": 0, "s2": 1, "s3": 0}

    def test_deterministic_subject_order(self):
        rows = export_value_distribution(self._pair())
        assert [r[0] for r in rows] == ["s1", "s2", "s3"]

    def test_round_trip(self):
        buf = io.StringIO()
        write_distribution_csv(self._pair(), buf)
        buf.seek(0)
        rows = read_distribution_csv(buf)
        assert rows == export_value_distribution(self._pair())

    def test_empty_pair_rejected(self):
        pair = self._pair()
        pair.records = ()
        with pytest.raises(AlignmentError):
            export_value_distribution(pair)


class TestPairsJsonl:
    def test_round_trip(self):
        idx, enum_preds, count_preds, _ = _tiny_kb()
        table = build_alignment_table(idx, enum_preds, count_preds)
        buf = io.StringIO()
        write_pairs_jsonl(table, buf)
        buf.seek(0)
        loaded = read_pairs_jsonl(buf)
        assert len(loaded) == len(table.pairs)
        original = {(p.e.iri, p.c.iri): p for p in table.pairs}
        for pair in loaded:
            src = original[(pair.e.iri, pair.c.iri)]
            assert pair.support == src.support
            assert pair.scores == pytest.approx(src.scores)
