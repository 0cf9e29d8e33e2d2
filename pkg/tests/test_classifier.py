"""Classifier tests: feature assembly, the four model families, LOO-CV,
the analytic random baseline and the identifier filter.

Gradient correctness is checked against central finite differences; the
optimizers are checked on a well-separated synthetic fixture.
"""

import json
import subprocess
import sys

import numpy as np
import pytest

from setpred import _kernels
from setpred.classifier import (
    COUNTING, COUNTING_FEATURES, ENUMERATING, ENUMERATING_FEATURES,
    MODEL_KINDS, ClassifierError, FeatureVector, LabeledExample, TrainedModel,
    assemble_features, identifier_filter, loo_cv, predict, random_baseline,
    train,
)
from setpred.kb import ENTITY, INTEGER, ObjectValue, PredicateCatalog, Triple
from setpred.stats import compute_stats
from setpred.typeprof import TypeProfile


# --- fixtures ----------------------------------------------------------------

def _stats_and_profile(kind=COUNTING, domain="Organization", range_="Literal"):
    catalog = PredicateCatalog("DBP-map")
    p = catalog.register("http://x/numberOfEpisodes")
    triples = [
        Triple("a", p, ObjectValue(INTEGER, 12)),
        Triple("a", p, ObjectValue(INTEGER, 24)),
        Triple("b", p, ObjectValue(INTEGER, 7)),
        Triple("c", p, ObjectValue(ENTITY, "x")),
    ]
    stats = compute_stats(triples)
    profile = TypeProfile(p, domain, range_, 3, 1, seed=0)
    return stats, profile


def separable_examples(n=20, d=4, margin=6.0, seed=0, kind=ENUMERATING):
    """Two well-separated Gaussian blobs; linearly separable with margin."""
    rng = np.random.default_rng(seed)
    catalog = PredicateCatalog()
    examples = []
    for i in range(n):
        label = i % 2 == 0
        center = margin if label else -margin
        values = rng.normal(loc=center, scale=1.0, size=d)
        fv = FeatureVector(
            catalog.register(f"p{i}"), kind, values, np.zeros(d, dtype=bool),
            names=tuple(f"f{j}" for j in range(d)),
        )
        examples.append(LabeledExample(fv, label, "custom"))
    return examples


# --- feature assembly ---------------------------------------------------------

class TestAssembleFeatures:
    def test_counting_vector_length(self):
        stats, profile = _stats_and_profile()
        fv = assemble_features(stats, profile, 1.2, COUNTING)
        assert len(fv.values) == 18 == len(COUNTING_FEATURES)
        assert fv.feature_names == COUNTING_FEATURES

    def test_enumerating_vector_length(self):
        stats, profile = _stats_and_profile()
        fv = assemble_features(stats, profile, 1.2, ENUMERATING)
        assert len(fv.values) == 19 == len(ENUMERATING_FEATURES)

    def test_thing_folds_to_other(self):
        stats, profile = _stats_and_profile(domain="Thing")
        fv = assemble_features(stats, profile, 1.0, COUNTING)
        onehot = dict(zip(fv.feature_names, fv.values))
        assert onehot["domain_Other"] == 1.0
        assert sum(v for k, v in onehot.items() if k.startswith("domain_")) == 1.0

    def test_literal_range_folds_to_other(self):
        stats, profile = _stats_and_profile(range_="Literal")
        fv = assemble_features(stats, profile, 1.0, ENUMERATING)
        onehot = dict(zip(fv.feature_names, fv.values))
        assert onehot["range_Other"] == 1.0

    def test_missing_ratio_masked(self):
        stats, profile = _stats_and_profile()
        fv = assemble_features(stats, profile, None, COUNTING)
        assert fv.values[0] == 0.0 and fv.missing_mask[0]

    def test_undefined_int_summaries_masked(self):
        catalog = PredicateCatalog()
        p = catalog.register("http://x/child")
        stats = compute_stats([Triple("a", p, ObjectValue(ENTITY, "b"))])
        profile = TypeProfile(p, "Person", "Person", 1, 1, seed=0)
        fv = assemble_features(stats, profile, 1.5, COUNTING)
        named = dict(zip(fv.feature_names, fv.values))
        masked = dict(zip(fv.feature_names, fv.missing_mask))
        for name in fv.feature_names:
            if name.startswith(("int_values_", "int_per_subject_")):
                assert named[name] == 0.0 and masked[name]

    def test_feature_values_from_stats(self):
        stats, profile = _stats_and_profile()
        fv = assemble_features(stats, profile, 2.5, COUNTING)
        named = dict(zip(fv.feature_names, fv.values))
        assert named["plural_singular_ratio"] == 2.5
        assert named["frac_integer"] == pytest.approx(0.75)
        assert named["int_values_max"] == 24
        assert named["int_per_subject_max"] == 2

    def test_optional_embedding_append(self):
        stats, profile = _stats_and_profile()
        vec = np.array([0.5, -1.0, 2.0])
        fv = assemble_features(stats, profile, 1.0, COUNTING, vec, 3)
        assert len(fv.values) == 18 + 3
        assert fv.feature_names[-3:] == ("embedding_0", "embedding_1", "embedding_2")
        np.testing.assert_array_equal(fv.values[-3:], vec)
        # out-of-vocabulary label: zeros plus mask bits
        oov = assemble_features(stats, profile, 1.0, COUNTING, None, 3)
        assert np.all(oov.values[-3:] == 0.0) and np.all(oov.missing_mask[-3:])
        # serialization keeps the extended names
        restored = FeatureVector.from_dict(fv.to_dict())
        assert restored.feature_names == fv.feature_names

    def test_embedding_dimension_mismatch_rejected(self):
        stats, profile = _stats_and_profile()
        with pytest.raises(ClassifierError, match="dimension"):
            assemble_features(stats, profile, 1.0, COUNTING, np.ones(4), 3)

    def test_predicate_mismatch_rejected(self):
        stats, _ = _stats_and_profile()
        catalog = PredicateCatalog()
        other = TypeProfile(catalog.register("q"), "Person", "Person", 1, 1, 0)
        with pytest.raises(ClassifierError):
            assemble_features(stats, other, 1.0, COUNTING)

    def test_unknown_kind_rejected(self):
        stats, profile = _stats_and_profile()
        with pytest.raises(ClassifierError):
            assemble_features(stats, profile, 1.0, "other-kind")


# --- gradients against finite differences -------------------------------------

def _fd_check(loss_fn, grad, point, h=1e-5):
    """Max relative error between analytic gradient and central differences."""
    worst = 0.0
    flat = point.copy()
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        up = loss_fn(flat)
        flat[i] = orig - h
        down = loss_fn(flat)
        flat[i] = orig
        fd = (up - down) / (2 * h)
        denom = max(abs(grad[i]), abs(fd), 1e-8)
        worst = max(worst, abs(grad[i] - fd) / denom)
    return worst


def _random_problem(seed, n=25, d=6):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    y = (rng.random(n) < 0.5).astype(np.float64)
    return X, y


class TestGradients:
    @pytest.mark.parametrize("l2,l2_b", [(0.0, 0.0), (1.0 / 6.25, 0.01)])
    def test_logistic_gradient_matches_finite_differences(self, l2, l2_b):
        X, y = _random_problem(3)
        rng = np.random.default_rng(5)
        w = rng.normal(scale=0.5, size=X.shape[1])
        b = 0.3
        _, gw, gb = _kernels.logistic_loss_grad(w, b, X, y, l2, l2_b)
        grad = np.append(np.asarray(gw), gb)
        point = np.append(w, b)

        def loss_at(flat):
            return _kernels.logistic_loss_grad(flat[:-1], flat[-1], X, y, l2, l2_b)[0]

        assert _fd_check(loss_at, grad, point) < 1e-4

    def test_neural_gradient_matches_finite_differences(self):
        X, y = _random_problem(11, n=20, d=4)
        rng = np.random.default_rng(7)
        d, h = 4, 3
        W1 = rng.uniform(-0.5, 0.5, (d, h))
        b1 = rng.uniform(-0.5, 0.5, h)
        w2 = rng.uniform(-0.5, 0.5, h)
        b2 = 0.2
        _, gW1, gb1, gw2, gb2 = _kernels.mlp_loss_grad(X, y, W1, b1, w2, b2)
        grad = np.concatenate([np.asarray(gW1).ravel(), gb1, gw2, [gb2]])
        point = np.concatenate([W1.ravel(), b1, w2, [b2]])

        def loss_at(flat):
            W1_ = flat[: d * h].reshape(d, h).copy()
            b1_ = flat[d * h: d * h + h].copy()
            w2_ = flat[d * h + h: d * h + 2 * h].copy()
            b2_ = flat[-1]
            return _kernels.mlp_loss_grad(X, y, W1_, b1_, w2_, b2_)[0]

        assert _fd_check(loss_at, grad, point) < 1e-4


# --- training ------------------------------------------------------------------

class TestTrain:
    @pytest.mark.parametrize("kind", MODEL_KINDS)
    def test_separable_fixture_training_accuracy(self, kind):
        examples = separable_examples()
        model = train(examples, kind=kind, seed=1)
        correct = sum(
            predict(model, ex.features).label == ex.label for ex in examples
        )
        assert correct == len(examples)

    def test_lasso_huge_lambda_zeroes_all_weights(self):
        examples = separable_examples()
        model = train(examples, kind="lasso", hyperparams={"lam": 1e6})
        assert np.all(model.params["w"] == 0.0)

    def test_lasso_sparsity_monotone_in_lambda(self):
        examples = separable_examples(n=30, d=6, margin=1.0, seed=3)
        nonzeros = []
        for lam in (1e-3, 1e-2, 1e-1, 1.0, 10.0):
            model = train(examples, kind="lasso", hyperparams={"lam": lam})
            nonzeros.append(int(np.sum(model.params["w"] != 0.0)))
        assert nonzeros == sorted(nonzeros, reverse=True)

    def test_degenerate_labels_rejected(self):
        examples = [
            LabeledExample(ex.features, True, ex.kb) for ex in separable_examples(6)
        ]
        for kind in ("logistic", "prior", "lasso"):
            with pytest.raises(ClassifierError, match="degenerate labels"):
                train(examples, kind=kind)
        train(examples, kind="neural")  # neural tolerates one class

    def test_mixed_feature_kinds_rejected(self):
        a = separable_examples(4, kind=ENUMERATING)
        b = separable_examples(4, kind=COUNTING)
        with pytest.raises(ClassifierError):
            train(a[:2] + b[:2])

    def test_standardization_absorbs_per_column_scale(self):
        examples = separable_examples(n=24, d=5, margin=2.0, seed=9)
        scale = np.array([3.0, 0.25, 10.0, 1.0, 40.0])
        scaled = [
            LabeledExample(
                FeatureVector(ex.features.predicate, ex.features.kind,
                              ex.features.values * scale, ex.features.missing_mask,
                              ex.features.names),
                ex.label, ex.kb,
            )
            for ex in examples
        ]
        for kind in ("logistic", "prior", "lasso"):
            m1 = train(examples, kind=kind)
            m2 = train(scaled, kind=kind)
            for ex, sx in zip(examples, scaled):
                p1 = predict(m1, ex.features).probability
                p2 = predict(m2, sx.features).probability
                assert p1 == pytest.approx(p2, abs=1e-9)

    def test_neural_seed_determinism(self):
        examples = separable_examples(12)
        m1 = train(examples, kind="neural", seed=5)
        m2 = train(examples, kind="neural", seed=5)
        np.testing.assert_array_equal(m1.params["W1"], m2.params["W1"])
        m3 = train(examples, kind="neural", seed=6)
        assert not np.array_equal(m1.params["W1"], m3.params["W1"])

    def test_too_few_examples_rejected(self):
        with pytest.raises(ClassifierError):
            train(separable_examples(1))

    def test_model_json_round_trip(self):
        examples = separable_examples(10)
        for kind in MODEL_KINDS:
            model = train(examples, kind=kind, seed=2)
            loaded = TrainedModel.from_json(model.to_json())
            for ex in examples:
                assert predict(loaded, ex.features) == predict(model, ex.features)


# --- prediction -----------------------------------------------------------------

def _manual_model(w, b, d):
    return TrainedModel(
        kind="logistic", feature_kind=ENUMERATING,
        feature_names=tuple(f"f{i}" for i in range(d)),
        mean=np.zeros(d), std=np.ones(d),
        params={"w": np.asarray(w, dtype=float), "b": float(b)},
        hyperparams={},
    )


def _fv(values, kind=ENUMERATING):
    catalog = PredicateCatalog()
    values = np.asarray(values, dtype=float)
    return FeatureVector(catalog.register("p"), kind, values,
                         np.zeros(len(values), dtype=bool),
                         names=tuple(f"f{i}" for i in range(len(values))))


class TestPredict:
    def test_zero_model_gives_half_and_true(self):
        model = _manual_model([0.0, 0.0], 0.0, 2)
        got = predict(model, _fv([3.0, -1.0]))
        assert got.probability == 0.5 and got.label is True

    def test_saturated_negative_intercept(self):
        model = _manual_model([0.0, 0.0], -100.0, 2)
        got = predict(model, _fv([0.0, 0.0]))
        assert got.probability == pytest.approx(0.0, abs=1e-30)
        assert got.label is False

    def test_matches_hand_computed_sigmoid(self):
        w, b, x = [0.5, -2.0, 1.0], 0.25, [1.0, 0.5, 2.0]
        model = _manual_model(w, b, 3)
        z = np.dot(w, x) + b
        expected = 1.0 / (1.0 + np.exp(-z))
        assert predict(model, _fv(x)).probability == pytest.approx(expected, abs=1e-15)

    def test_probability_monotone_in_margin(self):
        model = _manual_model([1.0], 0.0, 1)
        probs = [predict(model, _fv([x])).probability for x in np.linspace(-4, 4, 30)]
        assert all(a < b for a, b in zip(probs, probs[1:]))

    def test_dimension_mismatch_rejected(self):
        model = _manual_model([1.0, 2.0], 0.0, 2)
        with pytest.raises(ClassifierError, match="dimension mismatch"):
            predict(model, _fv([1.0, 2.0, 3.0]))

    def test_kind_mismatch_rejected(self):
        model = _manual_model([1.0], 0.0, 1)
        with pytest.raises(ClassifierError):
            predict(model, _fv([1.0], kind=COUNTING))


# --- LOO-CV ---------------------------------------------------------------------

class TestLooCv:
    @pytest.mark.parametrize("kind", MODEL_KINDS)
    def test_separable_fixture_scores_100(self, kind):
        hyperparams = {"grid": (1e-3, 1e-1)} if kind == "lasso" else None
        got = loo_cv(separable_examples(), kind=kind, seed=1, hyperparams=hyperparams)
        assert got["precision"] == got["recall"] == got["f1"] == 100.0

    def test_three_example_manual_folds(self):
        examples = separable_examples(3, seed=4)
        got = loo_cv(examples, kind="logistic")
        tp = fp = fn = 0  # brute-force fold-by-fold
        for i in range(3):
            rest = [examples[j] for j in range(3) if j != i]
            if len({ex.label for ex in rest}) < 2:
                pred = False
            else:
                pred = predict(train(rest, kind="logistic"), examples[i].features).label
            actual = examples[i].label
            tp += pred and actual
            fp += pred and not actual
            fn += (not pred) and actual
        precision = 100.0 * tp / (tp + fp) if tp + fp else 0.0
        recall = 100.0 * tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        assert got["precision"] == pytest.approx(precision)
        assert got["recall"] == pytest.approx(recall)
        assert got["f1"] == pytest.approx(f1)

    def test_single_positive_fold_skipped_as_negative(self):
        examples = separable_examples(8, seed=2)
        one_pos = [LabeledExample(ex.features, i == 0, ex.kb)
                   for i, ex in enumerate(examples)]
        got = loo_cv(one_pos, kind="logistic")
        assert got["skipped_folds"] == 1
        assert got["recall"] == 0.0  # the only positive was predicted negative

    def test_order_independence(self):
        examples = separable_examples(10, seed=8)
        a = loo_cv(examples, kind="prior")
        b = loo_cv(list(reversed(examples)), kind="prior")
        assert a == b

    def test_too_few_examples_rejected(self):
        with pytest.raises(ClassifierError):
            loo_cv(separable_examples(2))


# --- random baseline and identifier filter ----------------------------------------

class TestRandomBaseline:
    def test_enumerating_training_distribution(self):
        got = random_baseline(133, 195)
        assert got["f1"] == pytest.approx(100 * 133 / 328)
        assert got["precision"] == got["recall"] == got["f1"]

    def test_no_positives(self):
        assert random_baseline(0, 17)["f1"] == 0.0

    def test_counting_training_distribution(self):
        assert random_baseline(39, 306)["f1"] == pytest.approx(100 * 39 / 345)

    def test_documented_negatives_denominator_reading(self):
        got = random_baseline(39, 306, denominator="negatives")
        assert got["f1"] == pytest.approx(100 * 39 / 306)

    def test_empty_rejected(self):
        with pytest.raises(ClassifierError):
            random_baseline(0, 0)

    def test_unknown_mode_rejected(self):
        with pytest.raises(ClassifierError):
            random_baseline(1, 1, denominator="positives")


class TestIdentifierFilter:
    @pytest.mark.parametrize("label,dropped", [
        ("playerId", True),
        ("idea", False),
        ("zipCode", True),
        ("id", True),
        ("code", True),
        ("barcode", False),
        ("identity", False),
        ("race_code", True),
        ("ID^-1", True),
        ("child", False),
    ])
    def test_examples(self, label, dropped):
        assert identifier_filter(label) is dropped


# --- numba/python path equivalence --------------------------------------------------

class TestKernelPaths:
    def test_jitted_and_plain_agree(self):
        X, y = _random_problem(21, n=18, d=5)
        rng = np.random.default_rng(2)
        w = rng.normal(size=5)
        b = 0.1
        jit = _kernels.logistic_loss_grad(w, b, X, y, 0.1, 0.01)
        plain = _kernels._logistic_loss_grad_py(w, b, X, y, 0.1, 0.01)
        assert jit[0] == pytest.approx(plain[0], rel=1e-12)
        np.testing.assert_allclose(jit[1], plain[1], rtol=1e-12, atol=1e-15)

        jf = _kernels.lasso_fit_cd(X, y, 0.05, 200, 1e-8)
        pf = _kernels._lasso_fit_cd_py(X, y, 0.05, 200, 1e-8)
        np.testing.assert_allclose(jf[0], pf[0], rtol=1e-10, atol=1e-14)
        assert jf[1] == pytest.approx(pf[1], rel=1e-10)

    def test_env_flag_disables_numba(self):
        code = (
            "import os; os.environ['SETPRED_NUMBA']='0';"
            "from setpred import _kernels;"
            "print(_kernels.NUMBA_ENABLED)"
        )
        out = subprocess.run([sys.executable, "-c", code],
                             capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "False"
