"""Supervised set-predicate classifiers.

Assembles the enumerating/counting feature vectors, trains four model
families (plain logistic regression, weakly-regularized "prior" logistic,
L1 lasso logistic with an inner LOO lambda grid, and a 3-unit sigmoid MLP),
evaluates them with leave-one-out cross validation, and provides the
analytic random baseline plus the id/code label filter.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels
from .kb import PredicateId
from .labels import tokenize_label
from .stats import PredicateStats, predicate_from_dict, predicate_to_dict
from .typeprof import CLASS_ORDER, TypeProfile

log = logging.getLogger(__name__)

ENUMERATING = "enumerating"
COUNTING = "counting"
KINDS = (ENUMERATING, COUNTING)

MODEL_LOGISTIC = "logistic"
MODEL_PRIOR = "prior"
MODEL_LASSO = "lasso"
MODEL_NEURAL = "neural"
MODEL_KINDS = (MODEL_LOGISTIC, MODEL_PRIOR, MODEL_LASSO, MODEL_NEURAL)

# Domain/range one-hot classes; Thing and Literal fold into "Other".
ONE_HOT_CLASSES = ("Person", "Place", "Organization", "Event", "Work", "Other")

_FIVE = ("mean", "max", "min", "p10", "p90")

ENUMERATING_FEATURES = (
    ("plural_singular_ratio",)
    + tuple(f"domain_{c}" for c in ONE_HOT_CLASSES)
    + tuple(f"range_{c}" for c in ONE_HOT_CLASSES)
    + tuple(f"functionality_{s}" for s in _FIVE)
    + ("frac_entity",)
)

COUNTING_FEATURES = (
    ("plural_singular_ratio",)
    + tuple(f"domain_{c}" for c in ONE_HOT_CLASSES)
    + ("frac_integer",)
    + tuple(f"int_values_{s}" for s in _FIVE)
    + tuple(f"int_per_subject_{s}" for s in _FIVE)
)

FEATURE_NAMES = {ENUMERATING: ENUMERATING_FEATURES, COUNTING: COUNTING_FEATURES}

DEFAULT_LASSO_GRID = tuple(np.logspace(-3.0, 1.0, 10))
PRIOR_COEF_SCALE = 2.5
PRIOR_INTERCEPT_SCALE = 10.0


class ClassifierError(Exception):
    pass


@dataclass(frozen=True)
class FeatureVector:
    predicate: PredicateId
    kind: str
    values: np.ndarray
    missing_mask: np.ndarray
    names: Optional[tuple] = None  # canonical per-kind names when omitted

    @property
    def feature_names(self) -> tuple:
        return self.names if self.names is not None else FEATURE_NAMES[self.kind]

    def to_dict(self) -> dict:
        d = {
            "predicate": predicate_to_dict(self.predicate),
            "kind": self.kind,
            "values": [float(v) for v in self.values],
            "missing_mask": [bool(m) for m in self.missing_mask],
        }
        if self.names is not None:
            d["names"] = list(self.names)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureVector":
        return cls(
            predicate_from_dict(d["predicate"]),
            d["kind"],
            np.asarray(d["values"], dtype=np.float64),
            np.asarray(d["missing_mask"], dtype=bool),
            names=tuple(d["names"]) if "names" in d else None,
        )


@dataclass(frozen=True)
class LabeledExample:
    features: FeatureVector
    label: bool
    kb: str

    def to_dict(self) -> dict:
        return {"features": self.features.to_dict(), "label": self.label, "kb": self.kb}

    @classmethod
    def from_dict(cls, d: dict) -> "LabeledExample":
        return cls(FeatureVector.from_dict(d["features"]), bool(d["label"]), d["kb"])


def _one_hot(cls_name: str) -> list[float]:
    folded = cls_name if cls_name in CLASS_ORDER[:-1] else "Other"
    return [1.0 if folded == c else 0.0 for c in ONE_HOT_CLASSES]


def assemble_features(
    stats: PredicateStats,
    profile: TypeProfile,
    ratio: Optional[float],
    kind: str,
    embedding: Optional[np.ndarray] = None,
    embedding_dim: int = 0,
) -> FeatureVector:
    """Build the fixed-order feature vector for one predicate.

    A missing ratio or an undefined integer summary contributes zeros and
    sets the matching missing-mask bits; the mask is bookkeeping only, not
    extra model input. With embedding_dim > 0 the label's mean word vector
    is appended (zeros + mask when the label is out of vocabulary); off by
    default.
    """
    if stats.predicate != profile.predicate:
        raise ClassifierError(
            f"stats are for {stats.predicate.iri} but profile is for {profile.predicate.iri}"
        )
    if kind not in KINDS:
        raise ClassifierError(f"unknown feature kind: {kind}")

    values: list[float] = []
    missing: list[bool] = []

    def put(v: float, is_missing: bool = False) -> None:
        values.append(float(v))
        missing.append(is_missing)

    if ratio is None:
        put(0.0, True)
    else:
        put(ratio)
    for v in _one_hot(profile.domain):
        put(v)
    if kind == ENUMERATING:
        for v in _one_hot(profile.range):
            put(v)
        f = stats.functionality
        for name in _FIVE:
            put(getattr(f, name))
        put(stats.datatypes.frac_entity)
    else:
        put(stats.datatypes.frac_integer)
        for summary in (stats.int_values, stats.int_per_subject):
            for name in _FIVE:
                put(getattr(summary, name) if summary.defined else 0.0, not summary.defined)

    names = FEATURE_NAMES[kind]
    if embedding_dim:
        if embedding is not None and embedding.shape[0] != embedding_dim:
            raise ClassifierError(
                f"embedding has dimension {embedding.shape[0]}, expected {embedding_dim}"
            )
        for i in range(embedding_dim):
            if embedding is None:
                put(0.0, True)
            else:
                put(float(embedding[i]))
        names = names + tuple(f"embedding_{i}" for i in range(embedding_dim))

    return FeatureVector(
        stats.predicate, kind, np.asarray(values), np.asarray(missing, dtype=bool),
        names=names if embedding_dim else None,
    )


@dataclass
class TrainedModel:
    kind: str
    feature_kind: str
    feature_names: tuple
    mean: np.ndarray
    std: np.ndarray
    params: dict
    hyperparams: dict
    threshold: float = 0.5

    def to_json(self) -> str:
        def arr(x):
            return x.tolist() if isinstance(x, np.ndarray) else x

        return json.dumps(
            {
                "kind": self.kind,
                "feature_kind": self.feature_kind,
                "feature_names": list(self.feature_names),
                "standardization": {"mean": arr(self.mean), "std": arr(self.std)},
                "params": {k: arr(v) for k, v in self.params.items()},
                "hyperparams": self.hyperparams,
                "threshold": self.threshold,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "TrainedModel":
        d = json.loads(text)
        params = {
            k: (np.asarray(v, dtype=np.float64) if isinstance(v, list) else float(v))
            for k, v in d["params"].items()
        }
        return cls(
            kind=d["kind"],
            feature_kind=d["feature_kind"],
            feature_names=tuple(d["feature_names"]),
            mean=np.asarray(d["standardization"]["mean"], dtype=np.float64),
            std=np.asarray(d["standardization"]["std"], dtype=np.float64),
            params=params,
            hyperparams=d["hyperparams"],
            threshold=d["threshold"],
        )


def _design_matrix(examples: Sequence[LabeledExample]):
    X = np.stack([ex.features.values for ex in examples]).astype(np.float64)
    y = np.array([1.0 if ex.label else 0.0 for ex in examples])
    return X, y


def _standardize_params(X: np.ndarray):
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    return mean, std


def _gd_step(Z: np.ndarray, l2: float, l2_b: float) -> float:
    # 1/L with L an upper bound on the summed-loss Hessian spectral norm.
    A = np.hstack([Z, np.ones((Z.shape[0], 1))])
    lip = 0.25 * float(np.linalg.eigvalsh(A.T @ A)[-1]) + max(l2, l2_b)
    return 1.0 / lip


def _fit_logistic(Z, y, l2, l2_b, max_iter=500, tol=1e-6):
    step = _gd_step(Z, l2, l2_b)
    w, b, iters = _kernels.logistic_fit_gd(
        np.ascontiguousarray(Z), np.ascontiguousarray(y), l2, l2_b, step, max_iter, tol
    )
    return np.asarray(w), float(b), int(iters)


def _f1_percent(tp: int, fp: int, fn: int) -> float:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 100.0 * 2 * precision * recall / (precision + recall)


def _select_lasso_lambda(Z, y, grid, max_sweeps, tol):
    """Inner LOO over the lambda grid, maximizing F1; ties prefer the larger
    (sparser) lambda."""
    n = Z.shape[0]
    best_lam, best_f1 = None, -1.0
    for lam in grid:
        tp = fp = fn = 0
        for i in range(n):
            mask = np.arange(n) != i
            ytr = y[mask]
            if ytr.min() == ytr.max():
                pred = False
            else:
                w, b, _ = _kernels.lasso_fit_cd(
                    np.ascontiguousarray(Z[mask]), np.ascontiguousarray(ytr),
                    float(lam), max_sweeps, tol,
                )
                pred = _sigmoid_scalar(float(np.dot(Z[i], np.asarray(w)) + b)) >= 0.5
            actual = y[i] >= 0.5
            if pred and actual:
                tp += 1
            elif pred:
                fp += 1
            elif actual:
                fn += 1
        f1 = _f1_percent(tp, fp, fn)
        if f1 >= best_f1:
            best_f1, best_lam = f1, float(lam)
    return best_lam, best_f1


def _sigmoid_scalar(z: float) -> float:
    if z >= 0:
        return float(1.0 / (1.0 + np.exp(-z)))
    e = np.exp(z)
    return float(e / (1.0 + e))


def train(
    examples: Sequence[LabeledExample],
    kind: str = MODEL_LOGISTIC,
    seed: int = 0,
    hyperparams: Optional[dict] = None,
) -> TrainedModel:
    """Fit one model family on the labeled examples.

    Features are z-scored on the training set; the standardization is
    stored on the model and re-applied at prediction time.
    """
    if kind not in MODEL_KINDS:
        raise ClassifierError(f"unknown model kind: {kind}")
    if len(examples) < 2:
        raise ClassifierError("need at least 2 examples")
    feature_kinds = {ex.features.kind for ex in examples}
    if len(feature_kinds) != 1:
        raise ClassifierError("examples mix feature kinds")
    feature_kind = feature_kinds.pop()
    hp = dict(hyperparams or {})

    X, y = _design_matrix(examples)
    if kind != MODEL_NEURAL and y.min() == y.max():
        raise ClassifierError("degenerate labels")
    mean, std = _standardize_params(X)
    Z = (X - mean) / std

    if kind == MODEL_LOGISTIC:
        w, b, iters = _fit_logistic(Z, y, 0.0, 0.0,
                                    hp.get("max_iter", 500), hp.get("tol", 1e-6))
        params = {"w": w, "b": b}
        hp.update({"iterations": iters})
    elif kind == MODEL_PRIOR:
        l2 = 1.0 / PRIOR_COEF_SCALE**2
        l2_b = 1.0 / PRIOR_INTERCEPT_SCALE**2
        w, b, iters = _fit_logistic(Z, y, l2, l2_b,
                                    hp.get("max_iter", 500), hp.get("tol", 1e-6))
        params = {"w": w, "b": b}
        hp.update({"coef_scale": PRIOR_COEF_SCALE,
                   "intercept_scale": PRIOR_INTERCEPT_SCALE, "iterations": iters})
    elif kind == MODEL_LASSO:
        max_sweeps = hp.get("max_sweeps", 1000)
        tol = hp.get("tol", 1e-8)
        if "lam" in hp:
            lam = float(hp["lam"])
        else:
            lam, inner_f1 = _select_lasso_lambda(
                Z, y, hp.get("grid", DEFAULT_LASSO_GRID), max_sweeps, tol
            )
            hp.update({"inner_loo_f1": inner_f1})
        w, b, sweeps = _kernels.lasso_fit_cd(
            np.ascontiguousarray(Z), np.ascontiguousarray(y), lam, max_sweeps, tol
        )
        params = {"w": np.asarray(w), "b": float(b)}
        hp.update({"lam": lam, "sweeps": int(sweeps)})
    else:  # neural
        hidden = hp.get("hidden", 3)
        lr = hp.get("lr", 0.5)
        epochs = hp.get("epochs", 2000)
        rng = np.random.default_rng(seed)
        d = Z.shape[1]
        W1 = rng.uniform(-0.5, 0.5, (d, hidden))
        b1 = rng.uniform(-0.5, 0.5, hidden)
        w2 = rng.uniform(-0.5, 0.5, hidden)
        b2 = float(rng.uniform(-0.5, 0.5))
        W1, b1, w2, b2 = _kernels.mlp_fit_gd(
            np.ascontiguousarray(Z), np.ascontiguousarray(y),
            np.ascontiguousarray(W1), np.ascontiguousarray(b1),
            np.ascontiguousarray(w2), b2, lr, epochs,
        )
        params = {"W1": np.asarray(W1), "b1": np.asarray(b1),
                  "w2": np.asarray(w2), "b2": float(b2)}
        hp.update({"hidden": hidden, "lr": lr, "epochs": epochs, "seed": seed})

    return TrainedModel(
        kind=kind,
        feature_kind=feature_kind,
        feature_names=examples[0].features.feature_names,
        mean=mean,
        std=std,
        params=params,
        hyperparams=hp,
    )


@dataclass(frozen=True)
class Prediction:
    probability: float
    label: bool


def predict(model: TrainedModel, features: FeatureVector) -> Prediction:
    """Probability and thresholded label for one feature vector."""
    if features.kind != model.feature_kind:
        raise ClassifierError(
            f"model expects {model.feature_kind} features, got {features.kind}"
        )
    if features.values.shape[0] != model.mean.shape[0]:
        raise ClassifierError(
            f"dimension mismatch: {features.values.shape[0]} != {model.mean.shape[0]}"
        )
    z = (features.values - model.mean) / model.std
    if model.kind == MODEL_NEURAL:
        p = float(
            _kernels.mlp_predict(
                np.ascontiguousarray(z.reshape(1, -1)),
                np.ascontiguousarray(model.params["W1"]),
                np.ascontiguousarray(model.params["b1"]),
                np.ascontiguousarray(model.params["w2"]),
                float(model.params["b2"]),
            )[0]
        )
    else:
        p = _sigmoid_scalar(float(np.dot(z, model.params["w"]) + model.params["b"]))
    return Prediction(float(p), bool(p >= model.threshold))


def loo_cv(
    examples: Sequence[LabeledExample],
    kind: str = MODEL_LOGISTIC,
    seed: int = 0,
    hyperparams: Optional[dict] = None,
) -> dict:
    """Leave-one-out cross validation; pooled precision/recall/F1 in
    percent.

    Folds whose training rest is single-class (non-neural models) are
    skipped and counted as negative predictions.
    """
    if len(examples) < 3:
        raise ClassifierError("need at least 3 examples for LOO")
    tp = fp = fn = tn = 0
    skipped = 0
    for i, held_out in enumerate(examples):
        rest = list(examples[:i]) + list(examples[i + 1:])
        labels = {ex.label for ex in rest}
        if kind != MODEL_NEURAL and len(labels) < 2:
            skipped += 1
            log.warning("LOO fold %d skipped: single-class training set", i)
            pred = False
        else:
            model = train(rest, kind=kind, seed=seed, hyperparams=hyperparams)
            pred = predict(model, held_out.features).label
        if pred and held_out.label:
            tp += 1
        elif pred:
            fp += 1
        elif held_out.label:
            fn += 1
        else:
            tn += 1
    precision = 100.0 * tp / (tp + fp) if tp + fp else 0.0
    recall = 100.0 * tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"precision": precision, "recall": recall, "f1": f1, "skipped_folds": skipped}


def random_baseline(n_pos: int, n_neg: int, denominator: str = "total") -> dict:
    """Analytic expectation of a label-frequency random predictor.

    With `denominator="total"` (the definition) precision = recall = f1 =
    100*n_pos/(n_pos+n_neg). The alternate `denominator="negatives"`
    reading divides by n_neg instead; both readings are kept because
    published baseline rows have been computed either way.
    """
    if n_pos + n_neg <= 0:
        raise ClassifierError("need at least one example")
    if denominator == "total":
        rate = n_pos / (n_pos + n_neg)
    elif denominator == "negatives":
        rate = n_pos / n_neg if n_neg else 1.0
    else:
        raise ClassifierError(f"unknown denominator mode: {denominator}")
    v = 100.0 * rate
    return {"precision": v, "recall": v, "f1": v}


def identifier_filter(label: str) -> bool:
    """True when the label should be dropped: one of its tokens is exactly
    'id' or 'code' (substrings inside longer words do not count)."""
    return any(tok in ("id", "code") for tok in tokenize_label(label))


def write_examples_jsonl(examples: Iterable[LabeledExample], fh) -> None:
    for ex in sorted(examples, key=lambda e: (e.features.kind, e.features.predicate.iri)):
        fh.write(json.dumps(ex.to_dict(), sort_keys=True) + "\n")


def read_examples_jsonl(fh) -> list[LabeledExample]:
    return [LabeledExample.from_dict(json.loads(line)) for line in fh if line.strip()]
