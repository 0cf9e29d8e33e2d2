"""Evaluation harness: judgment aggregation, P/R/F1, NDCG@k, and the
cross-KB transferability matrix."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .classifier import LabeledExample, loo_cv, random_baseline, train, predict

CLASS_GRADES = {
    "Yes": 1.0, "MaybeYes": 0.75, "DoNotKnow": 0.5, "MaybeNo": 0.25, "No": 0.0,
}
RELATEDNESS_GRADES = {"High": 1.0, "Moderate": 0.67, "Low": 0.33, "None": 0.0}
COMPLETENESS_GRADES = {"Complete": 1.0, "Incomplete": 0.5, "Unrelated": 0.0}

# Scores strictly inside this interval have no clear polarity and are dropped.
DROP_INTERVAL = (0.4, 0.6)
POSITIVE_CUT = 0.6


class EvalError(Exception):
    pass


@dataclass(frozen=True)
class AggregatedLabel:
    score: float
    label: Optional[bool]  # None = dropped (no clear polarity)

    @property
    def dropped(self) -> bool:
        return self.label is None


def aggregate_class_judgments(responses: Sequence[str]) -> AggregatedLabel:
    """Mean of the graded responses; drop when the mean falls strictly
    inside the no-polarity interval, otherwise binarize at the upper cut."""
    if not responses:
        raise EvalError("no responses")
    try:
        score = sum(CLASS_GRADES[r] for r in responses) / len(responses)
    except KeyError as e:
        raise EvalError(f"unknown response: {e.args[0]!r}") from None
    if DROP_INTERVAL[0] < score < DROP_INTERVAL[1]:
        return AggregatedLabel(score, None)
    return AggregatedLabel(score, score >= POSITIVE_CUT)


def aggregate_relevance(responses: Sequence[dict]) -> float:
    """Mean over all relatedness and completeness grades (two per response)."""
    if not responses:
        raise EvalError("no responses")
    total = 0.0
    for r in responses:
        try:
            total += RELATEDNESS_GRADES[r["relatedness"]]
            total += COMPLETENESS_GRADES[r["completeness"]]
        except KeyError as e:
            raise EvalError(f"bad relevance response: {e.args[0]!r}") from None
    return total / (2 * len(responses))


def pooled_std(grade_lists: Sequence[Sequence[float]]) -> float:
    """Pooled standard deviation across judgment groups (the only
    inter-annotator agreement summary reported). Groups with fewer than
    two responses carry no degrees of freedom."""
    numerator = 0.0
    dof = 0
    for grades in grade_lists:
        n = len(grades)
        if n < 2:
            continue
        mean = sum(grades) / n
        variance = sum((g - mean) ** 2 for g in grades) / (n - 1)
        numerator += (n - 1) * variance
        dof += n - 1
    return math.sqrt(numerator / dof) if dof else 0.0


def ndcg_at_k(ranked_grades: Sequence[float], k: int) -> float:
    """Graded NDCG with 1/log2(i+1) discounts; the ideal ordering is the
    descending sort of all grades. All-zero grades define NDCG = 0."""
    if k < 1:
        raise EvalError("k must be >= 1")

    def dcg(grades):
        return sum(g / math.log2(i + 1) for i, g in enumerate(grades[:k], start=1))

    ideal = sorted(ranked_grades, reverse=True)
    idcg = dcg(ideal)
    if idcg == 0.0:
        return 0.0
    return dcg(list(ranked_grades)) / idcg


def prf1(predictions: Sequence[bool], labels: Sequence[bool]) -> dict:
    """Pooled precision/recall/F1 in percent; zero denominators give 0."""
    if len(predictions) != len(labels):
        raise EvalError(f"length mismatch: {len(predictions)} != {len(labels)}")
    tp = sum(1 for p, l in zip(predictions, labels) if p and l)
    fp = sum(1 for p, l in zip(predictions, labels) if p and not l)
    fn = sum(1 for p, l in zip(predictions, labels) if not p and l)
    precision = 100.0 * tp / (tp + fp) if tp + fp else 0.0
    recall = 100.0 * tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"precision": precision, "recall": recall, "f1": f1}


@dataclass
class TransferMatrix:
    kbs: list
    cells: dict  # (train_kb, test_kb) -> F1 percent or None for unavailable
    random_row: dict  # test_kb -> F1 percent

    def to_dict(self) -> dict:
        return {
            "kbs": self.kbs,
            "cells": {f"{a}->{b}": v for (a, b), v in sorted(self.cells.items())},
            "random_row": self.random_row,
        }

    def format_table(self) -> str:
        width = max(9, max(len(kb) for kb in self.kbs) + 1)
        lines = ["".ljust(width) + "".join(kb.rjust(width) for kb in self.kbs)]
        for a in self.kbs:
            row = [a.ljust(width)]
            for b in self.kbs:
                v = self.cells[(a, b)]
                row.append(("-" if v is None else f"{v:.1f}").rjust(width))
            lines.append("".join(row))
        row = ["Random".ljust(width)]
        for b in self.kbs:
            row.append(f"{self.random_row[b]:.1f}".rjust(width))
        lines.append("".join(row))
        return "\n".join(lines)


def transfer_matrix(
    datasets: dict,
    kind: str = "lasso",
    seed: int = 0,
    hyperparams: Optional[dict] = None,
) -> TransferMatrix:
    """Train-on-A / test-on-B F1 grid across KBs.

    Diagonal cells use leave-one-out on the KB itself; single-class
    training sets leave a cell unavailable; the Random row is the analytic
    label-frequency baseline of each test set.
    """
    if len(datasets) < 2:
        raise EvalError("need at least 2 KBs")
    kbs = sorted(datasets)
    cells: dict = {}
    for a in kbs:
        train_set = datasets[a]
        trainable = len({ex.label for ex in train_set}) == 2
        for b in kbs:
            test_set = datasets[b]
            if not trainable:
                cells[(a, b)] = None
                continue
            if a == b:
                cells[(a, b)] = loo_cv(train_set, kind=kind, seed=seed,
                                       hyperparams=hyperparams)["f1"]
                continue
            model = train(train_set, kind=kind, seed=seed, hyperparams=hyperparams)
            preds = [predict(model, ex.features).label for ex in test_set]
            cells[(a, b)] = prf1(preds, [ex.label for ex in test_set])["f1"]
    random_row = {}
    for b in kbs:
        pos = sum(1 for ex in datasets[b] if ex.label)
        random_row[b] = random_baseline(pos, len(datasets[b]) - pos)["f1"]
    return TransferMatrix(kbs, cells, random_row)


# --- judgment file IO ---------------------------------------------------------

def read_class_judgments(fh) -> list[dict]:
    """JSON Lines of {predicate, kind, responses:[grade,...]}."""
    out = []
    for line in fh:
        if not line.strip():
            continue
        d = json.loads(line)
        if not d.get("responses"):
            raise EvalError(f"judgment for {d.get('predicate')} has no responses")
        out.append(d)
    return out


def read_relevance_judgments(fh) -> list[dict]:
    """JSON Lines of {source, target, direction, responses:[{relatedness,
    completeness},...]}."""
    out = []
    for line in fh:
        if not line.strip():
            continue
        d = json.loads(line)
        if not d.get("responses"):
            raise EvalError("relevance judgment has no responses")
        out.append(d)
    return out
