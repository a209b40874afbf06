"""Scoring: confusion matrices, macro-F1 and micro-F1."""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Union

import numpy as np

from src.core.exceptions import EmptyMatrix, LabelOutOfRange, LengthMismatch


@dataclass(frozen=True)
class ConfusionMatrix:
    """``m x m`` counts; rows are gold classes, columns predicted classes."""

    counts: np.ndarray

    @property
    def n_classes(self) -> int:
        return int(self.counts.shape[0])

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def confusion(gold: Sequence[int], pred: Sequence[int], m: int) -> ConfusionMatrix:
    """Tally gold/predicted label pairs.

    Raises:
        LengthMismatch: If the sequences differ in length.
        LabelOutOfRange: If a label is outside ``[0, m)``.
    """
    gold_arr = np.asarray(gold, dtype=np.int64)
    pred_arr = np.asarray(pred, dtype=np.int64)
    if gold_arr.shape != pred_arr.shape:
        raise LengthMismatch(f"{len(gold_arr)} gold labels vs {len(pred_arr)} predictions")
    for name, arr in (("gold", gold_arr), ("predicted", pred_arr)):
        if arr.size and (arr.min() < 0 or arr.max() >= m):
            raise LabelOutOfRange(f"A {name} label lies outside [0, {m})")
    counts = np.zeros((m, m), dtype=np.int64)
    np.add.at(counts, (gold_arr, pred_arr), 1)
    return ConfusionMatrix(counts)


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    # 0/0 counts as 0
    out = np.zeros_like(num, dtype=np.float64)
    np.divide(num, den, out=out, where=den > 0)
    return out


def per_class_scores(cm: ConfusionMatrix) -> List[Dict[str, float]]:
    """Precision, recall, F1 and support of every class."""
    if cm.total == 0:
        raise EmptyMatrix("Confusion matrix has no counts")
    counts = cm.counts.astype(np.float64)
    tp = np.diag(counts)
    precision = _safe_ratio(tp, counts.sum(axis=0))
    recall = _safe_ratio(tp, counts.sum(axis=1))
    f1 = _safe_ratio(2 * precision * recall, precision + recall)
    return [
        {
            "class": j,
            "precision": float(precision[j]),
            "recall": float(recall[j]),
            "f1": float(f1[j]),
            "support": int(cm.counts[j].sum()),
        }
        for j in range(cm.n_classes)
    ]


def macro_f1(cm: ConfusionMatrix) -> float:
    """Unweighted mean of per-class F1."""
    return float(np.mean([row["f1"] for row in per_class_scores(cm)]))


def micro_f1(cm: ConfusionMatrix) -> float:
    """F1 from pooled counts; equals accuracy for single-label data."""
    if cm.total == 0:
        raise EmptyMatrix("Confusion matrix has no counts")
    tp = float(np.trace(cm.counts))
    errors = float(cm.total) - tp
    # pooled fp and fn both equal the off-diagonal mass
    return 2 * tp / (2 * tp + 2 * errors)


def metrics_report(cm: ConfusionMatrix) -> Dict:
    """The metrics JSON object: ``{macro_f1, micro_f1, per_class}``."""
    return {
        "macro_f1": macro_f1(cm),
        "micro_f1": micro_f1(cm),
        "per_class": per_class_scores(cm),
    }


def evaluate_labels(gold: Sequence[int], pred: Sequence[int], m: int) -> Dict:
    return metrics_report(confusion(gold, pred, m))


def dump_metrics(metrics: Dict) -> str:
    """Deterministic JSON text for a metrics object."""
    return json.dumps(metrics, sort_keys=True, indent=2) + "\n"


def write_metrics(path: Union[str, Path], metrics: Dict) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dump_metrics(metrics))
