"""Confusion matrix and the F1 family (per-class, macro, weighted).

Zero-denominator convention: precision, recall and F1 are 0 when
undefined, and zero-support classes stay in the macro mean.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class ClassScore:
    name: str
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class MetricsReport:
    per_class: tuple[ClassScore, ...]
    macro_f1: float
    weighted_f1: float
    accuracy: float

    def as_dict(self) -> dict:
        return {
            "per_class": [
                {
                    "class": score.name,
                    "precision": score.precision,
                    "recall": score.recall,
                    "f1": score.f1,
                    "support": score.support,
                }
                for score in self.per_class
            ],
            "macro_f1": self.macro_f1,
            "weighted_f1": self.weighted_f1,
            "accuracy": self.accuracy,
        }


@dataclass(frozen=True)
class ConfusionMatrix:
    """K x K counts; rows are gold classes, columns predicted classes."""

    counts: np.ndarray
    class_names: tuple[str, ...]

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        k = len(self.class_names)
        if counts.shape != (k, k):
            raise ValueError(f"counts shape {counts.shape} != ({k}, {k})")
        if (counts < 0).any():
            raise ValueError("counts must be nonnegative")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def as_dict(self) -> dict:
        return {
            "class_names": list(self.class_names),
            "counts": self.counts.tolist(),
        }


def confusion(
    golds: Sequence[int],
    preds: Sequence[int],
    k: int,
    class_names: Sequence[str] | None = None,
) -> ConfusionMatrix:
    """Tally (gold, predicted) pairs into a K x K matrix."""
    golds = np.asarray(golds, dtype=np.int64)
    preds = np.asarray(preds, dtype=np.int64)
    if golds.shape != preds.shape:
        raise ValueError(f"{golds.shape[0]} golds but {preds.shape[0]} predictions")
    if golds.size and not (
        (0 <= golds).all() and (golds < k).all() and (0 <= preds).all() and (preds < k).all()
    ):
        raise ValueError(f"labels must lie in [0, {k})")
    counts = np.zeros((k, k), dtype=np.int64)
    np.add.at(counts, (golds, preds), 1)
    names = tuple(class_names) if class_names else tuple(f"class_{i}" for i in range(k))
    if len(names) != k:
        raise ValueError(f"{len(names)} class names for k={k}")
    return ConfusionMatrix(counts=counts, class_names=names)


def score(cm: ConfusionMatrix) -> MetricsReport:
    """Per-class precision/recall/F1 plus macro F1, weighted F1, accuracy."""
    counts = cm.counts
    total = cm.total
    if total == 0:
        raise ValueError("nothing scored: confusion matrix is all zero")

    tp = np.diag(counts).astype(np.float64)
    support = counts.sum(axis=1)
    predicted = counts.sum(axis=0)

    per_class = []
    f1s = np.zeros(len(cm.class_names))
    for i, name in enumerate(cm.class_names):
        precision = tp[i] / predicted[i] if predicted[i] > 0 else 0.0
        recall = tp[i] / support[i] if support[i] > 0 else 0.0
        f1 = (
            2 * precision * recall / (precision + recall)
            if precision + recall > 0
            else 0.0
        )
        f1s[i] = f1
        per_class.append(
            ClassScore(
                name=name,
                precision=float(precision),
                recall=float(recall),
                f1=float(f1),
                support=int(support[i]),
            )
        )

    return MetricsReport(
        per_class=tuple(per_class),
        macro_f1=float(f1s.mean()),
        weighted_f1=float((support * f1s).sum() / support.sum()),
        accuracy=float(tp.sum() / total),
    )


def format_report(cm: ConfusionMatrix, report: MetricsReport) -> str:
    """Human-readable aligned table: confusion matrix, then the score block."""
    names = cm.class_names
    label_width = max(len(n) for n in names + ("gold\\pred",))
    cell = max(7, max(len(str(v)) for v in cm.counts.ravel()))

    lines = ["confusion matrix (rows gold, columns predicted):"]
    header = " " * (label_width + 2) + " ".join(f"{n[:cell]:>{cell}}" for n in names)
    lines.append(header)
    for i, name in enumerate(names):
        row = " ".join(f"{int(v):>{cell}}" for v in cm.counts[i])
        lines.append(f"{name:<{label_width}}  {row}")

    lines.append("")
    lines.append(
        f"{'class':<{label_width}}  {'precision':>9} {'recall':>9} {'f1':>9} {'support':>8}"
    )
    for s in report.per_class:
        lines.append(
            f"{s.name:<{label_width}}  {s.precision:>9.4f} {s.recall:>9.4f}"
            f" {s.f1:>9.4f} {s.support:>8d}"
        )
    lines.append("")
    lines.append(f"accuracy     {report.accuracy:.4f}")
    lines.append(f"macro F1     {report.macro_f1:.4f}")
    lines.append(f"weighted F1  {report.weighted_f1:.4f}")
    return "\n".join(lines)
