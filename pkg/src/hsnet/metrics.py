"""Binary classification metrics (positive class = 1)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class FoldMetrics:
    precision: float
    recall: float
    f1: float
    accuracy: float
    tp: int
    fp: int
    fn: int
    tn: int
    best_epoch: int = -1

    def to_json_obj(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "accuracy": self.accuracy,
            "confusion": {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn},
            "best_epoch": self.best_epoch,
        }


@dataclass
class MetricsReport:
    folds: list[FoldMetrics]

    def mean(self, name: str) -> float:
        return float(np.mean([getattr(f, name) for f in self.folds]))

    def to_json_obj(self) -> dict:
        return {
            "folds": [f.to_json_obj() for f in self.folds],
            "mean": {
                name: self.mean(name)
                for name in ("precision", "recall", "f1", "accuracy")
            },
        }

    def csv_rows(self) -> list[list]:
        rows = [["fold", "precision", "recall", "f1", "accuracy", "best_epoch"]]
        for i, f in enumerate(self.folds):
            rows.append([i, f.precision, f.recall, f.f1, f.accuracy, f.best_epoch])
        rows.append(["mean", self.mean("precision"), self.mean("recall"),
                     self.mean("f1"), self.mean("accuracy"), ""])
        return rows


def confusion_counts(y_true, y_pred) -> tuple[int, int, int, int]:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    tp = int(np.sum((y_true == 1) & (y_pred == 1)))
    fp = int(np.sum((y_true == 0) & (y_pred == 1)))
    fn = int(np.sum((y_true == 1) & (y_pred == 0)))
    tn = int(np.sum((y_true == 0) & (y_pred == 0)))
    return tp, fp, fn, tn


def fold_metrics(y_true, y_pred, best_epoch: int = -1) -> FoldMetrics:
    tp, fp, fn, tn = confusion_counts(y_true, y_pred)
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    accuracy = (tp + tn) / len(y_true) if len(y_true) else 0.0
    return FoldMetrics(precision=precision, recall=recall, f1=f1, accuracy=accuracy,
                       tp=tp, fp=fp, fn=fn, tn=tn, best_epoch=best_epoch)


def f1_score(y_true, y_pred) -> float:
    return fold_metrics(y_true, y_pred).f1
