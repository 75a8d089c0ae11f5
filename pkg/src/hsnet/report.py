"""Figure rendering for the report paths (training curves, fold metrics,
ablation bars, embedding scatter). All figures render headlessly to files
next to the delimited outputs they illustrate."""

from __future__ import annotations

import csv

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .metrics import MetricsReport  # noqa: E402


def write_csv(path, rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerows(rows)


def training_curves(log_rows: list[dict], out_png) -> None:
    if not log_rows:
        return
    folds = sorted({row["fold"] for row in log_rows})
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for f in folds:
        rows = [r for r in log_rows if r["fold"] == f]
        epochs = [r["epoch"] for r in rows]
        axes[0].plot(epochs, [r["loss_total"] for r in rows], label=f"fold {f}")
        axes[1].plot(epochs, [r["val_f1"] for r in rows], label=f"fold {f}")
    axes[0].set_xlabel("epoch")
    axes[0].set_ylabel("total loss")
    axes[1].set_xlabel("epoch")
    axes[1].set_ylabel("validation F1")
    axes[1].set_ylim(-0.02, 1.02)
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_png, dpi=120)
    plt.close(fig)


def fold_metric_bars(report: MetricsReport, out_png) -> None:
    names = ("precision", "recall", "f1", "accuracy")
    n_folds = len(report.folds)
    x = np.arange(n_folds)
    width = 0.2
    fig, ax = plt.subplots(figsize=(8, 4))
    for i, name in enumerate(names):
        vals = [getattr(f, name) for f in report.folds]
        ax.bar(x + (i - 1.5) * width, vals, width, label=name)
    ax.set_xticks(x)
    ax.set_xticklabels([f"fold {i}" for i in range(n_folds)])
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_png, dpi=120)
    plt.close(fig)


def ablation_bars(rows: list[list], out_png) -> None:
    header, data = rows[0], rows[1:]
    f1_col = header.index("f1")
    acc_col = header.index("accuracy")
    labels = [r[0] for r in data]
    x = np.arange(len(labels))
    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(labels)), 4))
    ax.bar(x - 0.2, [r[f1_col] for r in data], 0.4, label="F1")
    ax.bar(x + 0.2, [r[acc_col] for r in data], 0.4, label="accuracy")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=20, ha="right", fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_png, dpi=120)
    plt.close(fig)


def pca_2d(matrix: np.ndarray) -> np.ndarray:
    centered = matrix - matrix.mean(axis=0, keepdims=True)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    return centered @ vt[:2].T


def embedding_scatter(rows: list[dict], out_png) -> None:
    if len(rows) < 3:
        return
    matrix = np.stack([r["embedding"] for r in rows])
    labels = np.array([r["label"] for r in rows])
    coords = pca_2d(matrix)
    fig, ax = plt.subplots(figsize=(5, 5))
    for label, color, name in ((0, "tab:blue", "non-depressed"),
                               (1, "tab:red", "depressed")):
        mask = labels == label
        ax.scatter(coords[mask, 0], coords[mask, 1], s=14, c=color,
                   label=name, alpha=0.7)
    ax.set_xlabel("PC 1")
    ax.set_ylabel("PC 2")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_png, dpi=120)
    plt.close(fig)
