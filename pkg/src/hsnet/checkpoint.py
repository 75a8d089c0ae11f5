"""Self-describing checkpoint container.

A checkpoint is a single ``.npz`` archive holding:

* ``meta``                 JSON string: {"version", "seed", "config", "folds":
                           [{"test_ids": [...]}, ...]}
* ``fold{f}/param/<name>`` one array per named parameter tensor per fold
* ``fold{f}/stats/<name>`` behavior min/max arrays fit on that fold's train split
"""

from __future__ import annotations

import io
import json

import numpy as np

from .errors import ValidationError

CHECKPOINT_VERSION = 1


def save_checkpoint(path, meta: dict, fold_tensors: list[dict[str, np.ndarray]],
                    fold_stats: list[dict[str, np.ndarray]]) -> None:
    arrays: dict[str, np.ndarray] = {}
    for f, tensors in enumerate(fold_tensors):
        for name, arr in tensors.items():
            arrays[f"fold{f}/param/{name}"] = np.asarray(arr)
        for name, arr in fold_stats[f].items():
            arrays[f"fold{f}/stats/{name}"] = np.asarray(arr)
    meta = dict(meta)
    meta["version"] = CHECKPOINT_VERSION
    arrays["meta"] = np.frombuffer(
        json.dumps(meta, sort_keys=True).encode("utf-8"), dtype=np.uint8
    )
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_checkpoint(path) -> tuple[dict, list[dict[str, np.ndarray]], list[dict[str, np.ndarray]]]:
    try:
        archive = np.load(path)
    except (OSError, ValueError) as exc:
        raise ValidationError(f"cannot read checkpoint {path}: {exc}") from exc
    if "meta" not in archive:
        raise ValidationError(f"checkpoint {path} has no meta entry")
    meta = json.loads(bytes(archive["meta"]).decode("utf-8"))
    if meta.get("version") != CHECKPOINT_VERSION:
        raise ValidationError(
            f"checkpoint version {meta.get('version')} unsupported "
            f"(expected {CHECKPOINT_VERSION})"
        )
    n_folds = len(meta["folds"])
    fold_tensors: list[dict[str, np.ndarray]] = [{} for _ in range(n_folds)]
    fold_stats: list[dict[str, np.ndarray]] = [{} for _ in range(n_folds)]
    for key in archive.files:
        if key == "meta":
            continue
        fold_part, kind, name = key.split("/", 2)
        f = int(fold_part.removeprefix("fold"))
        if kind == "param":
            fold_tensors[f][name] = archive[key]
        elif kind == "stats":
            fold_stats[f][name] = archive[key]
        else:
            raise ValidationError(f"unexpected checkpoint entry {key!r}")
    return meta, fold_tensors, fold_stats
