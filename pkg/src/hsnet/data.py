"""User-feature interchange format: records, vocabularies, manifests, splits.

Datasets live on disk as three files in one directory:

* ``records.jsonl``   one JSON object per line, one user per object
* ``vocab.json``      topic/entity id -> embedding
* ``manifest.json``   dimensions, counts, threshold, generation seed

Floats are serialized with Python ``repr`` (shortest round-trip form), so a
load/save cycle is lossless and byte-stable.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .sds import DEGREES, N_ITEMS

RECORDS_FILE = "records.jsonl"
VOCAB_FILE = "vocab.json"
MANIFEST_FILE = "manifest.json"

BEHAVIOR_FIELDS = (
    ("time_distribution", 24),
    ("emoticon_ratio", 3),
    ("sentiment_word_ratio", 3),
    ("original_retweet_counts", 2),
    ("follow_counts", 2),
    ("first_person_ratio", 2),
)
COUNT_FIELDS = ("time_distribution", "original_retweet_counts", "follow_counts")
RATIO_FIELDS = ("emoticon_ratio", "sentiment_word_ratio", "first_person_ratio")
BEHAVIOR_DIM = 36
RATIO_SUM_TOL = 1e-6


@dataclass
class BehaviorFeatures:
    time_distribution: np.ndarray
    emoticon_ratio: np.ndarray
    sentiment_word_ratio: np.ndarray
    original_retweet_counts: np.ndarray
    follow_counts: np.ndarray
    first_person_ratio: np.ndarray

    def validate(self, context: str = "") -> None:
        prefix = f"{context}: " if context else ""
        for name, dim in BEHAVIOR_FIELDS:
            vec = getattr(self, name)
            if vec.shape != (dim,):
                raise ValidationError(f"{prefix}behavior.{name} length {vec.shape[0]} ≠ {dim}")
            if not np.all(np.isfinite(vec)):
                raise ValidationError(f"{prefix}behavior.{name} has non-finite entries")
        for name in COUNT_FIELDS:
            if np.any(getattr(self, name) < 0):
                raise ValidationError(f"{prefix}behavior.{name} has negative counts")
        for name in RATIO_FIELDS:
            vec = getattr(self, name)
            if np.any(vec < 0) or np.any(vec > 1):
                raise ValidationError(f"{prefix}behavior.{name} entries outside [0, 1]")
            if vec.sum() > 1 + RATIO_SUM_TOL:
                raise ValidationError(f"{prefix}behavior.{name} sums to {vec.sum()} > 1")

    def as_vector(self) -> np.ndarray:
        return np.concatenate([getattr(self, name) for name, _ in BEHAVIOR_FIELDS])

    def to_json_obj(self) -> dict:
        return {
            name: [float(x) for x in getattr(self, name)] for name, _ in BEHAVIOR_FIELDS
        }

    @classmethod
    def from_json_obj(cls, obj: dict, context: str = "") -> "BehaviorFeatures":
        prefix = f"{context}: " if context else ""
        missing = [name for name, _ in BEHAVIOR_FIELDS if name not in obj]
        if missing:
            raise ValidationError(f"{prefix}behavior missing fields {missing}")
        feats = cls(**{
            name: np.asarray(obj[name], dtype=np.float64) for name, _ in BEHAVIOR_FIELDS
        })
        feats.validate(context)
        return feats


@dataclass
class BehaviorStats:
    """Per-dimension min/max of the count-valued sub-vectors, fit on training users."""

    minima: dict[str, np.ndarray]
    maxima: dict[str, np.ndarray]

    @classmethod
    def fit(cls, behaviors: list[BehaviorFeatures]) -> "BehaviorStats":
        if not behaviors:
            raise ValidationError("cannot fit behavior stats on an empty set")
        minima, maxima = {}, {}
        for name in COUNT_FIELDS:
            stacked = np.stack([getattr(b, name) for b in behaviors])
            minima[name] = stacked.min(axis=0)
            maxima[name] = stacked.max(axis=0)
        return cls(minima=minima, maxima=maxima)

    def to_arrays(self) -> dict[str, np.ndarray]:
        out = {}
        for name in COUNT_FIELDS:
            out[f"min_{name}"] = self.minima[name]
            out[f"max_{name}"] = self.maxima[name]
        return out

    @classmethod
    def from_arrays(cls, arrays: dict) -> "BehaviorStats":
        return cls(
            minima={name: np.asarray(arrays[f"min_{name}"]) for name in COUNT_FIELDS},
            maxima={name: np.asarray(arrays[f"max_{name}"]) for name in COUNT_FIELDS},
        )


def normalize_behavior(raw: BehaviorFeatures, stats: BehaviorStats) -> BehaviorFeatures:
    """Min-max scale the count sub-vectors to [0, 1]; ratios pass through.

    Dimensions with min == max map to 0. Values outside the training range
    (possible on held-out users) are clipped into [0, 1].
    """
    fields = {}
    for name, _ in BEHAVIOR_FIELDS:
        vec = getattr(raw, name)
        if name in COUNT_FIELDS:
            lo, hi = stats.minima[name], stats.maxima[name]
            span = hi - lo
            scaled = np.where(span > 0, (vec - lo) / np.where(span > 0, span, 1.0), 0.0)
            fields[name] = np.clip(scaled, 0.0, 1.0)
        else:
            fields[name] = vec.copy()
    return BehaviorFeatures(**fields)


@dataclass
class UserRecord:
    user_id: str
    label: int
    post_embedding: np.ndarray
    sds_answers: list[int]
    topic_ids: tuple[str, ...]
    entity_ids: tuple[str, ...]
    behavior: BehaviorFeatures

    def to_json_obj(self) -> dict:
        return {
            "user_id": self.user_id,
            "label": self.label,
            "post_embedding": [float(x) for x in self.post_embedding],
            "sds_answers": list(self.sds_answers),
            "topic_ids": sorted(self.topic_ids),
            "entity_ids": sorted(self.entity_ids),
            "behavior": self.behavior.to_json_obj(),
        }

    @classmethod
    def from_json_obj(cls, obj: dict, context: str = "") -> "UserRecord":
        prefix = f"{context}: " if context else ""
        for key in ("user_id", "label", "post_embedding", "sds_answers",
                    "topic_ids", "entity_ids", "behavior"):
            if key not in obj:
                raise ValidationError(f"{prefix}missing key {key!r}")
        user_id = str(obj["user_id"])
        label = obj["label"]
        if label not in (0, 1):
            raise ValidationError(f"{prefix}label {label!r} not in {{0, 1}}")
        answers = obj["sds_answers"]
        if len(answers) != N_ITEMS:
            raise ValidationError(f"{prefix}sds_answers length {len(answers)} ≠ {N_ITEMS}")
        for a in answers:
            if a not in DEGREES:
                raise ValidationError(f"{prefix}sds_answers value {a!r} outside {{1..4}}")
        return cls(
            user_id=user_id,
            label=int(label),
            post_embedding=np.asarray(obj["post_embedding"], dtype=np.float64),
            sds_answers=[int(a) for a in answers],
            topic_ids=tuple(sorted(str(t) for t in obj["topic_ids"])),
            entity_ids=tuple(sorted(str(e) for e in obj["entity_ids"])),
            behavior=BehaviorFeatures.from_json_obj(obj["behavior"], context),
        )


@dataclass
class Vocabulary:
    topics: dict[str, np.ndarray]
    entities: dict[str, np.ndarray]

    def validate(self, d_post: int) -> None:
        for kind, table in (("topic", self.topics), ("entity", self.entities)):
            for name, vec in table.items():
                if vec.shape != (d_post,):
                    raise ValidationError(
                        f"{kind} {name!r} embedding length {vec.shape[0]} ≠ d_post {d_post}"
                    )

    def to_json_obj(self) -> dict:
        return {
            "topics": {k: [float(x) for x in v] for k, v in sorted(self.topics.items())},
            "entities": {k: [float(x) for x in v] for k, v in sorted(self.entities.items())},
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Vocabulary":
        return cls(
            topics={str(k): np.asarray(v, dtype=np.float64) for k, v in obj["topics"].items()},
            entities={str(k): np.asarray(v, dtype=np.float64) for k, v in obj["entities"].items()},
        )


@dataclass
class DatasetManifest:
    d_post: int
    n_topics: int
    n_entities: int
    entity_threshold: float
    class_counts: dict[int, int]
    seed: int

    def to_json_obj(self) -> dict:
        return {
            "d_post": self.d_post,
            "n_topics": self.n_topics,
            "n_entities": self.n_entities,
            "entity_threshold": float(self.entity_threshold),
            "class_counts": {str(k): v for k, v in sorted(self.class_counts.items())},
            "seed": self.seed,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "DatasetManifest":
        return cls(
            d_post=int(obj["d_post"]),
            n_topics=int(obj["n_topics"]),
            n_entities=int(obj["n_entities"]),
            entity_threshold=float(obj["entity_threshold"]),
            class_counts={int(k): int(v) for k, v in obj["class_counts"].items()},
            seed=int(obj["seed"]),
        )


@dataclass
class UserRecordCollection:
    records: list[UserRecord]
    vocab: Vocabulary
    manifest: DatasetManifest

    @property
    def user_ids(self) -> list[str]:
        return [r.user_id for r in self.records]

    @property
    def labels(self) -> np.ndarray:
        return np.array([r.label for r in self.records], dtype=np.int64)

    def subset(self, user_ids) -> list[UserRecord]:
        wanted = set(user_ids)
        return [r for r in self.records if r.user_id in wanted]


def load_dataset(records_path, vocab_path, manifest_path) -> UserRecordCollection:
    """Load and cross-validate the three interchange files."""
    for path in (records_path, vocab_path, manifest_path):
        if not os.path.exists(path):
            raise ValidationError(f"no such file: {path}")
    with open(manifest_path) as fh:
        try:
            manifest = DatasetManifest.from_json_obj(json.load(fh))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"{manifest_path}: malformed manifest: {exc}") from exc
    with open(vocab_path) as fh:
        try:
            vocab = Vocabulary.from_json_obj(json.load(fh))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"{vocab_path}: malformed vocab: {exc}") from exc
    vocab.validate(manifest.d_post)
    if len(vocab.topics) != manifest.n_topics:
        raise ValidationError(
            f"vocab has {len(vocab.topics)} topics, manifest declares {manifest.n_topics}"
        )
    if len(vocab.entities) != manifest.n_entities:
        raise ValidationError(
            f"vocab has {len(vocab.entities)} entities, manifest declares {manifest.n_entities}"
        )

    records: list[UserRecord] = []
    seen_ids: set[str] = set()
    with open(records_path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            context = f"line {lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{context}: malformed JSON: {exc}") from exc
            rec = UserRecord.from_json_obj(obj, context)
            if rec.user_id in seen_ids:
                raise ValidationError(f"{context}: duplicate user_id {rec.user_id!r}")
            seen_ids.add(rec.user_id)
            if rec.post_embedding.shape != (manifest.d_post,):
                raise ValidationError(
                    f"{context}: post_embedding length {rec.post_embedding.shape[0]} "
                    f"≠ d_post {manifest.d_post}"
                )
            for tid in rec.topic_ids:
                if tid not in vocab.topics:
                    raise ValidationError(f"{context}: unknown topic id {tid!r}")
            for eid in rec.entity_ids:
                if eid not in vocab.entities:
                    raise ValidationError(f"{context}: unknown entity id {eid!r}")
            records.append(rec)

    counts = {0: 0, 1: 0}
    for rec in records:
        counts[rec.label] += 1
    declared = {0: manifest.class_counts.get(0, 0), 1: manifest.class_counts.get(1, 0)}
    if counts != declared:
        raise ValidationError(
            f"class counts {counts} do not match manifest {declared}"
        )
    return UserRecordCollection(records=records, vocab=vocab, manifest=manifest)


def load_dataset_dir(data_dir) -> UserRecordCollection:
    return load_dataset(
        os.path.join(data_dir, RECORDS_FILE),
        os.path.join(data_dir, VOCAB_FILE),
        os.path.join(data_dir, MANIFEST_FILE),
    )


def save_dataset(collection: UserRecordCollection, out_dir) -> tuple[str, str, str]:
    """Write the three interchange files; returns their paths."""
    os.makedirs(out_dir, exist_ok=True)
    records_path = os.path.join(out_dir, RECORDS_FILE)
    vocab_path = os.path.join(out_dir, VOCAB_FILE)
    manifest_path = os.path.join(out_dir, MANIFEST_FILE)
    with open(records_path, "w") as fh:
        for rec in collection.records:
            fh.write(json.dumps(rec.to_json_obj()) + "\n")
    with open(vocab_path, "w") as fh:
        json.dump(collection.vocab.to_json_obj(), fh, indent=1)
        fh.write("\n")
    with open(manifest_path, "w") as fh:
        json.dump(collection.manifest.to_json_obj(), fh, indent=1)
        fh.write("\n")
    return records_path, vocab_path, manifest_path


def kfold_split(
    records: list[UserRecord], n_folds: int, seed: int
) -> list[tuple[list[str], list[str]]]:
    """Stratified k-fold split over user ids; returns (train_ids, test_ids) per fold."""
    if n_folds < 2:
        raise ValidationError(f"n_folds must be ≥ 2, got {n_folds}")
    by_class: dict[int, list[str]] = {0: [], 1: []}
    for rec in records:
        by_class[rec.label].append(rec.user_id)
    for label, ids in by_class.items():
        if ids and n_folds > len(ids):
            raise ValidationError(
                f"n_folds {n_folds} exceeds class-{label} count {len(ids)}"
            )
    rng = np.random.default_rng(seed)
    fold_members: list[list[str]] = [[] for _ in range(n_folds)]
    for label in (0, 1):
        ids = list(by_class[label])
        rng.shuffle(ids)
        for i, uid in enumerate(ids):
            fold_members[i % n_folds].append(uid)
    all_ids = [rec.user_id for rec in records]
    order = {uid: i for i, uid in enumerate(all_ids)}
    folds = []
    for f in range(n_folds):
        test = sorted(fold_members[f], key=order.get)
        test_set = set(test)
        train = [uid for uid in all_ids if uid not in test_set]
        folds.append((train, test))
    return folds


def stratified_holdout(
    user_ids: list[str], labels: dict[str, int], fraction: float, seed: int
) -> tuple[list[str], list[str]]:
    """Split ids into (kept, held-out) keeping at least one of each class held out."""
    rng = np.random.default_rng(seed)
    held: list[str] = []
    for label in (0, 1):
        ids = [u for u in user_ids if labels[u] == label]
        if not ids:
            continue
        rng.shuffle(ids)
        n_hold = max(1, int(round(fraction * len(ids))))
        n_hold = min(n_hold, len(ids) - 1) if len(ids) > 1 else 0
        held.extend(ids[:n_hold])
    held_set = set(held)
    kept = [u for u in user_ids if u not in held_set]
    held = [u for u in user_ids if u in held_set]
    return kept, held
