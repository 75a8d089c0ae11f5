"""Synthetic dataset generator with a tunable planted class signal.

The signal strength ``s`` in [0, 1] controls every class-dependent feature:

* post embeddings: class means at ±(s * signal_scale / 2) along one random
  direction, plus isotropic Gaussian noise;
* scale answers: with probability ``s`` an item is drawn from the class
  profile (depressed users answer forward items with high degrees and
  reversed items with low degrees; healthy users mirrored), otherwise from
  a uniform profile;
* topics: two class-leaning pools whose overlap shrinks linearly with ``s``;
* posting times: the positive class shifts toward night hours with ``s``;
* sentiment word ratio: negative-heavy for the positive class with ``s``.

Everything is drawn from a single ``numpy`` PCG64 stream, so output files
are byte-identical for a given (config, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import (
    BehaviorFeatures,
    DatasetManifest,
    UserRecord,
    UserRecordCollection,
    Vocabulary,
    save_dataset,
)
from .errors import ValidationError
from .sds import default_scale

DEPRESSED_FORWARD = np.array([0.05, 0.15, 0.35, 0.45])
DEPRESSED_REVERSED = DEPRESSED_FORWARD[::-1].copy()
HEALTHY_FORWARD = DEPRESSED_REVERSED
HEALTHY_REVERSED = DEPRESSED_FORWARD
UNIFORM_PROFILE = np.full(4, 0.25)

NIGHT_HOURS = np.array([0, 1, 2, 3, 4, 5, 22, 23])


@dataclass
class SynthConfig:
    n_users: int = 200
    balance: float = 0.5
    n_topics: int = 15
    n_entities: int = 30
    d_post: int = 768
    signal: float = 1.0
    noise: float = 1.0
    signal_scale: float = 6.0
    entity_threshold: float = 0.5
    topics_per_user: tuple[int, int] = (1, 3)
    entities_per_user: tuple[int, int] = (0, 3)
    n_folds: int = 5

    def validate(self) -> None:
        if self.n_users < 2 * self.n_folds:
            raise ValidationError(
                f"n_users {self.n_users} < 2 × n_folds {self.n_folds}; refuse to generate"
            )
        if not 0.0 <= self.signal <= 1.0:
            raise ValidationError(f"signal {self.signal} outside [0, 1]")
        if not 0.0 < self.balance < 1.0:
            raise ValidationError(f"balance {self.balance} outside (0, 1)")
        if self.n_topics < 2:
            raise ValidationError("need at least 2 topics for class-biased pools")


def _hour_profiles() -> tuple[np.ndarray, np.ndarray]:
    day = np.ones(24)
    day[8:23] = 4.0
    night = np.ones(24)
    night[NIGHT_HOURS] = 5.0
    return day / day.sum(), night / night.sum()


def generate_collection(config: SynthConfig, seed: int) -> UserRecordCollection:
    """Generate an in-memory dataset; pure function of (config, seed)."""
    config.validate()
    rng = np.random.default_rng(seed)
    d = config.d_post
    s = config.signal

    direction = rng.standard_normal(d)
    direction /= np.linalg.norm(direction)

    topic_ids = [f"t{i:03d}" for i in range(config.n_topics)]
    topics = {tid: rng.standard_normal(d) for tid in topic_ids}

    entity_ids = [f"e{i:03d}" for i in range(config.n_entities)]
    n_clusters = max(1, config.n_entities // 4)
    centers = rng.standard_normal((n_clusters, d))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    entities = {}
    for i, eid in enumerate(entity_ids):
        vec = centers[i % n_clusters] + 0.1 * rng.standard_normal(d)
        entities[eid] = vec / np.linalg.norm(vec)

    n_pos = int(round(config.n_users * config.balance))
    labels = np.array([1] * n_pos + [0] * (config.n_users - n_pos))
    labels = rng.permutation(labels)

    pool_a = topic_ids[: config.n_topics // 2]
    pool_b = topic_ids[config.n_topics // 2:]
    day_profile, night_profile = _hour_profiles()
    pos_hours = (1 - s) * day_profile + s * night_profile

    records = []
    for i in range(config.n_users):
        uid = f"u{i:05d}"
        label = int(labels[i])

        mean = (1.0 if label == 1 else -1.0) * 0.5 * s * config.signal_scale * direction
        post = mean + config.noise * rng.standard_normal(d)

        answers = []
        for item in default_scale().items:
            if rng.random() < s:
                if label == 1:
                    profile = DEPRESSED_REVERSED if item.reversed else DEPRESSED_FORWARD
                else:
                    profile = HEALTHY_REVERSED if item.reversed else HEALTHY_FORWARD
            else:
                profile = UNIFORM_PROFILE
            answers.append(int(rng.choice(4, p=profile)) + 1)

        n_topics_user = int(rng.integers(config.topics_per_user[0],
                                         config.topics_per_user[1] + 1))
        own_pool, other_pool = (pool_a, pool_b) if label == 1 else (pool_b, pool_a)
        picked: set[str] = set()
        for _ in range(n_topics_user):
            pool = own_pool if rng.random() < (1 + s) / 2 else other_pool
            picked.add(pool[int(rng.integers(len(pool)))])

        n_ents = int(rng.integers(config.entities_per_user[0],
                                  config.entities_per_user[1] + 1))
        ents = set()
        for _ in range(n_ents):
            ents.add(entity_ids[int(rng.integers(len(entity_ids)))])

        total_tweets = 10 + int(rng.poisson(60))
        hour_profile = pos_hours if label == 1 else day_profile
        time_dist = rng.multinomial(total_tweets, hour_profile).astype(np.float64)

        if label == 1:
            senti_alpha = [max(0.3, 1.5 - s), 1.5 + 2.0 * s, 1.5]
            emo_alpha = [max(0.5, 1.5 - 0.5 * s), 1.5 + 0.5 * s, 1.5]
        else:
            senti_alpha = [1.5 + 2.0 * s, max(0.3, 1.5 - s), 1.5]
            emo_alpha = [1.5 + 0.5 * s, max(0.5, 1.5 - 0.5 * s), 1.5]

        behavior = BehaviorFeatures(
            time_distribution=time_dist,
            emoticon_ratio=rng.dirichlet(emo_alpha),
            sentiment_word_ratio=rng.dirichlet(senti_alpha),
            original_retweet_counts=np.array(
                [float(rng.poisson(40)), float(rng.poisson(20))]
            ),
            follow_counts=np.array(
                [float(rng.poisson(150)), float(rng.poisson(150))]
            ),
            first_person_ratio=np.array(
                [rng.uniform(0.02, 0.10), rng.uniform(0.0, 0.03)]
            ),
        )

        records.append(
            UserRecord(
                user_id=uid,
                label=label,
                post_embedding=post,
                sds_answers=answers,
                topic_ids=tuple(sorted(picked)),
                entity_ids=tuple(sorted(ents)),
                behavior=behavior,
            )
        )

    manifest = DatasetManifest(
        d_post=d,
        n_topics=config.n_topics,
        n_entities=config.n_entities,
        entity_threshold=config.entity_threshold,
        class_counts={0: int(np.sum(labels == 0)), 1: int(np.sum(labels == 1))},
        seed=seed,
    )
    return UserRecordCollection(
        records=records,
        vocab=Vocabulary(topics=topics, entities=entities),
        manifest=manifest,
    )


def generate_synthetic(config: SynthConfig, seed: int, out_dir) -> tuple[str, str, str]:
    """Generate and write a dataset; returns (records, vocab, manifest) paths."""
    collection = generate_collection(config, seed)
    return save_dataset(collection, out_dir)
