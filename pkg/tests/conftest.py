import zlib

import numpy as np
import pytest

from hsnet.data import BehaviorFeatures, DatasetManifest, UserRecord, UserRecordCollection, Vocabulary
from hsnet.synth import SynthConfig, generate_collection


def make_behavior(rng=None, **overrides) -> BehaviorFeatures:
    rng = rng or np.random.default_rng(0)
    fields = {
        "time_distribution": rng.integers(0, 20, 24).astype(np.float64),
        "emoticon_ratio": np.array([0.5, 0.3, 0.2]),
        "sentiment_word_ratio": np.array([0.4, 0.4, 0.2]),
        "original_retweet_counts": np.array([30.0, 12.0]),
        "follow_counts": np.array([100.0, 80.0]),
        "first_person_ratio": np.array([0.05, 0.01]),
    }
    fields.update(overrides)
    return BehaviorFeatures(**fields)


def make_record(user_id, label, d_post=8, topic_ids=(), entity_ids=(),
                sds_answers=None, rng=None, **behavior_overrides) -> UserRecord:
    rng = rng or np.random.default_rng(zlib.crc32(user_id.encode()))
    return UserRecord(
        user_id=user_id,
        label=label,
        post_embedding=rng.standard_normal(d_post),
        sds_answers=sds_answers or [((i + label) % 4) + 1 for i in range(20)],
        topic_ids=tuple(sorted(topic_ids)),
        entity_ids=tuple(sorted(entity_ids)),
        behavior=make_behavior(rng, **behavior_overrides),
    )


def make_collection(records, d_post=8, topic_vectors=None, entity_vectors=None,
                    entity_threshold=0.5, seed=0) -> UserRecordCollection:
    rng = np.random.default_rng(seed)
    topic_ids = sorted({t for r in records for t in r.topic_ids})
    entity_ids = sorted({e for r in records for e in r.entity_ids})
    topics = topic_vectors or {t: rng.standard_normal(d_post) for t in topic_ids}
    entities = entity_vectors or {e: rng.standard_normal(d_post) for e in entity_ids}
    counts = {0: sum(1 for r in records if r.label == 0),
              1: sum(1 for r in records if r.label == 1)}
    manifest = DatasetManifest(
        d_post=d_post, n_topics=len(topics), n_entities=len(entities),
        entity_threshold=entity_threshold, class_counts=counts, seed=seed,
    )
    return UserRecordCollection(
        records=records,
        vocab=Vocabulary(topics=topics, entities=entities),
        manifest=manifest,
    )


def small_synthetic(n_users=8, d_post=8, seed=0, signal=0.8, n_topics=4,
                    n_entities=5, **kwargs) -> UserRecordCollection:
    config = SynthConfig(
        n_users=n_users, d_post=d_post, n_topics=n_topics, n_entities=n_entities,
        signal=signal, n_folds=2, **kwargs,
    )
    return generate_collection(config, seed)


@pytest.fixture
def tiny_collection():
    return small_synthetic()
