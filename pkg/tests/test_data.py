import json

import numpy as np
import pytest

from hsnet.data import (
    BehaviorStats,
    kfold_split,
    load_dataset,
    load_dataset_dir,
    normalize_behavior,
    save_dataset,
    stratified_holdout,
)
from hsnet.errors import ValidationError

from conftest import make_behavior, make_collection, make_record


def write_dataset(tmp_path, collection):
    return save_dataset(collection, tmp_path)


class TestLoadDataset:
    def test_valid_three_user_fixture(self, tmp_path):
        records = [
            make_record("ua", 1, topic_ids=("t1",)),
            make_record("ub", 1, topic_ids=("t1", "t2")),
            make_record("uc", 0, topic_ids=("t2",), entity_ids=("e1",)),
        ]
        paths = write_dataset(tmp_path, make_collection(records))
        loaded = load_dataset(*paths)
        assert len(loaded.records) == 3
        assert loaded.manifest.class_counts == {0: 1, 1: 2}

    def test_short_sds_answers_reports_length(self, tmp_path):
        records = [make_record("ua", 1, topic_ids=("t1",))]
        paths = write_dataset(tmp_path, make_collection(records))
        lines = open(paths[0]).read().splitlines()
        obj = json.loads(lines[0])
        obj["sds_answers"] = obj["sds_answers"][:19]
        open(paths[0], "w").write(json.dumps(obj) + "\n")
        with pytest.raises(ValidationError, match="sds_answers length 19 ≠ 20"):
            load_dataset(*paths)

    def test_unknown_topic_names_id(self, tmp_path):
        records = [make_record("ua", 1, topic_ids=("t1",))]
        collection = make_collection(records)
        paths = write_dataset(tmp_path, collection)
        obj = json.loads(open(paths[0]).read())
        obj["topic_ids"] = ["t_missing"]
        open(paths[0], "w").write(json.dumps(obj) + "\n")
        with pytest.raises(ValidationError, match="t_missing"):
            load_dataset(*paths)

    def test_duplicate_user_id_rejected(self, tmp_path):
        records = [make_record("ua", 1), make_record("ub", 0)]
        paths = write_dataset(tmp_path, make_collection(records))
        lines = open(paths[0]).read().splitlines()
        dup = json.loads(lines[0])
        dup_line = json.dumps(dup)
        open(paths[0], "w").write("\n".join([dup_line, dup_line, lines[1]]) + "\n")
        with pytest.raises(ValidationError, match="line 2.*duplicate"):
            load_dataset(*paths)

    def test_malformed_line_reports_line_number(self, tmp_path):
        records = [make_record("ua", 1), make_record("ub", 0)]
        paths = write_dataset(tmp_path, make_collection(records))
        lines = open(paths[0]).read().splitlines()
        open(paths[0], "w").write(lines[0] + "\n{broken\n")
        with pytest.raises(ValidationError, match="line 2"):
            load_dataset(*paths)

    def test_embedding_width_checked_against_manifest(self, tmp_path):
        records = [make_record("ua", 1)]
        collection = make_collection(records)
        collection.manifest.d_post = 9
        paths = write_dataset(tmp_path, collection)
        with pytest.raises(ValidationError, match="post_embedding length 8 ≠ d_post 9"):
            load_dataset(*paths)

    def test_sds_value_out_of_range(self, tmp_path):
        records = [make_record("ua", 1)]
        paths = write_dataset(tmp_path, make_collection(records))
        obj = json.loads(open(paths[0]).read())
        obj["sds_answers"][3] = 5
        open(paths[0], "w").write(json.dumps(obj) + "\n")
        with pytest.raises(ValidationError, match="outside \\{1..4\\}"):
            load_dataset(*paths)

    def test_class_count_mismatch_rejected(self, tmp_path):
        records = [make_record("ua", 1), make_record("ub", 0)]
        collection = make_collection(records)
        collection.manifest.class_counts = {0: 2, 1: 0}
        paths = write_dataset(tmp_path, collection)
        with pytest.raises(ValidationError, match="class counts"):
            load_dataset(*paths)

    def test_ratio_sum_above_one_rejected(self, tmp_path):
        bad = make_behavior(emoticon_ratio=np.array([0.7, 0.5, 0.2]))
        records = [make_record("ua", 1)]
        records[0].behavior = bad
        collection = make_collection(records)
        paths = write_dataset(tmp_path, collection)
        with pytest.raises(ValidationError, match="emoticon_ratio"):
            load_dataset(*paths)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValidationError, match="no such file"):
            load_dataset(tmp_path / "a", tmp_path / "b", tmp_path / "c")

    def test_roundtrip_preserves_floats(self, tmp_path):
        records = [make_record("ua", 1, topic_ids=("t1",), entity_ids=("e1",))]
        collection = make_collection(records)
        paths = write_dataset(tmp_path, collection)
        loaded = load_dataset(*paths)
        assert np.array_equal(loaded.records[0].post_embedding,
                              records[0].post_embedding)
        assert np.array_equal(loaded.vocab.topics["t1"], collection.vocab.topics["t1"])


class TestNormalizeBehavior:
    def test_constant_dimension_maps_to_zero(self):
        behaviors = [make_behavior(time_distribution=np.full(24, 5.0)) for _ in range(3)]
        stats = BehaviorStats.fit(behaviors)
        out = normalize_behavior(behaviors[0], stats)
        assert np.array_equal(out.time_distribution, np.zeros(24))

    def test_linear_scaling(self):
        lo = make_behavior(follow_counts=np.array([0.0, 0.0]))
        hi = make_behavior(follow_counts=np.array([100.0, 100.0]))
        mid = make_behavior(follow_counts=np.array([10.0, 90.0]))
        stats = BehaviorStats.fit([lo, hi])
        out = normalize_behavior(mid, stats)
        assert np.allclose(out.follow_counts, [0.1, 0.9])

    def test_ratios_pass_through(self):
        b = make_behavior(emoticon_ratio=np.array([0.5, 0.3, 0.2]))
        stats = BehaviorStats.fit([b])
        out = normalize_behavior(b, stats)
        assert np.array_equal(out.emoticon_ratio, [0.5, 0.3, 0.2])

    def test_out_of_range_values_clipped(self):
        train = [make_behavior(follow_counts=np.array([10.0, 10.0])),
                 make_behavior(follow_counts=np.array([20.0, 20.0]))]
        stats = BehaviorStats.fit(train)
        out = normalize_behavior(make_behavior(follow_counts=np.array([50.0, 0.0])), stats)
        assert np.array_equal(out.follow_counts, [1.0, 0.0])

    def test_normalized_vectors_in_unit_interval(self):
        rng = np.random.default_rng(5)
        behaviors = [make_behavior(rng=rng) for _ in range(10)]
        stats = BehaviorStats.fit(behaviors)
        for b in behaviors:
            vec = normalize_behavior(b, stats).as_vector()
            assert vec.shape == (36,)
            assert np.all(vec >= 0) and np.all(vec <= 1)


class TestKfoldSplit:
    def test_balanced_ten_users_five_folds(self):
        records = [make_record(f"u{i}", i % 2) for i in range(10)]
        folds = kfold_split(records, 5, seed=3)
        for train, test in folds:
            labels = [r.label for r in records if r.user_id in set(test)]
            assert sorted(labels) == [0, 1]

    def test_partition_property(self):
        records = [make_record(f"u{i}", i % 2) for i in range(13)]
        for n_folds in (2, 3, 4, 6):
            folds = kfold_split(records, n_folds, seed=1)
            tests = [uid for _, test in folds for uid in test]
            assert sorted(tests) == sorted(r.user_id for r in records)
            for train, test in folds:
                assert not set(train) & set(test)
                assert sorted(train + test) == sorted(r.user_id for r in records)

    def test_class_ratio_within_one_user(self):
        records = [make_record(f"u{i}", 1 if i < 9 else 0) for i in range(23)]
        folds = kfold_split(records, 5, seed=0)
        global_ratio = 9 / 23
        for _, test in folds:
            pos = sum(1 for r in records if r.user_id in set(test) and r.label == 1)
            assert abs(pos - global_ratio * len(test)) <= 1.0

    def test_same_seed_identical(self):
        records = [make_record(f"u{i}", i % 2) for i in range(12)]
        assert kfold_split(records, 3, seed=9) == kfold_split(records, 3, seed=9)

    def test_refuses_when_folds_exceed_class_count(self):
        records = [make_record(f"u{i}", 1 if i < 2 else 0) for i in range(8)]
        with pytest.raises(ValidationError, match="class-1 count"):
            kfold_split(records, 3, seed=0)

    def test_refuses_single_fold(self):
        records = [make_record(f"u{i}", i % 2) for i in range(4)]
        with pytest.raises(ValidationError):
            kfold_split(records, 1, seed=0)


class TestStratifiedHoldout:
    def test_holds_out_both_classes(self):
        ids = [f"u{i}" for i in range(20)]
        labels = {u: i % 2 for i, u in enumerate(ids)}
        kept, held = stratified_holdout(ids, labels, 0.1, seed=4)
        assert sorted(kept + held) == sorted(ids)
        held_labels = {labels[u] for u in held}
        assert held_labels == {0, 1}
