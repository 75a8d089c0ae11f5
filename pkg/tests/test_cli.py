import json

import pytest

from hsnet.cli import main


@pytest.fixture
def data_dir(tmp_path):
    out = tmp_path / "data"
    code = main(["generate", "--users", "12", "--signal", "1.0", "--seed", "3",
                 "--out", str(out), "--d-post", "8", "--topics", "4",
                 "--entities", "5"])
    assert code == 0
    return out


def write_config(tmp_path, **overrides):
    config = dict(hidden_dim=8, n_layers=1, n_heads=2, dropout=0.0, epochs=3,
                  patience=5, val_fraction=0.2, seed=1, n_folds=2)
    config.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    return path


class TestGenerate:
    def test_writes_three_files(self, data_dir):
        for name in ("records.jsonl", "vocab.json", "manifest.json"):
            assert (data_dir / name).exists()

    def test_too_few_users_exits_2(self, tmp_path, capsys):
        code = main(["generate", "--users", "4", "--signal", "0.5", "--seed", "1",
                     "--out", str(tmp_path / "x")])
        assert code == 2
        assert "n_folds" in capsys.readouterr().err


class TestValidate:
    def test_ok(self, data_dir, capsys):
        assert main(["validate", "--data", str(data_dir)]) == 0
        assert "ok: 12 records" in capsys.readouterr().out

    def test_broken_record_exits_2(self, data_dir, capsys):
        records = data_dir / "records.jsonl"
        lines = records.read_text().splitlines()
        obj = json.loads(lines[0])
        obj["sds_answers"] = obj["sds_answers"][:5]
        lines[0] = json.dumps(obj)
        records.write_text("\n".join(lines) + "\n")
        assert main(["validate", "--data", str(data_dir)]) == 2
        assert "sds_answers" in capsys.readouterr().err

    def test_missing_dir_exits_2(self, tmp_path):
        assert main(["validate", "--data", str(tmp_path / "nope")]) == 2


class TestTrainEvalEmbed:
    def test_full_workflow(self, data_dir, tmp_path, capsys):
        config = write_config(tmp_path)
        ckpt = tmp_path / "model.npz"
        assert main(["train", "--data", str(data_dir), "--config", str(config),
                     "--out", str(ckpt)]) == 0
        assert ckpt.exists()
        assert (tmp_path / "model.npz.train.jsonl").exists()
        assert (tmp_path / "model.npz.loss.png").exists()
        out = capsys.readouterr().out
        assert "f1" in out

        report_dir = tmp_path / "report"
        assert main(["eval", "--ckpt", str(ckpt), "--data", str(data_dir),
                     "--folds", "2", "--report", str(report_dir)]) == 0
        assert (report_dir / "metrics.csv").exists()
        assert (report_dir / "metrics.json").exists()
        assert (report_dir / "fold_metrics.png").exists()
        disc_lines = (report_dir / "discriminator.jsonl").read_text().splitlines()
        assert len(disc_lines) == 12 * 2  # one row per user per fold

        tsv = tmp_path / "emb.tsv"
        assert main(["embed", "--ckpt", str(ckpt), "--data", str(data_dir),
                     "--out", str(tsv)]) == 0
        assert tsv.exists()
        assert (tmp_path / "emb.png").exists()

    def test_unknown_config_key_exits_2(self, data_dir, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"hidden_dim": 8, "mystery": 1}))
        code = main(["train", "--data", str(data_dir), "--config", str(config),
                     "--out", str(tmp_path / "m.npz")])
        assert code == 2
        assert "mystery" in capsys.readouterr().err

    def test_eval_fold_mismatch_exits_2(self, data_dir, tmp_path):
        config = write_config(tmp_path)
        ckpt = tmp_path / "model.npz"
        main(["train", "--data", str(data_dir), "--config", str(config),
              "--out", str(ckpt)])
        assert main(["eval", "--ckpt", str(ckpt), "--data", str(data_dir),
                     "--folds", "4"]) == 2

    def test_numerical_failure_exits_3(self, data_dir, tmp_path):
        config = write_config(tmp_path, learning_rate=1e18, epochs=30)
        code = main(["train", "--data", str(data_dir), "--config", str(config),
                     "--out", str(tmp_path / "m.npz")])
        assert code == 3


class TestAblateCli:
    def test_writes_csv_and_figure(self, data_dir, tmp_path):
        config = write_config(tmp_path, epochs=2)
        out = tmp_path / "ablation.csv"
        assert main(["ablate", "--data", str(data_dir), "--config", str(config),
                     "--flags", "disable_contrastive", "--out", str(out)]) == 0
        rows = out.read_text().splitlines()
        assert rows[0] == "cell,precision,recall,f1,accuracy"
        assert len(rows) == 3
        assert (tmp_path / "ablation.png").exists()

    def test_bad_flag_exits_2(self, data_dir, tmp_path):
        config = write_config(tmp_path)
        assert main(["ablate", "--data", str(data_dir), "--config", str(config),
                     "--flags", "disable_gravity",
                     "--out", str(tmp_path / "a.csv")]) == 2


class TestSdsMapCli:
    def test_audit_log_shape(self, data_dir, tmp_path):
        out = tmp_path / "audit.jsonl"
        assert main(["sds-map", "--data", str(data_dir), "--backend", "mock",
                     "--out", str(out)]) == 0
        lines = [json.loads(line) for line in out.read_text().splitlines()]
        # 20 item entries + 1 summary per user
        assert len(lines) == 12 * 21
        item_lines = [l for l in lines if "prompt" in l]
        assert all(l["degree"] in (1, 2, 3, 4) for l in item_lines)
        summaries = [l for l in lines if "symptom_distribution" in l]
        assert len(summaries) == 12
        for s in summaries:
            assert abs(sum(s["symptom_distribution"]) - 1.0) < 1e-9

    def test_deterministic(self, data_dir, tmp_path):
        a = tmp_path / "a.jsonl"
        b = tmp_path / "b.jsonl"
        main(["sds-map", "--data", str(data_dir), "--seed", "4", "--out", str(a)])
        main(["sds-map", "--data", str(data_dir), "--seed", "4", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestGradcheckCli(object):
    def test_reports_and_exit_code(self, monkeypatch, capsys):
        import hsnet.trainer as trainer

        monkeypatch.setattr(trainer, "gradient_check",
                            lambda epsilon: {"encoder.node_attn": 3e-6})
        assert main(["gradcheck", "--epsilon", "1e-4"]) == 0
        out = capsys.readouterr().out
        assert "encoder.node_attn" in out
        monkeypatch.setattr(trainer, "gradient_check",
                            lambda epsilon: {"encoder.node_attn": 5e-2})
        assert main(["gradcheck"]) == 3
