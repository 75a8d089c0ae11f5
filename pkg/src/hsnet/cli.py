"""Command-line interface.

Subcommands: generate, train, eval, gradcheck, ablate, embed, sds-map,
validate. Exit codes: 0 success, 2 validation error, 3 numerical failure.
Delimited outputs get a figure rendered next to them.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import NumericalError, ValidationError


def _add_data_arg(parser):
    parser.add_argument("--data", required=True,
                        help="dataset directory (records.jsonl, vocab.json, manifest.json)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hsnet",
        description="Heterogeneous subgraph network for depression detection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic dataset")
    p.add_argument("--users", type=int, required=True)
    p.add_argument("--signal", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--balance", type=float, default=0.5)
    p.add_argument("--topics", type=int, default=15)
    p.add_argument("--entities", type=int, default=30)
    p.add_argument("--d-post", type=int, default=768)
    p.add_argument("--noise", type=float, default=1.0)

    p = sub.add_parser("train", help="k-fold training run")
    _add_data_arg(p)
    p.add_argument("--config", help="TrainConfig JSON file (defaults used if omitted)")
    p.add_argument("--out", required=True, help="checkpoint path (.npz)")

    p = sub.add_parser("eval", help="evaluate a checkpoint on its fold split")
    p.add_argument("--ckpt", required=True)
    _add_data_arg(p)
    p.add_argument("--folds", type=int, default=None)
    p.add_argument("--report", help="directory for metrics.csv/json and figures")

    p = sub.add_parser("gradcheck", help="finite-difference gradient check")
    p.add_argument("--epsilon", type=float, default=1e-4)

    p = sub.add_parser("ablate", help="train/eval per ablation cell")
    _add_data_arg(p)
    p.add_argument("--config")
    p.add_argument("--flags", default="",
                   help="comma-separated cells, '+' combines flags in one cell")
    p.add_argument("--out", required=True, help="comparison CSV path")

    p = sub.add_parser("embed", help="dump out-of-fold subgraph embeddings")
    p.add_argument("--ckpt", required=True)
    _add_data_arg(p)
    p.add_argument("--out", required=True, help="TSV path")

    p = sub.add_parser("sds-map", help="map users through a scale answer backend")
    _add_data_arg(p)
    p.add_argument("--backend", default="mock", choices=["mock"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="audit JSONL path")

    p = sub.add_parser("validate", help="validate the three dataset files")
    _add_data_arg(p)
    return parser


def _load_collection(data_dir):
    from .data import load_dataset_dir

    return load_dataset_dir(data_dir)


def _load_config(path):
    from .trainer import TrainConfig

    if path is None:
        return TrainConfig()
    return TrainConfig.from_json_file(path)


def cmd_generate(args) -> int:
    from .synth import SynthConfig, generate_synthetic

    config = SynthConfig(
        n_users=args.users, balance=args.balance, n_topics=args.topics,
        n_entities=args.entities, d_post=args.d_post, signal=args.signal,
        noise=args.noise,
    )
    paths = generate_synthetic(config, args.seed, args.out)
    for path in paths:
        print(path)
    return 0


def cmd_train(args) -> int:
    from . import report as figs
    from .trainer import train_to_files

    collection = _load_collection(args.data)
    config = _load_config(args.config)
    log_path = args.out + ".train.jsonl"
    result = train_to_files(collection, config, args.out, log_path)
    figs.training_curves(result.log_rows, args.out + ".loss.png")
    print(json.dumps(result.report.to_json_obj()["mean"], sort_keys=True))
    return 0


def cmd_eval(args) -> int:
    from . import report as figs
    from .trainer import discriminator_scores, evaluate_checkpoint_file

    collection = _load_collection(args.data)
    report = evaluate_checkpoint_file(args.ckpt, collection, args.folds)
    print(json.dumps(report.to_json_obj(), sort_keys=True))
    if args.report:
        os.makedirs(args.report, exist_ok=True)
        figs.write_csv(os.path.join(args.report, "metrics.csv"), report.csv_rows())
        with open(os.path.join(args.report, "metrics.json"), "w") as fh:
            json.dump(report.to_json_obj(), fh, sort_keys=True, indent=1)
            fh.write("\n")
        with open(os.path.join(args.report, "discriminator.jsonl"), "w") as fh:
            for row in discriminator_scores(args.ckpt, collection):
                fh.write(json.dumps(row) + "\n")
        figs.fold_metric_bars(report, os.path.join(args.report, "fold_metrics.png"))
    return 0


def cmd_gradcheck(args) -> int:
    from .trainer import gradient_check

    report = gradient_check(epsilon=args.epsilon)
    worst = max(report.values())
    for name in sorted(report):
        print(f"{name}\t{report[name]:.3e}")
    print(f"max\t{worst:.3e}")
    if worst >= 1e-4:
        print("gradient check FAILED (max relative error ≥ 1e-4)", file=sys.stderr)
        return 3
    return 0


def cmd_ablate(args) -> int:
    from . import report as figs
    from .trainer import ablate, ablation_csv_rows, parse_ablation_cells

    collection = _load_collection(args.data)
    config = _load_config(args.config)
    cells = parse_ablation_cells(args.flags)
    results = ablate(collection, config, cells)
    rows = ablation_csv_rows(results)
    figs.write_csv(args.out, rows)
    figs.ablation_bars(rows, os.path.splitext(args.out)[0] + ".png")
    for row in rows:
        print(",".join(str(c) for c in row))
    return 0


def cmd_embed(args) -> int:
    from . import report as figs
    from .trainer import dump_embeddings

    collection = _load_collection(args.data)
    rows = dump_embeddings(args.ckpt, collection, args.out)
    figs.embedding_scatter(rows, os.path.splitext(args.out)[0] + ".png")
    print(f"wrote {len(rows)} embeddings to {args.out}")
    return 0


def cmd_sds_map(args) -> int:
    from .sds import DeterministicMock, default_scale, map_user

    collection = _load_collection(args.data)
    backend = DeterministicMock(seed=args.seed)
    scale = default_scale()
    with open(args.out, "w") as fh:
        for rec in collection.records:
            _, vector, audit = map_user(rec.post_embedding, scale, backend)
            for entry in audit:
                obj = {"user_id": rec.user_id}
                obj.update(entry.to_json_obj())
                fh.write(json.dumps(obj) + "\n")
            summary = {
                "user_id": rec.user_id,
                "symptom_distribution": [float(x) for x in vector.normalized],
            }
            fh.write(json.dumps(summary) + "\n")
    print(f"wrote audit log for {len(collection.records)} users to {args.out}")
    return 0


def cmd_validate(args) -> int:
    collection = _load_collection(args.data)
    counts = collection.manifest.class_counts
    print(f"ok: {len(collection.records)} records, class counts {counts}")
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "train": cmd_train,
    "eval": cmd_eval,
    "gradcheck": cmd_gradcheck,
    "ablate": cmd_ablate,
    "embed": cmd_embed,
    "sds-map": cmd_sds_map,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
