"""Training, evaluation, gradient checking, ablations, and embedding dumps.

Training runs stratified k-fold cross-validation: each fold fits behavior
normalization stats on its training users, builds the global graph, and
optimizes the composed model with SGD + momentum. A stratified holdout
inside the training fold drives early stopping on validation F1. The
checkpoint stores every fold's named tensors, the behavior stats, the
config, and the fold assignment, so evaluation is self-contained.
"""

from __future__ import annotations

import copy
from dataclasses import asdict, dataclass, fields

import json

import numpy as np
import torch

from .checkpoint import load_checkpoint, save_checkpoint
from .data import (
    BehaviorStats,
    UserRecordCollection,
    kfold_split,
    stratified_holdout,
)
from .errors import NumericalError, ValidationError
from .graph import build_hetero_graph
from .metrics import MetricsReport, fold_metrics
from .model import DepressionNet, ModelFlags
from .subcon import contrastive_loss_from_scores
from .torchgraph import DTYPE, GraphTensors, from_hetero_graph

ABLATION_FLAGS = (
    "disable_dual_attention",
    "disable_contrastive",
    "disable_subgraph_attention",
    "disable_prompt_features",
    "disable_semantic_features",
    "disable_behavior_features",
)


@dataclass
class TrainConfig:
    learning_rate: float = 0.01
    momentum: float = 0.8
    batch_size: int = 64
    epochs: int = 1000
    dropout: float = 0.8
    hidden_dim: int = 512
    n_layers: int = 2
    n_heads: int = 6
    negative_sampling_rate: float = 1.0
    entity_threshold: float = 0.5
    alpha_cl: float = 1.0
    beta_sub: float = 1.0
    l2_coefficient: float = 1e-4
    l2_squared: bool = False
    patience: int = 50
    val_fraction: float = 0.1
    seed: int = 0
    n_folds: int = 5
    disable_dual_attention: bool = False
    disable_contrastive: bool = False
    disable_subgraph_attention: bool = False
    disable_prompt_features: bool = False
    disable_semantic_features: bool = False
    disable_behavior_features: bool = False

    def validate(self) -> None:
        for name in ("learning_rate", "momentum", "dropout", "negative_sampling_rate",
                     "alpha_cl", "beta_sub", "l2_coefficient", "val_fraction"):
            if getattr(self, name) < 0:
                raise ValidationError(f"config.{name} must be ≥ 0")
        if self.n_folds < 2:
            raise ValidationError("config.n_folds must be ≥ 2")
        if not 0.0 <= self.dropout < 1.0:
            raise ValidationError("config.dropout must be in [0, 1)")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(obj) - known)
        if unknown:
            raise ValidationError(f"unknown config keys: {unknown}")
        config = cls(**obj)
        config.validate()
        return config

    @classmethod
    def from_json_file(cls, path) -> "TrainConfig":
        with open(path) as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: malformed config JSON: {exc}") from exc
        return cls.from_dict(obj)


def feature_widths(collection: UserRecordCollection) -> dict[str, int]:
    d = collection.manifest.d_post
    return {"post": d, "topic": d, "entity": d, "symptom": 4, "behavior": 36}


def classification_loss(sg: torch.Tensor, hp: torch.Tensor, labels: torch.Tensor,
                        heads) -> torch.Tensor:
    """Mean over users of the two heads' cross-entropies against the label."""
    if not bool(((labels == 0) | (labels == 1)).all()):
        raise ValidationError("labels must be binary")
    ce = torch.nn.functional.cross_entropy
    return ce(heads.subgraph_logits(sg), labels) + ce(heads.post_logits(hp), labels)


def parameter_norm(parameters, squared: bool = False) -> torch.Tensor:
    total = None
    for p in parameters:
        term = (p ** 2).sum()
        total = term if total is None else total + term
    if total is None:
        return torch.tensor(0.0, dtype=DTYPE)
    return total if squared else torch.sqrt(total)


def total_loss(loss_cl, loss_sub, parameters, config: TrainConfig) -> torch.Tensor:
    """alpha * contrastive + beta * classification + eta * ||params||."""
    alpha = 0.0 if config.disable_contrastive else config.alpha_cl
    total = config.beta_sub * loss_sub
    if loss_cl is not None and alpha > 0.0:
        total = total + alpha * loss_cl
    if config.l2_coefficient > 0.0:
        total = total + config.l2_coefficient * parameter_norm(
            parameters, squared=config.l2_squared
        )
    return total


@dataclass
class FoldResult:
    tensors: dict[str, np.ndarray]
    stats: dict[str, np.ndarray]
    best_epoch: int
    test_ids: list[str]


@dataclass
class TrainResult:
    meta: dict
    fold_tensors: list[dict[str, np.ndarray]]
    fold_stats: list[dict[str, np.ndarray]]
    log_rows: list[dict]
    report: MetricsReport


def _build_graph_tensors(collection, config: TrainConfig,
                         stats: BehaviorStats | None) -> GraphTensors:
    graph = build_hetero_graph(
        collection,
        threshold=config.entity_threshold,
        behavior_stats=stats,
        include_symptom=not config.disable_prompt_features,
        include_behavior=not config.disable_behavior_features,
        include_semantic=not config.disable_semantic_features,
    )
    return from_hetero_graph(graph)


def _user_indices(gt: GraphTensors, user_ids) -> torch.Tensor:
    pos = {uid: i for i, uid in enumerate(gt.user_ids)}
    return torch.tensor([pos[u] for u in user_ids], dtype=torch.int64)


def _snapshot(model) -> dict[str, torch.Tensor]:
    return {k: v.detach().clone() for k, v in model.state_dict().items()}


def _contrastive_term(model, gt, enc, config: TrainConfig,
                      generator: torch.Generator, *, training: bool,
                      dropout_generator: torch.Generator | None):
    if config.disable_contrastive or config.negative_sampling_rate <= 0.0:
        return None
    flags = ModelFlags.from_config(config)
    negatives = model.negative_subgraphs(
        gt, config.negative_sampling_rate, generator, flags=flags,
        training=training, dropout=config.dropout if training else 0.0,
        dropout_generator=dropout_generator,
    )
    readout = model.subgraph.readout(enc.subgraph)
    d_pos = model.subgraph.discriminate(enc.subgraph, readout)
    d_neg = model.subgraph.discriminate(negatives, readout)
    return contrastive_loss_from_scores(d_pos, d_neg)


def run_fold(collection: UserRecordCollection, config: TrainConfig, fold_index: int,
             train_ids: list[str], test_ids: list[str],
             log_rows: list[dict]) -> FoldResult:
    labels_by_id = {r.user_id: r.label for r in collection.records}
    fit_ids, val_ids = stratified_holdout(
        train_ids, labels_by_id, config.val_fraction,
        seed=config.seed + 7919 * (fold_index + 1),
    )
    stats = BehaviorStats.fit(
        [r.behavior for r in collection.records if r.user_id in set(train_ids)]
    )
    gt = _build_graph_tensors(collection, config, stats)
    flags = ModelFlags.from_config(config)

    model = DepressionNet(
        feature_widths(collection), config.hidden_dim, config.n_layers,
        config.n_heads, seed=config.seed + 1000003 * (fold_index + 1),
    )
    train_gen = torch.Generator().manual_seed(config.seed + 104729 * (fold_index + 1))
    optimizer = torch.optim.SGD(model.parameters(), lr=config.learning_rate,
                                momentum=config.momentum)

    fit_idx = _user_indices(gt, fit_ids)
    val_idx = _user_indices(gt, val_ids)
    y = gt.labels
    effective_alpha = 0.0 if config.disable_contrastive else config.alpha_cl

    best_f1 = -1.0
    best_epoch = -1        # last epoch whose val F1 ties the best (snapshot taken)
    stop_anchor = -1       # first epoch reaching the best val F1 (drives patience)
    best_state = _snapshot(model)

    for epoch in range(config.epochs):
        try:
            enc = model.encode(gt, flags=flags, training=True, dropout=config.dropout,
                               dropout_generator=train_gen)
            loss_sub = classification_loss(
                enc.subgraph[fit_idx], enc.post[fit_idx], y[fit_idx], model.heads
            )
            loss_cl = _contrastive_term(model, gt, enc, config, train_gen,
                                        training=True, dropout_generator=train_gen)
            loss = total_loss(loss_cl, loss_sub, model.parameters(), config)
            if not torch.isfinite(loss):
                raise NumericalError("non-finite loss")
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            with torch.no_grad():
                eval_enc = model.encode(gt, flags=flags, training=False)
                val_pred = model.heads.subgraph_logits(
                    eval_enc.subgraph[val_idx]
                ).argmax(dim=1)
        except NumericalError as exc:
            model.load_state_dict(best_state)
            err = NumericalError(f"{exc} (fold {fold_index}, epoch {epoch})")
            err.fold_result = FoldResult(
                tensors={k: v.numpy().copy() for k, v in best_state.items()},
                stats=stats.to_arrays(), best_epoch=best_epoch, test_ids=list(test_ids),
            )
            raise err from exc
        val_f1 = fold_metrics(y[val_idx].numpy(), val_pred.numpy()).f1
        if val_f1 > best_f1:
            best_f1 = val_f1
            stop_anchor = epoch
            best_epoch = epoch
            best_state = _snapshot(model)
        elif val_f1 == best_f1:
            # same validation score, longer-trained model: keep the newer one
            best_epoch = epoch
            best_state = _snapshot(model)
        log_rows.append({
            "fold": fold_index,
            "epoch": epoch,
            "loss_total": float(loss.item()),
            "loss_cl": None if loss_cl is None else float(loss_cl.item()),
            "loss_sub": float(loss_sub.item()),
            "alpha_cl": effective_alpha,
            "val_f1": val_f1,
            "best_epoch": best_epoch,
        })
        if epoch - stop_anchor >= config.patience:
            break

    model.load_state_dict(best_state)
    return FoldResult(
        tensors={k: v.detach().numpy().copy() for k, v in model.state_dict().items()},
        stats=stats.to_arrays(),
        best_epoch=best_epoch,
        test_ids=list(test_ids),
    )


def run_experiment(collection: UserRecordCollection, config: TrainConfig) -> TrainResult:
    """k-fold training; returns checkpoint contents, logs, and the CV report."""
    config.validate()
    folds = kfold_split(collection.records, config.n_folds, config.seed)
    log_rows: list[dict] = []
    fold_results: list[FoldResult] = []
    for f, (train_ids, test_ids) in enumerate(folds):
        fold_results.append(
            run_fold(collection, config, f, train_ids, test_ids, log_rows)
        )
    meta = {
        "seed": config.seed,
        "config": config.to_dict(),
        "folds": [
            {"test_ids": r.test_ids, "best_epoch": r.best_epoch} for r in fold_results
        ],
    }
    fold_tensors = [r.tensors for r in fold_results]
    fold_stats = [r.stats for r in fold_results]
    report = evaluate_experiment(meta, fold_tensors, fold_stats, collection)
    return TrainResult(meta=meta, fold_tensors=fold_tensors, fold_stats=fold_stats,
                       log_rows=log_rows, report=report)


def _model_from_tensors(collection, config: TrainConfig,
                        tensors: dict[str, np.ndarray]) -> DepressionNet:
    model = DepressionNet(feature_widths(collection), config.hidden_dim,
                          config.n_layers, config.n_heads, seed=0)
    state = {k: torch.from_numpy(np.asarray(v).copy()) for k, v in tensors.items()}
    model.load_state_dict(state)
    return model


def _check_dims(collection, config: TrainConfig, tensors: dict[str, np.ndarray]) -> None:
    proj = tensors.get("encoder.proj.post")
    if proj is None:
        raise ValidationError("checkpoint is missing encoder.proj.post")
    if proj.shape[0] != collection.manifest.d_post:
        raise ValidationError(
            f"checkpoint d_post {proj.shape[0]} ≠ manifest d_post "
            f"{collection.manifest.d_post}"
        )
    if proj.shape[1] != config.hidden_dim:
        raise ValidationError(
            f"checkpoint hidden dim {proj.shape[1]} ≠ config {config.hidden_dim}"
        )


def evaluate_experiment(meta: dict, fold_tensors, fold_stats,
                        collection: UserRecordCollection,
                        n_folds: int | None = None) -> MetricsReport:
    """Per-fold test metrics from a (possibly in-memory) checkpoint."""
    config = TrainConfig.from_dict(meta["config"])
    if n_folds is not None and n_folds != len(meta["folds"]):
        raise ValidationError(
            f"requested {n_folds} folds but checkpoint has {len(meta['folds'])}"
        )
    known = set(collection.user_ids)
    results = []
    for f, fold_meta in enumerate(meta["folds"]):
        test_ids = fold_meta["test_ids"]
        missing = [u for u in test_ids if u not in known]
        if missing:
            raise ValidationError(f"fold {f} test users missing from dataset: {missing[:3]}")
        _check_dims(collection, config, fold_tensors[f])
        stats = BehaviorStats.from_arrays(fold_stats[f])
        gt = _build_graph_tensors(collection, config, stats)
        model = _model_from_tensors(collection, config, fold_tensors[f])
        flags = ModelFlags.from_config(config)
        with torch.no_grad():
            enc = model.encode(gt, flags=flags, training=False)
            test_idx = _user_indices(gt, test_ids)
            pred = model.heads.subgraph_logits(enc.subgraph[test_idx]).argmax(dim=1)
        results.append(fold_metrics(
            gt.labels[test_idx].numpy(), pred.numpy(),
            best_epoch=fold_meta.get("best_epoch", -1),
        ))
    return MetricsReport(folds=results)


def discriminator_scores(ckpt_path, collection: UserRecordCollection) -> list[dict]:
    """Per-fold, per-user discriminator probabilities D(sg_i, G') (diagnostic)."""
    meta, fold_tensors, fold_stats = load_checkpoint(ckpt_path)
    config = TrainConfig.from_dict(meta["config"])
    rows: list[dict] = []
    for f in range(len(meta["folds"])):
        _check_dims(collection, config, fold_tensors[f])
        stats = BehaviorStats.from_arrays(fold_stats[f])
        gt = _build_graph_tensors(collection, config, stats)
        model = _model_from_tensors(collection, config, fold_tensors[f])
        flags = ModelFlags.from_config(config)
        with torch.no_grad():
            enc = model.encode(gt, flags=flags, training=False)
            readout = model.subgraph.readout(enc.subgraph)
            scores = model.subgraph.discriminate(enc.subgraph, readout)
        for i, uid in enumerate(gt.user_ids):
            rows.append({
                "fold": f,
                "user_id": uid,
                "label": int(gt.labels[i].item()),
                "score": float(scores[i].item()),
            })
    return rows


def train_to_files(collection: UserRecordCollection, config: TrainConfig,
                   ckpt_path, log_path) -> TrainResult:
    """Run the experiment and persist checkpoint + JSONL training log."""
    try:
        result = run_experiment(collection, config)
    except NumericalError as err:
        partial = getattr(err, "fold_result", None)
        if partial is not None:
            save_checkpoint(
                ckpt_path,
                {"seed": config.seed, "config": config.to_dict(),
                 "folds": [{"test_ids": partial.test_ids,
                            "best_epoch": partial.best_epoch}],
                 "partial": True},
                [partial.tensors], [partial.stats],
            )
        raise
    save_checkpoint(ckpt_path, result.meta, result.fold_tensors, result.fold_stats)
    with open(log_path, "w") as fh:
        for row in result.log_rows:
            fh.write(json.dumps(row) + "\n")
    return result


def evaluate_checkpoint_file(ckpt_path, collection: UserRecordCollection,
                             n_folds: int | None = None) -> MetricsReport:
    meta, fold_tensors, fold_stats = load_checkpoint(ckpt_path)
    return evaluate_experiment(meta, fold_tensors, fold_stats, collection, n_folds)


def dump_embeddings(ckpt_path, collection: UserRecordCollection, out_path) -> list[dict]:
    """Out-of-fold subgraph embedding per user, as TSV (user_id, label, sg...)."""
    meta, fold_tensors, fold_stats = load_checkpoint(ckpt_path)
    config = TrainConfig.from_dict(meta["config"])
    rows_by_user: dict[str, dict] = {}
    for f, fold_meta in enumerate(meta["folds"]):
        _check_dims(collection, config, fold_tensors[f])
        stats = BehaviorStats.from_arrays(fold_stats[f])
        gt = _build_graph_tensors(collection, config, stats)
        model = _model_from_tensors(collection, config, fold_tensors[f])
        flags = ModelFlags.from_config(config)
        with torch.no_grad():
            enc = model.encode(gt, flags=flags, training=False)
        test_idx = _user_indices(gt, fold_meta["test_ids"])
        for uid, i in zip(fold_meta["test_ids"], test_idx.tolist()):
            rows_by_user[uid] = {
                "user_id": uid,
                "label": int(gt.labels[i].item()),
                "embedding": enc.subgraph[i].numpy().copy(),
            }
    rows = [rows_by_user[uid] for uid in collection.user_ids if uid in rows_by_user]
    q = config.hidden_dim
    with open(out_path, "w") as fh:
        header = ["user_id", "label"] + [f"sg_{i}" for i in range(q)]
        fh.write("\t".join(header) + "\n")
        for row in rows:
            cells = [row["user_id"], str(row["label"])]
            cells += [repr(float(v)) for v in row["embedding"]]
            fh.write("\t".join(cells) + "\n")
    return rows


def parse_ablation_cells(flags_arg: str) -> list[list[str]]:
    """Parse ``f1,f2+f3`` into cells; each cell is a list of flag names."""
    cells = []
    if not flags_arg:
        return cells
    for cell in flags_arg.split(","):
        cell = cell.strip()
        if not cell:
            continue
        names = [n.strip() for n in cell.split("+")]
        for name in names:
            if name not in ABLATION_FLAGS:
                raise ValidationError(
                    f"unknown ablation flag {name!r}; choose from {list(ABLATION_FLAGS)}"
                )
        cells.append(names)
    return cells


def ablate(collection: UserRecordCollection, config: TrainConfig,
           cells: list[list[str]]) -> list[tuple[str, MetricsReport]]:
    """Full train/eval per flag combination, with the unablated model first."""
    results: list[tuple[str, MetricsReport]] = []
    full = run_experiment(collection, config)
    results.append(("full", full.report))
    for names in cells:
        variant = copy.deepcopy(config)
        for name in names:
            setattr(variant, name, True)
        res = run_experiment(collection, variant)
        results.append(("+".join(names), res.report))
    return results


def ablation_csv_rows(results: list[tuple[str, MetricsReport]]) -> list[list]:
    rows = [["cell", "precision", "recall", "f1", "accuracy"]]
    for name, report in results:
        rows.append([
            name, report.mean("precision"), report.mean("recall"),
            report.mean("f1"), report.mean("accuracy"),
        ])
    return rows


DEFAULT_GRADCHECK_EPSILON = 1e-4


def gradcheck_fixture(seed: int = 123):
    from .synth import SynthConfig, generate_collection

    synth = SynthConfig(
        n_users=6, balance=0.5, n_topics=3, n_entities=3, d_post=10,
        signal=0.8, noise=1.0, topics_per_user=(1, 2), entities_per_user=(1, 2),
        n_folds=2,
    )
    return generate_collection(synth, seed)


def gradient_check(config: TrainConfig | None = None,
                   epsilon: float = DEFAULT_GRADCHECK_EPSILON,
                   collection: UserRecordCollection | None = None,
                   corrupt_grad_of: str | None = None,
                   only: list[str] | None = None) -> dict[str, float]:
    """Central finite differences of the total loss vs autograd, per tensor.

    Runs on a small 64-bit fixture with dropout off and a corruption drawn
    once, so the loss is a deterministic function of the parameters.
    ``corrupt_grad_of`` doubles one tensor's analytic gradient before the
    comparison; the harness must flag it (self-test of the checker).
    ``only`` restricts the finite-difference sweep to the named tensors.
    """
    if config is None:
        config = TrainConfig(hidden_dim=16, n_layers=2, n_heads=2, dropout=0.0,
                             epochs=0, n_folds=2, seed=17)
    if collection is None:
        collection = gradcheck_fixture()
    stats = BehaviorStats.fit([r.behavior for r in collection.records])
    gt = _build_graph_tensors(collection, config, stats)
    flags = ModelFlags.from_config(config)
    model = DepressionNet(feature_widths(collection), config.hidden_dim,
                          config.n_layers, config.n_heads, seed=config.seed)
    gen = torch.Generator().manual_seed(config.seed + 1)
    from .subcon import corrupt_features

    shuffled, _ = corrupt_features(gt.features, gen)
    y = gt.labels

    def loss_value() -> torch.Tensor:
        enc = model.encode(gt, flags=flags, training=False)
        loss_sub = classification_loss(enc.subgraph, enc.post, y, model.heads)
        loss_cl = None
        if not config.disable_contrastive and config.negative_sampling_rate > 0:
            neg_enc = model.encode(gt, features=shuffled, flags=flags, training=False)
            readout = model.subgraph.readout(enc.subgraph)
            d_pos = model.subgraph.discriminate(enc.subgraph, readout)
            d_neg = model.subgraph.discriminate(neg_enc.subgraph, readout)
            loss_cl = contrastive_loss_from_scores(d_pos, d_neg)
        return total_loss(loss_cl, loss_sub, model.parameters(), config)

    loss = loss_value()
    model.zero_grad()
    loss.backward()
    analytic = {
        name: p.grad.detach().clone() for name, p in model.named_parameters()
    }
    if corrupt_grad_of is not None:
        if corrupt_grad_of not in analytic:
            raise ValidationError(f"no parameter named {corrupt_grad_of!r}")
        analytic[corrupt_grad_of] = analytic[corrupt_grad_of] * 2.0

    if only is not None:
        names = set(dict(model.named_parameters()))
        unknown = sorted(set(only) - names)
        if unknown:
            raise ValidationError(f"no parameters named {unknown}")

    report: dict[str, float] = {}
    with torch.no_grad():
        for name, p in model.named_parameters():
            if only is not None and name not in only:
                continue
            flat = p.view(-1)
            grad = analytic[name].view(-1)
            worst = 0.0
            for i in range(flat.numel()):
                orig = flat[i].item()
                flat[i] = orig + epsilon
                up = loss_value().item()
                flat[i] = orig - epsilon
                down = loss_value().item()
                flat[i] = orig
                numeric = (up - down) / (2.0 * epsilon)
                ga = grad[i].item()
                err = abs(ga - numeric) / max(abs(ga), abs(numeric), 1e-8)
                worst = max(worst, err)
            report[name] = worst
    return report
