"""Heterogeneous subgraph network for depression detection on social-media
feature graphs: interchange format, graph construction, dual-attention
propagation, subgraph contrastive learning, and a k-fold trainer."""

__version__ = "0.1.0"

from .data import (
    BehaviorFeatures,
    BehaviorStats,
    DatasetManifest,
    UserRecord,
    UserRecordCollection,
    Vocabulary,
    kfold_split,
    load_dataset,
    load_dataset_dir,
    normalize_behavior,
    save_dataset,
)
from .errors import NumericalError, ValidationError
from .graph import HeteroGraph, build_hetero_graph
from .metrics import MetricsReport, fold_metrics
from .sds import (
    AnswerBackend,
    DegreeAnswer,
    DeterministicMock,
    FixedAnswerBackend,
    SdsScale,
    SymptomVector,
    aggregate_scores,
    default_scale,
    map_user,
    render_prompt,
)
from .synth import SynthConfig, generate_collection, generate_synthetic
from .trainer import (
    TrainConfig,
    ablate,
    classification_loss,
    dump_embeddings,
    evaluate_checkpoint_file,
    gradient_check,
    run_experiment,
    total_loss,
    train_to_files,
)

__all__ = [name for name in dir() if not name.startswith("_")]
