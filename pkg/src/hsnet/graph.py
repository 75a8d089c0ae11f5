"""Heterogeneous global graph: typed nodes, typed normalized adjacency, owners.

Node types and their raw feature widths:

* ``post``      one per user, the post embedding (d_post)
* ``topic``     shared across users, vocab embedding (d_post)
* ``entity``    shared across users, vocab embedding (d_post)
* ``symptom``   one per user, normalized 4-dim scale distribution
* ``behavior``  one per user, normalized 36-dim behavioral vector

Edges: post-topic and post-entity per referenced id, post-symptom and
post-behavior (degree-1 auxiliaries), entity-entity when cosine similarity
exceeds the connection threshold, and a self-loop on every node. The
adjacency splits into one block per neighbor type; each block is
row-normalized so a row sums to 1 or is entirely zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import BehaviorStats, UserRecordCollection, normalize_behavior
from .errors import ValidationError
from .sds import DegreeAnswer, SdsScale, aggregate_scores, default_scale

NODE_TYPES = ("post", "topic", "entity", "symptom", "behavior")
TYPE_CODES = {name: i for i, name in enumerate(NODE_TYPES)}
N_TYPES = len(NODE_TYPES)


@dataclass
class HeteroGraph:
    node_ids: list[str]
    node_types: np.ndarray            # int codes into NODE_TYPES, shape (N,)
    features: list[np.ndarray]        # raw feature vector per node (ragged widths)
    owners: list[frozenset[str]]
    adj: np.ndarray                   # bool (N, N), symmetric, self-loops set
    edges: list[tuple[int, int]]      # i < j, self-loops excluded
    user_ids: list[str]
    labels: np.ndarray                # int (n_users,)
    user_nodes: dict[str, dict]       # user_id -> node indices of its subgraph

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def n_users(self) -> int:
        return len(self.user_ids)

    def type_indices(self, type_name: str) -> np.ndarray:
        return np.nonzero(self.node_types == TYPE_CODES[type_name])[0]

    def normalized_block(self, type_name: str) -> np.ndarray:
        """Row-normalized adjacency restricted to columns of one type."""
        col_mask = self.node_types == TYPE_CODES[type_name]
        block = (self.adj & col_mask[None, :]).astype(np.float64)
        row_sums = block.sum(axis=1, keepdims=True)
        return np.divide(block, row_sums, out=np.zeros_like(block), where=row_sums > 0)

    def membership(self) -> np.ndarray:
        """Bool (n_users, N): which nodes belong to each user's subgraph."""
        out = np.zeros((self.n_users, self.n_nodes), dtype=bool)
        for u, uid in enumerate(self.user_ids):
            for idx in self._subgraph_indices(uid):
                out[u, idx] = True
        return out

    def _subgraph_indices(self, user_id: str) -> list[int]:
        info = self.user_nodes[user_id]
        idxs = [info["post"]]
        if info["symptom"] is not None:
            idxs.append(info["symptom"])
        if info["behavior"] is not None:
            idxs.append(info["behavior"])
        idxs.extend(info["topics"])
        idxs.extend(info["entities"])
        return idxs


def _symptom_vector(answers: list[int], scale: SdsScale) -> np.ndarray:
    degree_answers = [DegreeAnswer(item_index=i + 1, degree=a) for i, a in enumerate(answers)]
    return aggregate_scores(degree_answers, scale).normalized


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(a @ b / (na * nb))


def build_hetero_graph(
    collection: UserRecordCollection,
    threshold: float | None = None,
    *,
    behavior_stats: BehaviorStats | None = None,
    scale: SdsScale | None = None,
    include_symptom: bool = True,
    include_behavior: bool = True,
    include_semantic: bool = True,
) -> HeteroGraph:
    """Assemble the global graph from validated records.

    ``behavior_stats`` should be fit on the training split; when omitted it
    is fit on all records (standalone use). The ``include_*`` switches drop
    whole node types for feature ablations.
    """
    if threshold is None:
        threshold = collection.manifest.entity_threshold
    if not -1.0 <= threshold <= 1.0:
        raise ValidationError(f"entity threshold {threshold} outside [-1, 1]")
    if scale is None:
        scale = default_scale()
    records = collection.records
    if behavior_stats is None and include_behavior:
        behavior_stats = BehaviorStats.fit([r.behavior for r in records])

    node_ids: list[str] = []
    node_types: list[int] = []
    features: list[np.ndarray] = []
    owners: list[set[str]] = []

    def add_node(node_id: str, type_name: str, feature: np.ndarray, owner_set: set[str]) -> int:
        node_ids.append(node_id)
        node_types.append(TYPE_CODES[type_name])
        features.append(np.asarray(feature, dtype=np.float64))
        owners.append(owner_set)
        return len(node_ids) - 1

    post_idx: dict[str, int] = {}
    for rec in records:
        post_idx[rec.user_id] = add_node(
            f"post:{rec.user_id}", "post", rec.post_embedding, {rec.user_id}
        )

    symptom_idx: dict[str, int] = {}
    if include_symptom:
        for rec in records:
            symptom_idx[rec.user_id] = add_node(
                f"symptom:{rec.user_id}",
                "symptom",
                _symptom_vector(rec.sds_answers, scale),
                {rec.user_id},
            )

    behavior_idx: dict[str, int] = {}
    if include_behavior:
        for rec in records:
            normalized = normalize_behavior(rec.behavior, behavior_stats)
            behavior_idx[rec.user_id] = add_node(
                f"behavior:{rec.user_id}", "behavior", normalized.as_vector(), {rec.user_id}
            )

    topic_idx: dict[str, int] = {}
    entity_idx: dict[str, int] = {}
    if include_semantic:
        used_topics = sorted({t for rec in records for t in rec.topic_ids})
        used_entities = sorted({e for rec in records for e in rec.entity_ids})
        for tid in used_topics:
            owner_set = {rec.user_id for rec in records if tid in rec.topic_ids}
            topic_idx[tid] = add_node(f"topic:{tid}", "topic",
                                      collection.vocab.topics[tid], owner_set)
        for eid in used_entities:
            owner_set = {rec.user_id for rec in records if eid in rec.entity_ids}
            entity_idx[eid] = add_node(f"entity:{eid}", "entity",
                                       collection.vocab.entities[eid], owner_set)

    n = len(node_ids)
    adj = np.zeros((n, n), dtype=bool)
    edges: list[tuple[int, int]] = []

    def add_edge(i: int, j: int) -> None:
        if i == j or adj[i, j]:
            return
        adj[i, j] = adj[j, i] = True
        edges.append((min(i, j), max(i, j)))

    for rec in records:
        p = post_idx[rec.user_id]
        if include_symptom:
            add_edge(p, symptom_idx[rec.user_id])
        if include_behavior:
            add_edge(p, behavior_idx[rec.user_id])
        if include_semantic:
            for tid in rec.topic_ids:
                add_edge(p, topic_idx[tid])
            for eid in rec.entity_ids:
                add_edge(p, entity_idx[eid])

    if include_semantic:
        ent_list = sorted(entity_idx)
        for a in range(len(ent_list)):
            for b in range(a + 1, len(ent_list)):
                va = collection.vocab.entities[ent_list[a]]
                vb = collection.vocab.entities[ent_list[b]]
                if cosine(va, vb) > threshold:
                    add_edge(entity_idx[ent_list[a]], entity_idx[ent_list[b]])

    np.fill_diagonal(adj, True)

    user_nodes = {
        rec.user_id: {
            "post": post_idx[rec.user_id],
            "symptom": symptom_idx.get(rec.user_id),
            "behavior": behavior_idx.get(rec.user_id),
            "topics": [topic_idx[t] for t in rec.topic_ids] if include_semantic else [],
            "entities": [entity_idx[e] for e in rec.entity_ids] if include_semantic else [],
        }
        for rec in records
    }

    return HeteroGraph(
        node_ids=node_ids,
        node_types=np.array(node_types, dtype=np.int64),
        features=features,
        owners=[frozenset(o) for o in owners],
        adj=adj,
        edges=sorted(edges),
        user_ids=[rec.user_id for rec in records],
        labels=np.array([rec.label for rec in records], dtype=np.int64),
        user_nodes=user_nodes,
    )
