"""Static tensor view of a heterogeneous graph for the model forward pass.

All tensors are float64 / int64 on CPU. Structure (adjacency, type masks,
normalized blocks, subgraph membership, supernode adjacency) is constant;
only the per-type raw feature matrices vary (e.g. under corruption).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import torch

from .graph import N_TYPES, NODE_TYPES, HeteroGraph

DTYPE = torch.float64


@dataclass
class GraphTensors:
    n_nodes: int
    n_users: int
    type_codes: torch.Tensor          # (N,) int64
    adj: torch.Tensor                 # (N, N) bool, self-loops set
    type_index: list[torch.Tensor]    # per type: node indices, shape (n_t,)
    norm_adj: list[torch.Tensor]      # per type: (N, n_t) row-normalized block
    scatter: list[torch.Tensor]       # per type: (N, n_t) one-hot scatter matrix
    has_type: torch.Tensor            # (N, T) bool: v has a neighbor of type t
    features: list[torch.Tensor]      # per type: (n_t, width_t) raw features
    membership: torch.Tensor          # (n_users, N) float64 subgraph indicator
    supernode_adj: torch.Tensor       # (n_users, n_users) bool, self-loops set
    post_index: torch.Tensor          # (n_users,) node index of each post node
    labels: torch.Tensor              # (n_users,) int64
    user_ids: list[str]

    def with_features(self, features: list[torch.Tensor]) -> "GraphTensors":
        return replace(self, features=features)

    @property
    def feature_widths(self) -> dict[str, int]:
        return {
            NODE_TYPES[t]: int(self.features[t].shape[1]) if self.features[t].numel() else 0
            for t in range(N_TYPES)
        }


def build_supernode_adjacency(graph: HeteroGraph) -> np.ndarray:
    """Users are adjacent iff some shared topic/entity node lists them both."""
    n = graph.n_users
    pos = {uid: i for i, uid in enumerate(graph.user_ids)}
    out = np.eye(n, dtype=bool)
    for code, owner_set in zip(graph.node_types, graph.owners):
        if NODE_TYPES[code] not in ("topic", "entity") or len(owner_set) < 2:
            continue
        members = sorted(pos[u] for u in owner_set)
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                out[members[a], members[b]] = out[members[b], members[a]] = True
    return out


def from_hetero_graph(graph: HeteroGraph) -> GraphTensors:
    n = graph.n_nodes
    type_codes = torch.from_numpy(graph.node_types.copy())
    adj = torch.from_numpy(graph.adj.copy())

    type_index, norm_adj, scatter, features = [], [], [], []
    has_type = torch.zeros((n, N_TYPES), dtype=torch.bool)
    for t, name in enumerate(NODE_TYPES):
        idx = np.nonzero(graph.node_types == t)[0]
        type_index.append(torch.from_numpy(idx.copy()))
        block = graph.adj[:, idx].astype(np.float64)
        row_sums = block.sum(axis=1, keepdims=True)
        normalized = np.divide(block, row_sums, out=np.zeros_like(block),
                               where=row_sums > 0)
        norm_adj.append(torch.from_numpy(normalized))
        s = np.zeros((n, len(idx)), dtype=np.float64)
        s[idx, np.arange(len(idx))] = 1.0
        scatter.append(torch.from_numpy(s))
        has_type[:, t] = torch.from_numpy(row_sums[:, 0] > 0)
        if len(idx) > 0:
            feat = np.stack([graph.features[i] for i in idx])
        else:
            feat = np.zeros((0, 0), dtype=np.float64)
        features.append(torch.from_numpy(feat))

    membership = torch.from_numpy(graph.membership().astype(np.float64))
    supernode = torch.from_numpy(build_supernode_adjacency(graph))
    post_index = torch.tensor(
        [graph.user_nodes[u]["post"] for u in graph.user_ids], dtype=torch.int64
    )
    return GraphTensors(
        n_nodes=n,
        n_users=graph.n_users,
        type_codes=type_codes,
        adj=adj,
        type_index=type_index,
        norm_adj=norm_adj,
        scatter=scatter,
        has_type=has_type,
        features=features,
        membership=membership,
        supernode_adj=supernode,
        post_index=post_index,
        labels=torch.from_numpy(graph.labels.copy()),
        user_ids=list(graph.user_ids),
    )
