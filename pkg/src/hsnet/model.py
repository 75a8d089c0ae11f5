"""Full model: encoder -> subgraph embeddings -> classifier heads.

The forward pass produces, per user, the inter-attended subgraph embedding
``sg`` and the final post-node embedding ``hp``; two linear heads map each
to binary class logits. The contrastive branch re-encodes feature-shuffled
copies of the graph through the identical pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn

from .hetgat import DualAttentionEncoder, _glorot
from .subcon import SubgraphContrast, corrupt_features, negative_count
from .torchgraph import DTYPE, GraphTensors


@dataclass
class ModelFlags:
    uniform_attention: bool = False      # disable dual attention
    mean_subgraph: bool = False          # disable intra/inter subgraph attention

    @classmethod
    def from_config(cls, config) -> "ModelFlags":
        return cls(
            uniform_attention=config.disable_dual_attention,
            mean_subgraph=config.disable_subgraph_attention,
        )


@dataclass
class EncodedGraph:
    node_embeddings: torch.Tensor   # (N, q)
    subgraph: torch.Tensor          # (n_users, q) sg_i
    post: torch.Tensor              # (n_users, q) hp_i


class ClassifierHeads(nn.Module):
    def __init__(self, hidden_dim: int, generator: torch.Generator):
        super().__init__()
        self.subgraph_weight = nn.Parameter(_glorot((hidden_dim, 2), generator))
        self.subgraph_bias = nn.Parameter(torch.zeros(2, dtype=DTYPE))
        self.post_weight = nn.Parameter(_glorot((hidden_dim, 2), generator))
        self.post_bias = nn.Parameter(torch.zeros(2, dtype=DTYPE))

    def subgraph_logits(self, sg: torch.Tensor) -> torch.Tensor:
        return sg @ self.subgraph_weight + self.subgraph_bias

    def post_logits(self, hp: torch.Tensor) -> torch.Tensor:
        return hp @ self.post_weight + self.post_bias


class DepressionNet(nn.Module):
    def __init__(self, widths: dict[str, int], hidden_dim: int, n_layers: int,
                 n_heads: int, seed: int):
        super().__init__()
        generator = torch.Generator().manual_seed(seed)
        self.encoder = DualAttentionEncoder(widths, hidden_dim, n_layers, generator)
        self.subgraph = SubgraphContrast(hidden_dim, n_heads, generator)
        self.heads = ClassifierHeads(hidden_dim, generator)

    def encode(self, gt: GraphTensors, *,
               features: list[torch.Tensor] | None = None,
               flags: ModelFlags | None = None,
               training: bool = False, dropout: float = 0.0,
               dropout_generator: torch.Generator | None = None) -> EncodedGraph:
        flags = flags or ModelFlags()
        x = self.encoder.propagate(
            gt, features=features, training=training, dropout=dropout,
            dropout_generator=dropout_generator,
            uniform_attention=flags.uniform_attention,
        )
        if flags.mean_subgraph:
            sg = self.subgraph.mean_embed(x, gt.membership)
        else:
            g = self.subgraph.intra_embed(x, gt.membership)
            sg = self.subgraph.inter_attend(g, gt.supernode_adj)
        return EncodedGraph(node_embeddings=x, subgraph=sg, post=x[gt.post_index])

    def negative_subgraphs(self, gt: GraphTensors, rate: float,
                           generator: torch.Generator, *,
                           flags: ModelFlags | None = None,
                           training: bool = False, dropout: float = 0.0,
                           dropout_generator: torch.Generator | None = None
                           ) -> torch.Tensor:
        """Encode feature-shuffled graphs until round(rate * n_users) negatives exist."""
        n = gt.n_users
        wanted = negative_count(rate, n)
        chunks: list[torch.Tensor] = []
        remaining = wanted
        while remaining > 0:
            shuffled, _ = corrupt_features(gt.features, generator)
            enc = self.encode(
                gt, features=shuffled, flags=flags, training=training,
                dropout=dropout, dropout_generator=dropout_generator,
            )
            take = min(n, remaining)
            if take < n:
                pick = torch.randperm(n, generator=generator)[:take]
                chunks.append(enc.subgraph[pick])
            else:
                chunks.append(enc.subgraph)
            remaining -= take
        if not chunks:
            return torch.zeros((0, self.subgraph.hidden_dim), dtype=DTYPE)
        return torch.cat(chunks, dim=0)
