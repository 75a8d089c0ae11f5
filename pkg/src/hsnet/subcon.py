"""Subgraph embeddings, corruption negatives, readout, and the contrastive loss.

A user's subgraph embedding is a gated sum of its node embeddings
(intra-subgraph attention), then multi-head attention over adjacent user
supernodes mixes neighboring subgraphs (inter-subgraph attention). The
global readout is the sigmoid of the mean positive subgraph embedding; a
bilinear discriminator scores subgraph/global pairs, and the contrastive
loss is binary cross-entropy over positive (real) and negative (feature-
shuffled) subgraphs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from .errors import ValidationError
from .graph import NODE_TYPES, HeteroGraph
from .hetgat import LEAKY_SLOPE, _glorot
from .torchgraph import build_supernode_adjacency

log = logging.getLogger(__name__)

DISCRIMINATOR_EPS = 1e-7
NEG_INF = float("-inf")


@dataclass
class SupernodeGraph:
    user_ids: list[str]
    adjacency: np.ndarray  # bool, symmetric, self-loops set


def build_supernode_graph(graph: HeteroGraph) -> SupernodeGraph:
    """Connect users whose subgraphs share at least one topic/entity node."""
    return SupernodeGraph(
        user_ids=list(graph.user_ids),
        adjacency=build_supernode_adjacency(graph),
    )


@dataclass
class ContrastiveBatch:
    positive: torch.Tensor   # (n_pos, q)
    negative: torch.Tensor   # (n_neg, q)
    readout: torch.Tensor    # (q,)


class SubgraphContrast(nn.Module):
    """Intra/inter subgraph attention plus the bilinear discriminator."""

    def __init__(self, hidden_dim: int, n_heads: int, generator: torch.Generator):
        super().__init__()
        if n_heads < 1:
            raise ValidationError("n_heads must be ≥ 1")
        q = hidden_dim
        self.hidden_dim = q
        self.n_heads = n_heads
        self.intra_weight = nn.Parameter(_glorot((q, q), generator))
        self.intra_attn = nn.Parameter(_glorot((q,), generator))
        self.inter_weights = nn.ParameterList(
            nn.Parameter(_glorot((q, q), generator)) for _ in range(n_heads)
        )
        self.inter_attns = nn.ParameterList(
            nn.Parameter(_glorot((2 * q,), generator)) for _ in range(n_heads)
        )
        self.mi_weight = nn.Parameter(_glorot((q, q), generator))

    def intra_embed(self, x: torch.Tensor, membership: torch.Tensor) -> torch.Tensor:
        """Gated sum over each user's nodes: g_i = sum_j sigmoid(a . W x_j) x_j."""
        gates = torch.sigmoid(x @ (self.intra_weight.T @ self.intra_attn))
        return membership @ (gates.unsqueeze(1) * x)

    @staticmethod
    def mean_embed(x: torch.Tensor, membership: torch.Tensor) -> torch.Tensor:
        """Plain mean over each user's nodes (subgraph-attention ablation)."""
        return membership @ x / membership.sum(dim=1, keepdim=True)

    def inter_attend(self, g: torch.Tensor, supernode_adj: torch.Tensor,
                     collect_attention: bool = False):
        """Head-averaged attention over adjacent supernodes."""
        heads = []
        betas = []
        for m in range(self.n_heads):
            h = g @ self.inter_weights[m].T
            a = self.inter_attns[m]
            q = self.hidden_dim
            left = h @ a[:q]
            right = h @ a[q:]
            logits = torch.nn.functional.leaky_relu(
                left.unsqueeze(1) + right.unsqueeze(0), LEAKY_SLOPE
            )
            logits = logits.masked_fill(~supernode_adj, NEG_INF)
            beta = torch.softmax(logits, dim=1)
            heads.append(beta @ h)
            if collect_attention:
                betas.append(beta)
        sg = torch.stack(heads).mean(dim=0)
        if collect_attention:
            return sg, betas
        return sg

    def readout(self, sg: torch.Tensor) -> torch.Tensor:
        """sigmoid(mean over positive subgraph embeddings)."""
        if sg.shape[0] < 1:
            raise ValidationError("readout requires at least one subgraph")
        return torch.sigmoid(sg.mean(dim=0))

    def discriminate(self, sg: torch.Tensor, readout: torch.Tensor) -> torch.Tensor:
        """sigmoid(sg . W_MI . readout); accepts (q,) or (n, q) subgraphs."""
        return torch.sigmoid(sg @ (self.mi_weight @ readout))


def corrupt_features(features: list[torch.Tensor], generator: torch.Generator
                     ) -> tuple[list[torch.Tensor], list[torch.Tensor]]:
    """Shuffle raw feature rows within each node type; structure untouched.

    Returns the shuffled per-type matrices and the permutations used. A type
    with a single node permutes to itself, which makes its negatives equal
    the positives; that degenerate case is logged.
    """
    shuffled, perms = [], []
    for t, feat in enumerate(features):
        n_t = feat.shape[0]
        if n_t == 0:
            shuffled.append(feat)
            perms.append(torch.empty(0, dtype=torch.int64))
            continue
        perm = torch.randperm(n_t, generator=generator)
        if n_t == 1:
            log.warning("corruption is the identity for singleton type %r",
                        NODE_TYPES[t])
        shuffled.append(feat[perm])
        perms.append(perm)
    return shuffled, perms


def contrastive_loss_from_scores(d_pos: torch.Tensor, d_neg: torch.Tensor,
                                 eps: float = DISCRIMINATOR_EPS) -> torch.Tensor:
    """Minimizable binary cross-entropy over discriminator outputs."""
    if d_pos.numel() < 1:
        raise ValidationError("contrastive loss requires at least one positive")
    d_pos = d_pos.clamp(eps, 1.0 - eps)
    d_neg = d_neg.clamp(eps, 1.0 - eps)
    total = d_pos.numel() + d_neg.numel()
    return -(torch.log(d_pos).sum() + torch.log1p(-d_neg).sum()) / total


def contrastive_loss(batch: ContrastiveBatch, module: SubgraphContrast) -> torch.Tensor:
    d_pos = module.discriminate(batch.positive, batch.readout)
    d_neg = module.discriminate(batch.negative, batch.readout)
    return contrastive_loss_from_scores(d_pos, d_neg)


def negative_count(rate: float, n_pos: int) -> int:
    return int(round(rate * n_pos))
