"""Dual-attention propagation over the heterogeneous graph.

Each layer recomputes, from the current embeddings:

1. per-type neighbor aggregates  x_tau(v) = sum_v' A_tau[v, v'] x_v'
2. type-level weights            alpha(v, tau) = softmax_tau LeakyReLU(mu_tau . [x_v || x_tau])
   (softmax runs only over types present among v's neighbors)
3. node-level weights            beta(v, v') = softmax_{v' in N_v}
                                 LeakyReLU(mu_node . (alpha(v, tau(v')) * (x_v ⊙ x_v')))
4. update                        x_v <- ELU(sum_{v'} beta(v, v') x_v' W_{tau(v')})

Attention logits use LeakyReLU(0.2); the layer activation is ELU. Dropout
(training only) applies to the normalized node weights and layer outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import math

import torch
from torch import nn

from .errors import NumericalError, ValidationError
from .graph import NODE_TYPES, TYPE_CODES
from .torchgraph import DTYPE, GraphTensors

LEAKY_SLOPE = 0.2
NEG_INF = float("-inf")


def _glorot(shape: tuple[int, ...], generator: torch.Generator) -> torch.Tensor:
    fan_in = shape[0] if len(shape) == 1 else shape[-2]
    fan_out = shape[-1]
    bound = math.sqrt(6.0 / (fan_in + fan_out))
    out = torch.empty(*shape, dtype=DTYPE)
    out.uniform_(-bound, bound, generator=generator)
    return out


def dropout_mask(shape, p: float, generator: torch.Generator) -> torch.Tensor:
    keep = (torch.rand(*shape, generator=generator, dtype=DTYPE) >= p).to(DTYPE)
    return keep / (1.0 - p)


@dataclass
class LayerAttention:
    alpha: torch.Tensor   # (N, T) type-level weights, zero for absent types
    beta: torch.Tensor    # (N, N) node-level weights, zero off-neighborhood


class DualAttentionEncoder(nn.Module):
    """Per-type projections plus L dual-attention propagation layers."""

    def __init__(self, widths: dict[str, int], hidden_dim: int, n_layers: int,
                 generator: torch.Generator):
        super().__init__()
        if n_layers < 1:
            raise ValidationError("n_layers must be ≥ 1")
        self.widths = dict(widths)
        self.hidden_dim = hidden_dim
        self.n_layers = n_layers
        q = hidden_dim
        self.proj = nn.ParameterDict({
            t: nn.Parameter(_glorot((widths[t], q), generator)) for t in NODE_TYPES
        })
        self.type_attn = nn.ParameterDict({
            t: nn.Parameter(_glorot((2 * q,), generator)) for t in NODE_TYPES
        })
        self.node_attn = nn.Parameter(_glorot((q,), generator))
        self.layer_weights = nn.ModuleList()
        for _ in range(n_layers):
            self.layer_weights.append(nn.ParameterDict({
                t: nn.Parameter(_glorot((q, q), generator)) for t in NODE_TYPES
            }))

    def project_inputs(self, gt: GraphTensors,
                       features: list[torch.Tensor] | None = None) -> torch.Tensor:
        """Map raw per-type features into the common width."""
        feats = features if features is not None else gt.features
        out = torch.zeros((gt.n_nodes, self.hidden_dim), dtype=DTYPE)
        for t, name in enumerate(NODE_TYPES):
            if feats[t].shape[0] == 0:
                continue
            if feats[t].shape[1] != self.widths[name]:
                raise ValidationError(
                    f"node type {name!r}: raw width {feats[t].shape[1]} "
                    f"≠ projection input {self.widths[name]}"
                )
            out = out + gt.scatter[t] @ (feats[t] @ self.proj[name])
        return out

    def attention(self, gt: GraphTensors, x: torch.Tensor,
                  uniform: bool = False) -> LayerAttention:
        """Type- and node-level attention matrices from the current embeddings."""
        n = gt.n_nodes
        if uniform:
            present = gt.has_type.to(DTYPE)
            alpha = present / present.sum(dim=1, keepdim=True)
            adj = gt.adj.to(DTYPE)
            beta = adj / adj.sum(dim=1, keepdim=True)
            return LayerAttention(alpha=alpha, beta=beta)

        cols = []
        for t, name in enumerate(NODE_TYPES):
            if gt.type_index[t].numel() == 0:
                cols.append(torch.zeros(n, dtype=DTYPE))
                continue
            agg = gt.norm_adj[t] @ x[gt.type_index[t]]
            cols.append(torch.cat([x, agg], dim=1) @ self.type_attn[name])
        logits = torch.stack(cols, dim=1)
        logits = torch.nn.functional.leaky_relu(logits, LEAKY_SLOPE)
        logits = logits.masked_fill(~gt.has_type, NEG_INF)
        alpha = torch.softmax(logits, dim=1)

        alpha_cols = alpha[:, gt.type_codes]                  # (N, N)
        pairwise = (x * self.node_attn) @ x.T                 # mu_node . (x_v ⊙ x_v')
        node_logits = torch.nn.functional.leaky_relu(alpha_cols * pairwise, LEAKY_SLOPE)
        node_logits = node_logits.masked_fill(~gt.adj, NEG_INF)
        beta = torch.softmax(node_logits, dim=1)
        return LayerAttention(alpha=alpha, beta=beta)

    def propagate(self, gt: GraphTensors, *,
                  features: list[torch.Tensor] | None = None,
                  training: bool = False, dropout: float = 0.0,
                  dropout_generator: torch.Generator | None = None,
                  uniform_attention: bool = False,
                  collect_attention: bool = False):
        """Run all layers; returns final embeddings (and attention if asked)."""
        x = self.project_inputs(gt, features)
        attns: list[LayerAttention] = []
        use_dropout = training and dropout > 0.0
        if use_dropout and dropout_generator is None:
            raise ValidationError("dropout requires an explicit generator")
        for layer in range(self.n_layers):
            attn = self.attention(gt, x, uniform=uniform_attention)
            if collect_attention:
                attns.append(attn)
            beta = attn.beta
            if use_dropout:
                beta = beta * dropout_mask(beta.shape, dropout, dropout_generator)
            out = torch.zeros_like(x)
            weights = self.layer_weights[layer]
            for t, name in enumerate(NODE_TYPES):
                idx = gt.type_index[t]
                if idx.numel() == 0:
                    continue
                out = out + beta[:, idx] @ (x[idx] @ weights[name])
            x = torch.nn.functional.elu(out)
            if use_dropout:
                x = x * dropout_mask(x.shape, dropout, dropout_generator)
            if not torch.isfinite(x).all():
                raise NumericalError(f"non-finite embeddings after layer {layer}")
        if collect_attention:
            return x, attns
        return x

    forward = propagate


def type_aggregate(gt: GraphTensors, x: torch.Tensor, node: int, type_name: str) -> torch.Tensor:
    """Weighted sum of one node's type-restricted neighborhood (zero if none)."""
    t = TYPE_CODES[type_name]
    if gt.type_index[t].numel() == 0:
        return torch.zeros(x.shape[1], dtype=DTYPE)
    return gt.norm_adj[t][node] @ x[gt.type_index[t]]


def type_attention_weights(x_v: torch.Tensor, aggregates: dict[str, torch.Tensor],
                           type_attn: dict[str, torch.Tensor]) -> dict[str, torch.Tensor]:
    """Per-node reference path for the type-level softmax (present types only)."""
    names = sorted(aggregates)
    logits = torch.stack([
        torch.nn.functional.leaky_relu(
            torch.cat([x_v, aggregates[name]]) @ type_attn[name], LEAKY_SLOPE
        )
        for name in names
    ])
    weights = torch.softmax(logits, dim=0)
    return {name: weights[i] for i, name in enumerate(names)}


def node_attention_weights(x_v: torch.Tensor, neighbors: list[torch.Tensor],
                           neighbor_type_weights: list[torch.Tensor],
                           node_attn: torch.Tensor) -> torch.Tensor:
    """Per-node reference path for the node-level softmax over one neighborhood."""
    logits = torch.stack([
        torch.nn.functional.leaky_relu(
            node_attn @ (alpha * (x_v * x_n)), LEAKY_SLOPE
        )
        for x_n, alpha in zip(neighbors, neighbor_type_weights)
    ])
    return torch.softmax(logits, dim=0)
