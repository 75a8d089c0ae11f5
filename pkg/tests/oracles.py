"""Independent brute-force reference implementations used only by tests.

Everything here is plain numpy with explicit per-node loops, written directly
from the update rules, deliberately sharing no code with the package's
vectorized torch path.
"""

import numpy as np

from hsnet.graph import NODE_TYPES

LEAKY = 0.2


def leaky_relu(z, slope=LEAKY):
    return z if z > 0 else slope * z


def elu(z):
    return z if z > 0 else np.expm1(z)


def sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def softmax_dict(logits: dict):
    mx = max(logits.values())
    exps = {k: np.exp(v - mx) for k, v in logits.items()}
    total = sum(exps.values())
    return {k: v / total for k, v in exps.items()}


def encoder_params(model):
    enc = model.encoder
    return {
        "proj": {t: enc.proj[t].detach().numpy() for t in NODE_TYPES},
        "type_attn": {t: enc.type_attn[t].detach().numpy() for t in NODE_TYPES},
        "node_attn": enc.node_attn.detach().numpy(),
        "layers": [
            {t: layer[t].detach().numpy() for t in NODE_TYPES}
            for layer in enc.layer_weights
        ],
    }


def subgraph_params(model):
    sub = model.subgraph
    return {
        "intra_weight": sub.intra_weight.detach().numpy(),
        "intra_attn": sub.intra_attn.detach().numpy(),
        "inter_weights": [w.detach().numpy() for w in sub.inter_weights],
        "inter_attns": [a.detach().numpy() for a in sub.inter_attns],
        "mi_weight": sub.mi_weight.detach().numpy(),
    }


def project_inputs_oracle(graph, params):
    q = params["proj"]["post"].shape[1]
    x = np.zeros((graph.n_nodes, q))
    for v in range(graph.n_nodes):
        tname = NODE_TYPES[graph.node_types[v]]
        x[v] = graph.features[v] @ params["proj"][tname]
    return x


def layer_oracle(graph, x, params, layer_index):
    """One dual-attention propagation layer, node by node."""
    n = graph.n_nodes
    types = [NODE_TYPES[c] for c in graph.node_types]
    weights = params["layers"][layer_index]
    out = np.zeros_like(x)
    for v in range(n):
        neighbors = [u for u in range(n) if graph.adj[v, u]]
        present = sorted({types[u] for u in neighbors})
        aggregates = {}
        for tname in present:
            members = [u for u in neighbors if types[u] == tname]
            aggregates[tname] = sum(x[u] for u in members) / len(members)
        type_logits = {
            tname: leaky_relu(
                np.concatenate([x[v], aggregates[tname]]) @ params["type_attn"][tname]
            )
            for tname in present
        }
        alpha = softmax_dict(type_logits)
        node_logits = {
            u: leaky_relu(params["node_attn"] @ (alpha[types[u]] * (x[v] * x[u])))
            for u in neighbors
        }
        beta = softmax_dict(node_logits)
        acc = np.zeros(x.shape[1])
        for u in neighbors:
            acc += beta[u] * (x[u] @ weights[types[u]])
        out[v] = np.array([elu(z) for z in acc])
    return out


def propagate_oracle(graph, params, n_layers):
    x = project_inputs_oracle(graph, params)
    for layer in range(n_layers):
        x = layer_oracle(graph, x, params, layer)
    return x


def intra_oracle(graph, x, params):
    """Gated sum per user subgraph."""
    g = np.zeros((graph.n_users, x.shape[1]))
    for i, uid in enumerate(graph.user_ids):
        for j in graph._subgraph_indices(uid):
            gate = sigmoid(params["intra_attn"] @ (params["intra_weight"] @ x[j]))
            g[i] += gate * x[j]
    return g


def supernode_oracle(graph):
    """Pairwise owner-set intersection over topic/entity nodes."""
    n = graph.n_users
    out = np.eye(n, dtype=bool)
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            ua, ub = graph.user_ids[a], graph.user_ids[b]
            for code, owner in zip(graph.node_types, graph.owners):
                if NODE_TYPES[code] in ("topic", "entity") and ua in owner and ub in owner:
                    out[a, b] = True
                    break
    return out


def inter_oracle(g, sn_adj, params):
    n, q = g.shape
    heads = params["inter_weights"]
    sg = np.zeros_like(g)
    for i in range(n):
        neigh = [j for j in range(n) if sn_adj[i, j]]
        acc = np.zeros(q)
        for m, (w, a) in enumerate(zip(heads, params["inter_attns"])):
            h = {j: w @ g[j] for j in neigh}
            h_i = w @ g[i]
            logits = {j: leaky_relu(a[:q] @ h_i + a[q:] @ h[j]) for j in neigh}
            beta = softmax_dict(logits)
            acc += sum(beta[j] * h[j] for j in neigh)
        sg[i] = acc / len(heads)
    return sg


def readout_oracle(sg):
    return sigmoid(sg.mean(axis=0))


def discriminate_oracle(sg_vec, readout, mi_weight):
    return sigmoid(sg_vec @ mi_weight @ readout)


def contrastive_oracle(d_pos, d_neg, eps=1e-7):
    d_pos = np.clip(np.asarray(d_pos, dtype=np.float64), eps, 1 - eps)
    d_neg = np.clip(np.asarray(d_neg, dtype=np.float64), eps, 1 - eps)
    total = len(d_pos) + len(d_neg)
    return -(np.sum(np.log(d_pos)) + np.sum(np.log(1 - d_neg))) / total


def sds_aggregate_oracle(degrees, scale):
    """Per-item loop over the score table; degrees is a list of 20 ints."""
    f = [0, 0, 0, 0]
    for j, degree in enumerate(degrees, start=1):
        item = scale.item(j)
        f[degree - 1] += item.scores[degree]
    f = np.array(f, dtype=np.float64)
    return f, f / f.sum()
