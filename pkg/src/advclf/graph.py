"""Node-embedding training by adversarially re-weighted pair discrimination.

Connected node pairs are the positives, disconnected pairs the negatives.
The discriminator scores a pair through a dot product of its own embeddings
plus a scalar bias; the generator weights negative pairs through an MLP over
the concatenation of its own embeddings, pair order canonicalized to
(min, max). Training follows the same loop as the tabular module with the
embedding tables included in the updates.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .adversarial import TrainTrace, batch_weight_entropy
from .errors import ConfigError, DataError, TrainingError
from .metrics import evaluate_binary, macro_micro_f1
from .nn import (
    Layer,
    MlpParams,
    backward,
    forward,
    init_mlp,
    mlp_spec,
    sgd_step,
    sigmoid,
    softplus,
    stable_log_one_minus_sigmoid,
    stable_log_sigmoid,
)


@dataclass
class Graph:
    """Undirected simple graph; edges stored as (min, max) id pairs."""

    n_nodes: int
    edges: set

    @property
    def n_edges(self):
        return len(self.edges)

    def has_edge(self, u, v):
        return (min(u, v), max(u, v)) in self.edges


def load_edge_list(path):
    """Whitespace-separated integer pairs, one per line; '#' starts a comment line.

    Duplicate edges in either order collapse; self-loops, negative ids and
    non-integer tokens are errors naming the line.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    edges = set()
    max_id = -1
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if len(tokens) != 2:
            raise DataError(f"{path} line {lineno}: expected two node ids, got {len(tokens)} tokens")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise DataError(f"{path} line {lineno}: non-integer node id") from None
        if u < 0 or v < 0:
            raise DataError(f"{path} line {lineno}: negative node id")
        if u == v:
            raise DataError(f"{path} line {lineno}: self-loop at node {u}")
        edges.add((min(u, v), max(u, v)))
        max_id = max(max_id, u, v)
    if not edges:
        raise DataError(f"{path}: no edges")
    return Graph(n_nodes=max_id + 1, edges=edges)


@dataclass
class NodeLabels:
    """Per-node label sets over classes 0..n_classes-1; index is the node id."""

    labels: list
    n_classes: int


def load_node_labels(path, n_nodes=None):
    """One line per node: node_id followed by one or more label ids."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    parsed = {}
    max_node = -1
    max_label = -1
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if len(tokens) < 2:
            raise DataError(f"{path} line {lineno}: expected node_id plus at least one label id")
        try:
            values = [int(t) for t in tokens]
        except ValueError:
            raise DataError(f"{path} line {lineno}: non-integer token") from None
        node, labs = values[0], values[1:]
        if node < 0 or any(l < 0 for l in labs):
            raise DataError(f"{path} line {lineno}: negative id")
        parsed.setdefault(node, set()).update(labs)
        max_node = max(max_node, node)
        max_label = max(max_label, *labs)
    if not parsed:
        raise DataError(f"{path}: no label lines")
    size = max_node + 1 if n_nodes is None else n_nodes
    if max_node >= size:
        raise DataError(f"{path}: node id {max_node} exceeds node count {size}")
    labels = [parsed.get(i, set()) for i in range(size)]
    return NodeLabels(labels=labels, n_classes=max_label + 1)


def sample_non_edges(graph, count, rng, exclude=(), tries_per_sample=2000):
    """Uniform distinct non-edges by rejection against the full edge set."""
    seen = set(exclude)
    out = []
    budget = tries_per_sample * max(count, 1)
    tries = 0
    while len(out) < count:
        if tries >= budget:
            raise DataError("could not sample enough non-edges: graph too dense")
        tries += 1
        u, v = rng.integers(0, graph.n_nodes, size=2)
        if u == v:
            continue
        pair = (int(min(u, v)), int(max(u, v)))
        if pair in graph.edges or pair in seen:
            continue
        seen.add(pair)
        out.append(pair)
    return out


def split_edges(graph, test_frac, seed):
    """Hold out round(test_frac * n_edges) edges plus equally many non-edges.

    Returns (train_edges, test_pos, test_neg) as lists of (u, v) pairs. The
    negatives are sampled from the non-edges of the original graph, so they
    never collide with train or test edges.
    """
    if not 0.0 < test_frac < 1.0:
        raise ConfigError(f"test_frac must lie in (0, 1), got {test_frac}")
    rng = np.random.default_rng(seed)
    edges = sorted(graph.edges)
    n_test = int(round(test_frac * len(edges)))
    test_mask = np.zeros(len(edges), dtype=bool)
    test_mask[rng.choice(len(edges), size=n_test, replace=False)] = True
    test_pos = [edges[i] for i in np.flatnonzero(test_mask)]
    train_edges = [edges[i] for i in np.flatnonzero(~test_mask)]
    test_neg = sample_non_edges(graph, n_test, rng)
    return train_edges, test_pos, test_neg


@dataclass
class PairBatch:
    pos: np.ndarray  # (m, 2) int, canonical order
    neg: np.ndarray  # (m, 2) int, canonical order


def sample_pair_batch(train_edges, graph, m, rng):
    """m training edges with replacement plus m uniform non-edge draws.

    Negative draws are independent, so repeats are possible; they are
    rejected against the full edge set of the graph.
    """
    if m < 1:
        raise ConfigError("batch size must be >= 1")
    if not len(train_edges):
        raise DataError("no training edges to sample from")
    edges_arr = np.asarray(train_edges, dtype=np.int64)
    pos = edges_arr[rng.integers(0, len(edges_arr), size=m)]
    neg = np.empty((m, 2), dtype=np.int64)
    budget = 2000 * m
    tries = 0
    filled = 0
    while filled < m:
        if tries >= budget:
            raise TrainingError("negative pair sampling exceeded its rejection budget")
        tries += 1
        u, v = rng.integers(0, graph.n_nodes, size=2)
        if u == v:
            continue
        pair = (int(min(u, v)), int(max(u, v)))
        if pair in graph.edges:
            continue
        neg[filled] = pair
        filled += 1
    assert not any((int(a), int(b)) in graph.edges for a, b in neg)
    return PairBatch(pos=pos, neg=neg)


@dataclass
class GraphDiscriminator:
    """Scores a pair (u, v) as sigmoid(e_u . e_v + bias) on its own table."""

    embeddings: np.ndarray  # (n_nodes, dim)
    bias: float


@dataclass
class GraphGenerator:
    """Weights a pair through softplus(MLP([e_u ; e_v])) on its own table."""

    embeddings: np.ndarray  # (n_nodes, dim)
    mlp: MlpParams


def init_graph_models(n_nodes, dim, gen_hidden, rng_d, rng_g):
    """Both tables start uniform on +/- 0.5/dim; the generator MLP takes 2*dim inputs."""
    if n_nodes < 2 or dim < 1:
        raise ConfigError("need n_nodes >= 2 and dim >= 1")
    scale = 0.5 / dim
    emb_d = rng_d.uniform(-scale, scale, size=(n_nodes, dim))
    emb_g = rng_g.uniform(-scale, scale, size=(n_nodes, dim))
    mlp = init_mlp(mlp_spec((2 * dim, *gen_hidden, 1)), rng_g)
    return GraphDiscriminator(emb_d, 0.0), GraphGenerator(emb_g, mlp)


def pair_logits(disc, pairs):
    pairs = np.asarray(pairs, dtype=np.int64)
    e_u = disc.embeddings[pairs[:, 0]]
    e_v = disc.embeddings[pairs[:, 1]]
    return np.einsum("ij,ij->i", e_u, e_v) + disc.bias


def predict_pairs(disc, pairs):
    """P(edge | pair); symmetric in the pair order by construction."""
    return sigmoid(pair_logits(disc, pairs))


def _pair_features(gen, pairs):
    pairs = np.asarray(pairs, dtype=np.int64)
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    return np.hstack([gen.embeddings[lo], gen.embeddings[hi]]), lo, hi


def generator_pair_weights(gen, pairs):
    """Batch-normalized pair weights; order-invariant via canonical pair order."""
    feats, _, _ = _pair_features(gen, pairs)
    raw = softplus(forward(gen.mlp, feats)[-1][:, 0])
    total = raw.sum()
    if not np.isfinite(total) or total <= 0.0:
        raise TrainingError("degenerate generator: raw pair weights underflowed to zero")
    return raw / total


def _graph_disc_update(disc, batch, neg_coeff, eta_d):
    s_pos = pair_logits(disc, batch.pos)
    s_neg = pair_logits(disc, batch.neg)
    m_pos = len(s_pos)
    loss = float(
        np.mean(stable_log_sigmoid(s_pos)) + np.sum(neg_coeff * stable_log_one_minus_sigmoid(s_neg))
    )
    if not np.isfinite(loss):
        raise TrainingError("non-finite discriminator loss")
    c_pos = (1.0 - sigmoid(s_pos)) / m_pos
    c_neg = -neg_coeff * sigmoid(s_neg)
    grad = np.zeros_like(disc.embeddings)
    for pairs, coeff in ((batch.pos, c_pos), (batch.neg, c_neg)):
        e_u = disc.embeddings[pairs[:, 0]]
        e_v = disc.embeddings[pairs[:, 1]]
        np.add.at(grad, pairs[:, 0], coeff[:, None] * e_v)
        np.add.at(grad, pairs[:, 1], coeff[:, None] * e_u)
    grad_bias = float(c_pos.sum() + c_neg.sum())
    if not (np.all(np.isfinite(grad)) and np.isfinite(grad_bias)):
        raise TrainingError("non-finite gradient")
    return GraphDiscriminator(disc.embeddings + eta_d * grad, disc.bias + eta_d * grad_bias), loss


def graph_pretrain_step(disc, batch, eta_d):
    coeff = np.full(len(batch.neg), 1.0 / len(batch.neg))
    return _graph_disc_update(disc, batch, coeff, eta_d)


def graph_discriminator_step(config, disc, gen, batch, weights=None):
    """Ascent with negative coefficients gamma * m * w, as in the tabular rule."""
    if weights is None:
        weights = generator_pair_weights(gen, batch.neg)
    coeff = config.gamma * len(batch.neg) * np.asarray(weights, dtype=np.float64)
    return _graph_disc_update(disc, batch, coeff, config.eta_d)


def graph_generator_step(config, disc, gen, neg_pairs):
    """Descent on the weighted term plus entropy; updates the MLP and the table."""
    log_one_minus_d = stable_log_one_minus_sigmoid(pair_logits(disc, neg_pairs))
    feats, lo, hi = _pair_features(gen, neg_pairs)
    acts = forward(gen.mlp, feats)
    t = acts[-1][:, 0]
    raw = softplus(t)
    total = raw.sum()
    if not np.isfinite(total) or total <= 0.0:
        raise TrainingError("degenerate generator: raw pair weights underflowed to zero")
    w = raw / total
    log_w = np.log(w)
    loss = float(np.sum(w * log_one_minus_d) + config.lam * np.sum(w * log_w))
    if not np.isfinite(loss):
        raise TrainingError("non-finite generator loss")
    score = log_one_minus_d + config.lam * (1.0 + log_w)
    centered = score - np.sum(w * score)
    out_grad = (sigmoid(t) * centered / total)[:, None]
    grads, input_grad = backward(gen.mlp, acts, out_grad)
    new_mlp = sgd_step(gen.mlp, grads, config.eta_g, "descent")
    dim = gen.embeddings.shape[1]
    emb_grad = np.zeros_like(gen.embeddings)
    np.add.at(emb_grad, lo, input_grad[:, :dim])
    np.add.at(emb_grad, hi, input_grad[:, dim:])
    if not np.all(np.isfinite(emb_grad)):
        raise TrainingError("non-finite gradient")
    return GraphGenerator(gen.embeddings - config.eta_g * emb_grad, new_mlp), loss


def train_graph(config, graph, train_edges, dim=20, gen_hidden=(64, 32, 32)):
    """Run the training loop where a sample is a node pair.

    All randomness derives from config.seed. Returns
    (GraphDiscriminator, GraphGenerator, TrainTrace).
    """
    seeds = np.random.SeedSequence(config.seed).spawn(3)
    rng_init_d = np.random.default_rng(seeds[0])
    rng_init_g = np.random.default_rng(seeds[1])
    rng_batches = np.random.default_rng(seeds[2])
    disc, gen = init_graph_models(graph.n_nodes, dim, gen_hidden, rng_init_d, rng_init_g)
    trace = TrainTrace()
    for i in range(config.pretrain_iters):
        batch = sample_pair_batch(train_edges, graph, config.batch_size, rng_batches)
        try:
            disc, loss = graph_pretrain_step(disc, batch, config.eta_d)
        except TrainingError as exc:
            raise TrainingError(f"pretraining iteration {i}: {exc}") from exc
        trace.pretrain_d_loss.append(loss)
    for i in range(config.train_iters):
        batch = sample_pair_batch(train_edges, graph, config.batch_size, rng_batches)
        try:
            w = generator_pair_weights(gen, batch.neg)
            disc, d_loss = graph_discriminator_step(config, disc, gen, batch, weights=w)
            gen, g_loss = graph_generator_step(config, disc, gen, batch.neg)
        except TrainingError as exc:
            raise TrainingError(f"adversarial iteration {i}: {exc}") from exc
        trace.d_loss.append(d_loss)
        trace.g_loss.append(g_loss)
        trace.weight_entropy.append(batch_weight_entropy(w))
        trace.weight_min.append(float(w.min()))
        trace.weight_max.append(float(w.max()))
    return disc, gen, trace


def link_predict_eval(disc, test_pos, test_neg):
    """Round the pair probability at 0.5; accuracy and macro-F1 over edge/non-edge."""
    if len(test_pos) == 0 or len(test_neg) == 0:
        raise DataError("empty link prediction test set")
    pairs = np.vstack([np.asarray(test_pos, dtype=np.int64), np.asarray(test_neg, dtype=np.int64)])
    labels = np.concatenate([np.ones(len(test_pos), dtype=int), np.zeros(len(test_neg), dtype=int)])
    return evaluate_binary(predict_pairs(disc, pairs), labels)


def _fit_predict_logistic(x_train, y_train, x_test, iters, lr):
    """Full-batch logistic regression from zero init, via the shared net code."""
    params = MlpParams([Layer(np.zeros((x_train.shape[1], 1)), np.zeros(1), "identity")])
    n = len(x_train)
    for _ in range(iters):
        acts = forward(params, x_train)
        s = acts[-1][:, 0]
        grads, _ = backward(params, acts, ((y_train - sigmoid(s)) / n)[:, None])
        params = sgd_step(params, grads, lr, "ascent")
    return (sigmoid(forward(params, x_test)[-1][:, 0]) >= 0.5).astype(int)


def node_classification_eval(embeddings, node_labels, train_frac=0.9, n_shuffles=10, seed=0,
                             fit_iters=300, fit_lr=0.5):
    """One-vs-all logistic probes on frozen embeddings.

    Per shuffle, train_frac of the nodes are visible; a logistic head per
    class is fit on the visible embeddings and each hidden node receives
    every label whose head outputs probability >= 0.5. A class with no
    visible positive node predicts negative. Returns mean and std of
    micro/macro F1 over the shuffles.
    """
    emb = np.asarray(embeddings, dtype=np.float64)
    if node_labels.n_classes < 2:
        raise ConfigError("need at least two classes")
    if len(node_labels.labels) != emb.shape[0]:
        raise ConfigError(
            f"{len(node_labels.labels)} label rows vs {emb.shape[0]} embedding rows"
        )
    n = emb.shape[0]
    n_visible = int(round(train_frac * n))
    if n_visible < 1 or n_visible >= n:
        raise ConfigError("train_frac leaves no visible or no hidden nodes")
    y = np.zeros((n, node_labels.n_classes))
    for node, labs in enumerate(node_labels.labels):
        for c in labs:
            y[node, c] = 1.0
    micros = []
    macros = []
    for child in np.random.SeedSequence(seed).spawn(n_shuffles):
        rng = np.random.default_rng(child)
        perm = rng.permutation(n)
        visible, hidden = perm[:n_visible], perm[n_visible:]
        counts = []
        for c in range(node_labels.n_classes):
            y_vis = y[visible, c]
            if y_vis.sum() == 0:
                pred = np.zeros(len(hidden), dtype=int)
            else:
                pred = _fit_predict_logistic(emb[visible], y_vis, emb[hidden], fit_iters, fit_lr)
            y_hid = y[hidden, c].astype(int)
            tp = int(np.sum((pred == 1) & (y_hid == 1)))
            fp = int(np.sum((pred == 1) & (y_hid == 0)))
            fn = int(np.sum((pred == 0) & (y_hid == 1)))
            counts.append((tp, fp, fn))
        macro, micro = macro_micro_f1(counts)
        micros.append(micro)
        macros.append(macro)
    return {
        "micro_f1_mean": float(np.mean(micros)),
        "micro_f1_std": float(np.std(micros)),
        "macro_f1_mean": float(np.mean(macros)),
        "macro_f1_std": float(np.std(macros)),
        "n_shuffles": int(n_shuffles),
    }


def sbm_graph(block_sizes, p_in, p_out, seed):
    """Planted-partition random graph with contiguous node blocks."""
    if not block_sizes or any(int(s) < 1 for s in block_sizes):
        raise ConfigError("block sizes must all be >= 1")
    if not (0.0 <= p_in <= 1.0 and 0.0 <= p_out <= 1.0):
        raise ConfigError("probabilities must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    block_of = np.repeat(np.arange(len(block_sizes)), block_sizes)
    n = int(block_of.size)
    edges = set()
    for u in range(n):
        same = block_of[u + 1 :] == block_of[u]
        probs = np.where(same, p_in, p_out)
        hits = rng.random(n - u - 1) < probs
        for offset in np.flatnonzero(hits):
            edges.add((u, u + 1 + int(offset)))
    return Graph(n_nodes=n, edges=edges)


def save_embeddings_csv(path, embeddings):
    """Rows of node_id followed by the embedding coordinates; no header row."""
    emb = np.asarray(embeddings, dtype=np.float64)
    with open(path, "w", encoding="utf-8") as fh:
        for i, row in enumerate(emb):
            fh.write(",".join([str(i)] + [repr(float(v)) for v in row]) + "\n")
