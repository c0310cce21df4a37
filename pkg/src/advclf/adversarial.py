"""Adversarially re-weighted discriminator training for imbalanced data.

A generator network assigns each majority-class (negative) sample a positive
weight, normalized to a distribution within every mini-batch. The
discriminator first warms up on uniformly weighted batches, then trains by
gradient ascent against the re-weighted negatives while the generator
descends on the opposite objective plus an entropy penalty that keeps the
weights from collapsing onto a few samples. The discriminator is the final
classifier.

Update rules, per mini-batch of m positives and m negatives with normalized
weights w (sum 1) and logits s:

  warm-up D ascent:      mean(log sig(s_pos)) + mean(log (1 - sig(s_neg)))
  adversarial D ascent:  mean(log sig(s_pos)) + gamma * m * sum(w * log(1 - sig(s_neg)))
  G descent:             sum(w * log(1 - sig(s_neg))) + lam * sum(w * log w)

The negative coefficient gamma * m * w_i reads the weights relative to
uniform, so gamma = 1/m with uniform weights reproduces a warm-up step
exactly. All log terms route through the softplus forms on logits, never
through probabilities.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, DataError, TrainingError
from .nn import (
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
class TrainConfig:
    """Settings for the warm-up and adversarial loops.

    gamma scales the re-weighted negative term of the discriminator update;
    None resolves to 1/batch_size, which balances it against the positive
    average. lam scales the generator entropy penalty.
    """

    batch_size: int = 64
    pretrain_iters: int = 200
    train_iters: int = 500
    eta_d: float = 0.05
    eta_g: float = 0.05
    gamma: float | None = None
    lam: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if self.pretrain_iters < 0 or self.train_iters < 0:
            raise ConfigError("iteration counts must be >= 0")
        if self.eta_d <= 0 or self.eta_g <= 0:
            raise ConfigError("learning rates must be positive")
        if self.gamma is None:
            self.gamma = 1.0 / self.batch_size
        if self.gamma < 0:
            raise ConfigError("gamma must be >= 0")
        if self.lam < 0:
            raise ConfigError("lam must be >= 0")


@dataclass
class Discriminator:
    """MLP ending in one linear unit; the class probability is sigmoid(logit)."""

    params: object


@dataclass
class Generator:
    """MLP ending in one linear unit; raw sample weights are softplus(output) > 0."""

    params: object


@dataclass
class TrainTrace:
    pretrain_d_loss: list = field(default_factory=list)
    d_loss: list = field(default_factory=list)
    g_loss: list = field(default_factory=list)
    weight_entropy: list = field(default_factory=list)
    weight_min: list = field(default_factory=list)
    weight_max: list = field(default_factory=list)
    checkpoints: list = field(default_factory=list)


def init_discriminator(n_features, hidden=(), rng=None):
    rng = np.random.default_rng() if rng is None else rng
    return Discriminator(init_mlp(mlp_spec((n_features, *hidden, 1)), rng))


def init_generator(n_features, hidden=(64, 32, 32), rng=None):
    rng = np.random.default_rng() if rng is None else rng
    return Generator(init_mlp(mlp_spec((n_features, *hidden, 1)), rng))


def discriminator_logits(disc, x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    return forward(disc.params, x)[-1][:, 0]


def predict(disc, x):
    """P(label 1 | x) for each row of x."""
    return sigmoid(discriminator_logits(disc, x))


def classify(disc, x):
    """Hard labels; probability exactly 0.5 rounds up to class 1."""
    return (predict(disc, x) >= 0.5).astype(np.int64)


def generator_raw_weights(gen, x):
    return softplus(forward(gen.params, np.asarray(x, dtype=np.float64))[-1][:, 0])


def generator_batch_weights(gen, negatives):
    """Per-sample weights normalized to sum to 1 over the batch."""
    negatives = np.asarray(negatives, dtype=np.float64)
    if negatives.ndim != 2 or negatives.shape[0] == 0:
        raise ConfigError("negatives must be a nonempty 2-d batch")
    raw = generator_raw_weights(gen, negatives)
    total = raw.sum()
    if not np.isfinite(total) or total <= 0.0:
        raise TrainingError("degenerate generator: raw batch weights underflowed to zero")
    return raw / total


def batch_weight_entropy(weights):
    w = np.asarray(weights, dtype=np.float64)
    return float(-np.sum(w * np.log(w)))


def _disc_update(params, pos_batch, neg_batch, neg_coeff, eta_d):
    """One ascent step on mean(log D(pos)) + sum(neg_coeff * log(1 - D(neg))).

    neg_coeff is held constant, so nothing here differentiates through the
    generator.
    """
    acts_pos = forward(params, pos_batch)
    acts_neg = forward(params, neg_batch)
    s_pos = acts_pos[-1][:, 0]
    s_neg = acts_neg[-1][:, 0]
    m_pos = len(s_pos)
    loss = float(
        np.mean(stable_log_sigmoid(s_pos)) + np.sum(neg_coeff * stable_log_one_minus_sigmoid(s_neg))
    )
    if not np.isfinite(loss):
        raise TrainingError("non-finite discriminator loss")
    grads_pos, _ = backward(params, acts_pos, ((1.0 - sigmoid(s_pos)) / m_pos)[:, None])
    grads_neg, _ = backward(params, acts_neg, (-neg_coeff * sigmoid(s_neg))[:, None])
    grads = [(gw_p + gw_n, gb_p + gb_n) for (gw_p, gb_p), (gw_n, gb_n) in zip(grads_pos, grads_neg)]
    return sgd_step(params, grads, eta_d, "ascent"), loss


def pretrain_step(disc, pos_batch, neg_batch, eta_d):
    """Uniformly weighted warm-up update: both terms are plain batch means."""
    pos_batch = np.asarray(pos_batch, dtype=np.float64)
    neg_batch = np.asarray(neg_batch, dtype=np.float64)
    coeff = np.full(len(neg_batch), 1.0 / len(neg_batch))
    params, loss = _disc_update(disc.params, pos_batch, neg_batch, coeff, eta_d)
    return Discriminator(params), loss


def discriminator_step(config, disc, gen, pos_batch, neg_batch, weights=None):
    """One ascent step of the re-weighted objective.

    The negative coefficient is gamma * m * w_i with w the batch-normalized
    generator weights, so gamma = 1/m and a uniform generator reduce exactly
    to pretrain_step on the same batches.
    """
    pos_batch = np.asarray(pos_batch, dtype=np.float64)
    neg_batch = np.asarray(neg_batch, dtype=np.float64)
    if weights is None:
        weights = generator_batch_weights(gen, neg_batch)
    coeff = config.gamma * len(neg_batch) * np.asarray(weights, dtype=np.float64)
    params, loss = _disc_update(disc.params, pos_batch, neg_batch, coeff, config.eta_d)
    return Discriminator(params), loss


def generator_step(config, disc, gen, neg_batch):
    """One descent step on sum(w * log(1 - D)) + lam * sum(w * log w).

    The gradient flows through the batch normalization of the weights;
    discriminator outputs are constants here.
    """
    neg_batch = np.asarray(neg_batch, dtype=np.float64)
    log_one_minus_d = stable_log_one_minus_sigmoid(discriminator_logits(disc, neg_batch))
    acts = forward(gen.params, neg_batch)
    t = acts[-1][:, 0]
    raw = softplus(t)
    total = raw.sum()
    if not np.isfinite(total) or total <= 0.0:
        raise TrainingError("degenerate generator: raw batch weights underflowed to zero")
    w = raw / total
    log_w = np.log(w)
    loss = float(np.sum(w * log_one_minus_d) + config.lam * np.sum(w * log_w))
    if not np.isfinite(loss):
        raise TrainingError("non-finite generator loss")
    # d loss / d raw_i: centered per-sample score divided by the batch total;
    # the centering is exactly the normalization coupling.
    score = log_one_minus_d + config.lam * (1.0 + log_w)
    centered = score - np.sum(w * score)
    out_grad = (sigmoid(t) * centered / total)[:, None]
    grads, _ = backward(gen.params, acts, out_grad)
    return Generator(sgd_step(gen.params, grads, config.eta_g, "descent")), loss


def pretrain_discriminator(config, data, disc, rng=None):
    """Run the warm-up loop for config.pretrain_iters uniform batches."""
    x_pos = data.pos_features()
    x_neg = data.neg_features()
    if len(x_pos) == 0 or len(x_neg) == 0:
        raise DataError("training data must contain both classes")
    rng = np.random.default_rng(config.seed) if rng is None else rng
    trace = TrainTrace()
    m = config.batch_size
    for i in range(config.pretrain_iters):
        pos = x_pos[rng.integers(0, len(x_pos), size=m)]
        neg = x_neg[rng.integers(0, len(x_neg), size=m)]
        try:
            disc, loss = pretrain_step(disc, pos, neg, config.eta_d)
        except TrainingError as exc:
            raise TrainingError(f"pretraining iteration {i}: {exc}") from exc
        trace.pretrain_d_loss.append(loss)
    return disc, trace


def train(config, data, disc_spec=(), gen_spec=(64, 32, 32), checkpoint_every=0, checkpoint_fn=None):
    """Warm-up followed by alternating discriminator/generator updates.

    disc_spec and gen_spec are hidden-layer widths. Batches are uniform with
    replacement; iteration counts are fixed, there is no early stopping. All
    randomness derives from config.seed. Returns (disc, gen, trace).
    """
    seeds = np.random.SeedSequence(config.seed).spawn(3)
    rng_init_d = np.random.default_rng(seeds[0])
    rng_init_g = np.random.default_rng(seeds[1])
    rng_batches = np.random.default_rng(seeds[2])
    disc = init_discriminator(data.n_features, disc_spec, rng_init_d)
    gen = init_generator(data.n_features, gen_spec, rng_init_g)
    disc, trace = pretrain_discriminator(config, data, disc, rng=rng_batches)
    x_pos = data.pos_features()
    x_neg = data.neg_features()
    m = config.batch_size
    for i in range(config.train_iters):
        pos = x_pos[rng_batches.integers(0, len(x_pos), size=m)]
        neg = x_neg[rng_batches.integers(0, len(x_neg), size=m)]
        try:
            w = generator_batch_weights(gen, neg)
            disc, d_loss = discriminator_step(config, disc, gen, pos, neg, weights=w)
            gen, g_loss = generator_step(config, disc, gen, neg)
        except TrainingError as exc:
            raise TrainingError(f"adversarial iteration {i}: {exc}") from exc
        trace.d_loss.append(d_loss)
        trace.g_loss.append(g_loss)
        trace.weight_entropy.append(batch_weight_entropy(w))
        trace.weight_min.append(float(w.min()))
        trace.weight_max.append(float(w.max()))
        if checkpoint_every and checkpoint_fn is not None and (i + 1) % checkpoint_every == 0:
            trace.checkpoints.append(checkpoint_fn(i + 1, disc))
    return disc, gen, trace


def train_pretrain_only(config, data, disc_spec=()):
    """Baseline: the warm-up loop extended for pretrain_iters + train_iters steps.

    Seeded identically to train() (same spawned init and batch streams), so a
    run with train_iters = 0 matches train() parameter for parameter and the
    per-iteration batches of a longer run pair up with the adversarial run's.
    """
    seeds = np.random.SeedSequence(config.seed).spawn(3)
    rng_init_d = np.random.default_rng(seeds[0])
    rng_batches = np.random.default_rng(seeds[2])
    disc = init_discriminator(data.n_features, disc_spec, rng_init_d)
    extended = replace(config, pretrain_iters=config.pretrain_iters + config.train_iters)
    return pretrain_discriminator(extended, data, disc, rng=rng_batches)
