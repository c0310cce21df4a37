"""Small dense networks with explicit backpropagation, all in float64 numpy.

Parameters live in plain dataclasses and every operation returns fresh
arrays, so repeated calls with the same inputs are reproducible bit for bit
and separate parameter objects never share state. finite_difference_grad is
the deliberately slow oracle that backward is checked against.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, TrainingError

ACTIVATIONS = ("identity", "sigmoid", "relu")


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    # split by sign; every exp argument is <= 0
    zp = np.clip(z, 0.0, None)
    zn = np.clip(z, None, 0.0)
    ez = np.exp(zn)
    return np.where(z >= 0.0, 1.0 / (1.0 + np.exp(-zp)), ez / (1.0 + ez))


def softplus(z):
    z = np.asarray(z, dtype=np.float64)
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def stable_log_sigmoid(z):
    """log(sigmoid(z)) as -softplus(-z); accurate deep into both tails."""
    return -softplus(-np.asarray(z, dtype=np.float64))


def stable_log_one_minus_sigmoid(z):
    """log(1 - sigmoid(z)) as -softplus(z)."""
    return -softplus(np.asarray(z, dtype=np.float64))


@dataclass(frozen=True)
class LayerSpec:
    in_dim: int
    out_dim: int
    activation: str = "sigmoid"

    def __post_init__(self):
        if self.in_dim < 1 or self.out_dim < 1:
            raise ConfigError(f"layer dims must be >= 1, got {self.in_dim}x{self.out_dim}")
        if self.activation not in ACTIVATIONS:
            raise ConfigError(f"unknown activation {self.activation!r}")


@dataclass
class Layer:
    weight: np.ndarray  # (in_dim, out_dim)
    bias: np.ndarray  # (out_dim,)
    activation: str


@dataclass
class MlpParams:
    layers: list

    @property
    def in_dim(self):
        return self.layers[0].weight.shape[0]

    @property
    def out_dim(self):
        return self.layers[-1].weight.shape[1]


def mlp_spec(dims, hidden_activation="sigmoid", final_activation="identity"):
    """Chain of LayerSpec for the given unit counts, e.g. (4, 64, 32, 32, 1)."""
    dims = tuple(int(d) for d in dims)
    if len(dims) < 2:
        raise ConfigError("need at least an input and an output dimension")
    specs = []
    for i in range(len(dims) - 1):
        act = final_activation if i == len(dims) - 2 else hidden_activation
        specs.append(LayerSpec(dims[i], dims[i + 1], act))
    return specs


def init_mlp(specs, rng):
    """Uniform weights on +/- sqrt(6 / (fan_in + fan_out)), zero biases."""
    if not specs:
        raise ConfigError("empty layer spec")
    layers = []
    for i, spec in enumerate(specs):
        if i > 0 and spec.in_dim != specs[i - 1].out_dim:
            raise ConfigError(
                f"layer {i} input dim {spec.in_dim} does not chain with previous output {specs[i - 1].out_dim}"
            )
        limit = np.sqrt(6.0 / (spec.in_dim + spec.out_dim))
        weight = rng.uniform(-limit, limit, size=(spec.in_dim, spec.out_dim))
        layers.append(Layer(weight, np.zeros(spec.out_dim), spec.activation))
    return MlpParams(layers)


def clone_params(params):
    return MlpParams([Layer(l.weight.copy(), l.bias.copy(), l.activation) for l in params.layers])


def _apply_activation(name, z):
    if name == "identity":
        return z
    if name == "sigmoid":
        return sigmoid(z)
    return np.maximum(z, 0.0)


def forward(params, batch):
    """Run the net on an (n, in_dim) batch.

    Returns the list [input, layer_1 output, ..., final output]; the caller
    keeps it around for backward.
    """
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[1] != params.in_dim:
        raise ConfigError(f"batch shape {batch.shape} does not match input dim {params.in_dim}")
    activations = [batch]
    out = batch
    for layer in params.layers:
        out = _apply_activation(layer.activation, out @ layer.weight + layer.bias)
        activations.append(out)
    return activations


def backward(params, activations, output_grad):
    """Gradients of a scalar loss given d loss / d final_activation.

    Returns ([(d_weight, d_bias) per layer], d loss / d input batch).
    """
    delta = np.asarray(output_grad, dtype=np.float64)
    grads = [None] * len(params.layers)
    for i in range(len(params.layers) - 1, -1, -1):
        layer = params.layers[i]
        out = activations[i + 1]
        if layer.activation == "sigmoid":
            delta = delta * out * (1.0 - out)
        elif layer.activation == "relu":
            delta = delta * (out > 0.0)
        grads[i] = (activations[i].T @ delta, delta.sum(axis=0))
        delta = delta @ layer.weight.T
    return grads, delta


def finite_difference_grad(loss_fn, params, epsilon=1e-5):
    """Central-difference gradient of loss_fn(params), one entry at a time."""
    if epsilon <= 0:
        raise ConfigError("epsilon must be positive")
    work = clone_params(params)
    grads = []
    for layer in work.layers:
        pair = []
        for arr in (layer.weight, layer.bias):
            g = np.zeros_like(arr)
            it = np.nditer(arr, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                orig = arr[idx]
                arr[idx] = orig + epsilon
                hi = loss_fn(work)
                arr[idx] = orig - epsilon
                lo = loss_fn(work)
                arr[idx] = orig
                g[idx] = (hi - lo) / (2.0 * epsilon)
            pair.append(g)
        grads.append(tuple(pair))
    return grads


def sgd_step(params, grads, learning_rate, direction="descent"):
    """theta +/- learning_rate * grad, returned as new params."""
    if learning_rate <= 0:
        raise ConfigError("learning_rate must be positive")
    if direction not in ("ascent", "descent"):
        raise ConfigError(f"direction must be 'ascent' or 'descent', got {direction!r}")
    sign = 1.0 if direction == "ascent" else -1.0
    layers = []
    for layer, (gw, gb) in zip(params.layers, grads, strict=True):
        if not (np.all(np.isfinite(gw)) and np.all(np.isfinite(gb))):
            raise TrainingError("non-finite gradient")
        layers.append(
            Layer(
                layer.weight + sign * learning_rate * gw,
                layer.bias + sign * learning_rate * gb,
                layer.activation,
            )
        )
    return MlpParams(layers)
