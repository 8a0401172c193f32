"""Minimal dense feed-forward network with exact input gradients.

Just enough of a neural network to train the bundled experiments and to
feed the explainers: dense layers, relu/sigmoid/softmax/identity
activations, mini-batch SGD, reverse-mode gradients of any single output
with respect to the input, and a JSON round-trip that preserves weights
bit-for-bit. Deliberately not a framework: no convolutions, dropout or
regularizers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    EmptyDatasetError,
    IndexOutOfRangeError,
    MalformedModelFileError,
    ShapeMismatchError,
)
from .formats import atomic_write_text

ACTIVATIONS = ("relu", "sigmoid", "softmax", "identity")
LOSSES = ("binary_cross_entropy", "categorical_cross_entropy")


@dataclass(frozen=True)
class Layer:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray     # (out,)
    activation: str

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        b = np.asarray(self.bias, dtype=np.float64)
        if w.ndim != 2 or b.ndim != 1 or w.shape[0] != b.shape[0]:
            raise ShapeMismatchError(
                f"layer weights {w.shape} incompatible with bias {b.shape}"
            )
        if self.activation not in ACTIVATIONS:
            raise ShapeMismatchError(f"unknown activation {self.activation!r}")
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)

    @property
    def out_width(self) -> int:
        return self.weights.shape[0]

    @property
    def in_width(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class MlpModel:
    layers: tuple[Layer, ...]
    input_width: int

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ShapeMismatchError("a model needs at least one layer")
        width = self.input_width
        for i, layer in enumerate(layers):
            if layer.in_width != width:
                raise ShapeMismatchError(
                    f"layer {i} expects {layer.in_width} inputs, gets {width}"
                )
            if layer.activation == "softmax" and i != len(layers) - 1:
                raise ShapeMismatchError("softmax is only permitted on the final layer")
            width = layer.out_width
        object.__setattr__(self, "layers", layers)

    @property
    def output_width(self) -> int:
        return self.layers[-1].out_width


@dataclass(frozen=True)
class TrainConfig:
    epochs: int
    batch_size: int = 32
    learning_rate: float = 0.05
    seed: int = 0
    loss: str = "binary_cross_entropy"

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if self.loss not in LOSSES:
            raise ValueError(f"loss must be one of {LOSSES}")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=-1, keepdims=True)
    ez = np.exp(shifted)
    return ez / ez.sum(axis=-1, keepdims=True)


def _activate(z: np.ndarray, activation: str) -> np.ndarray:
    if activation == "relu":
        return np.maximum(z, 0.0)
    if activation == "sigmoid":
        return _sigmoid(z)
    if activation == "softmax":
        return _softmax(z)
    return z


def _activation_grad(z: np.ndarray, activation: str) -> np.ndarray:
    """Elementwise derivative; relu's derivative at exactly 0 is 0."""
    if activation == "relu":
        return (z > 0).astype(np.float64)
    if activation == "sigmoid":
        s = _sigmoid(z)
        return s * (1.0 - s)
    if activation == "identity":
        return np.ones_like(z)
    raise ShapeMismatchError("softmax has no elementwise derivative")


def _check_input(model: MlpModel, x: np.ndarray, batched: bool) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    want = 2 if batched else 1
    if arr.ndim != want or arr.shape[-1] != model.input_width:
        raise ShapeMismatchError(
            f"input shape {arr.shape} incompatible with input width {model.input_width}"
        )
    return arr


def forward_batch(model: MlpModel, inputs: np.ndarray) -> np.ndarray:
    """Evaluate the network on a (rows, input_width) batch."""
    a = _check_input(model, inputs, batched=True)
    for layer in model.layers:
        a = _activate(a @ layer.weights.T + layer.bias, layer.activation)
    return a


def forward(model: MlpModel, x: Sequence[float]) -> np.ndarray:
    """Evaluate the network on a single input vector."""
    a = _check_input(model, np.asarray(x), batched=False)
    return forward_batch(model, a[None, :])[0]


def forward_trace(
    model: MlpModel, inputs: np.ndarray
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Batched forward pass keeping pre-activations and activations.

    Returns (pre_activations per layer, activations with the input
    prepended). Shared by input gradients, training and the explainers.
    """
    a = _check_input(model, inputs, batched=True)
    pre: list[np.ndarray] = []
    acts: list[np.ndarray] = [a]
    for layer in model.layers:
        z = acts[-1] @ layer.weights.T + layer.bias
        pre.append(z)
        acts.append(_activate(z, layer.activation))
    return pre, acts


def _check_output_index(model: MlpModel, output_index: int) -> int:
    idx = int(output_index)
    if idx < 0 or idx >= model.output_width:
        raise IndexOutOfRangeError(
            f"output index {idx} outside 0..{model.output_width - 1}"
        )
    return idx


def input_gradients_batch(
    model: MlpModel, inputs: np.ndarray, output_index: int
) -> np.ndarray:
    """Gradient of one output unit w.r.t. each input row (reverse mode)."""
    idx = _check_output_index(model, output_index)
    pre, _acts = forward_trace(model, inputs)
    rows = pre[0].shape[0]
    g = np.zeros((rows, model.output_width))
    g[:, idx] = 1.0
    for layer, z in zip(reversed(model.layers), reversed(pre)):
        if layer.activation == "softmax":
            p = _softmax(z)
            g = p * (g - (g * p).sum(axis=1, keepdims=True))
        else:
            g = g * _activation_grad(z, layer.activation)
        g = g @ layer.weights
    return g


def gradient_wrt_input(
    model: MlpModel, x: Sequence[float], output_index: int
) -> np.ndarray:
    """Exact gradient of the selected output w.r.t. a single input."""
    a = _check_input(model, np.asarray(x), batched=False)
    return input_gradients_batch(model, a[None, :], output_index)[0]


def forward_logits(model: MlpModel, x: Sequence[float]) -> np.ndarray:
    """Final-layer pre-activations for a single input."""
    a = _check_input(model, np.asarray(x), batched=False)
    pre, _ = forward_trace(model, a[None, :])
    return pre[-1][0]


def _init_layers(
    widths: Sequence[int], activations: Sequence[str], rng: np.random.Generator
) -> list[list[np.ndarray]]:
    layers = []
    for (fan_in, fan_out), _act in zip(zip(widths[:-1], widths[1:]), activations):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-limit, limit, size=(fan_out, fan_in))
        layers.append([w, np.zeros(fan_out)])
    return layers


def train(
    dataset,
    hidden_layers: Sequence[int],
    config: TrainConfig,
    hidden_activation: str = "relu",
) -> MlpModel:
    """Mini-batch SGD on binary or categorical cross entropy.

    The output layer is inferred from the loss: one sigmoid unit for
    binary cross entropy, a softmax over the classes otherwise. Weight
    init and shuffle order both come from the config seed, so a given
    (dataset, architecture, config) always yields the same model.
    """
    X = np.asarray(dataset.features, dtype=np.float64)
    y = np.asarray(dataset.labels, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyDatasetError("training needs a nonempty 2-D feature matrix")
    if y.shape != (X.shape[0],):
        raise ShapeMismatchError("labels must align with feature rows")
    n, m = X.shape
    if config.loss == "binary_cross_entropy":
        if np.any((y != 0) & (y != 1)):
            raise ShapeMismatchError("binary cross entropy expects 0/1 labels")
        out_width, out_act = 1, "sigmoid"
        targets = y.astype(np.float64)[:, None]
    else:
        n_classes = int(y.max()) + 1 if y.size else 0
        if np.any(y < 0):
            raise ShapeMismatchError("labels must be nonnegative class ids")
        if n_classes < 2:
            n_classes = 2
        out_width, out_act = n_classes, "softmax"
        targets = np.eye(n_classes)[y]

    widths = [m, *[int(h) for h in hidden_layers], out_width]
    activations = [hidden_activation] * len(hidden_layers) + [out_act]
    rng = np.random.default_rng(config.seed)
    params = _init_layers(widths, activations, rng)

    for _epoch in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            xb, tb = X[batch], targets[batch]
            # forward
            acts = [xb]
            pres = []
            for (w, b), act in zip(params, activations):
                z = acts[-1] @ w.T + b
                pres.append(z)
                acts.append(_activate(z, act))
            # output delta: cross entropy through sigmoid/softmax
            delta = (acts[-1] - tb) / batch.shape[0]
            for li in range(len(params) - 1, -1, -1):
                w, b = params[li]
                gw = delta.T @ acts[li]
                gb = delta.sum(axis=0)
                if li > 0:
                    delta = (delta @ w) * _activation_grad(
                        pres[li - 1], activations[li - 1]
                    )
                w -= config.learning_rate * gw
                b -= config.learning_rate * gb

    layers = tuple(
        Layer(weights=w.copy(), bias=b.copy(), activation=act)
        for (w, b), act in zip(params, activations)
    )
    return MlpModel(layers=layers, input_width=m)


def predict_labels(model: MlpModel, features: np.ndarray) -> np.ndarray:
    """Hard labels: threshold at 0.5 for one output, argmax otherwise."""
    out = forward_batch(model, np.asarray(features, dtype=np.float64))
    if model.output_width == 1:
        return (out[:, 0] >= 0.5).astype(np.int64)
    return np.argmax(out, axis=1)


def accuracy(model: MlpModel, features: np.ndarray, labels: np.ndarray) -> float:
    return float(np.mean(predict_labels(model, features) == np.asarray(labels)))


def model_to_dict(model: MlpModel) -> dict:
    return {
        "input_width": model.input_width,
        "layers": [
            {
                "weights": [[float(v) for v in row] for row in layer.weights],
                "bias": [float(v) for v in layer.bias],
                "activation": layer.activation,
            }
            for layer in model.layers
        ],
    }


def model_from_dict(doc: dict) -> MlpModel:
    try:
        layers = tuple(
            Layer(
                weights=np.array(entry["weights"], dtype=np.float64),
                bias=np.array(entry["bias"], dtype=np.float64),
                activation=entry["activation"],
            )
            for entry in doc["layers"]
        )
        return MlpModel(layers=layers, input_width=int(doc["input_width"]))
    except (KeyError, TypeError, ValueError, ShapeMismatchError) as exc:
        raise MalformedModelFileError(f"invalid model document: {exc}") from exc


def save_model(model: MlpModel, path) -> None:
    """Write the model as JSON; floats use shortest round-trip decimals."""
    atomic_write_text(path, json.dumps(model_to_dict(model), allow_nan=False) + "\n")


def load_model(path) -> MlpModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedModelFileError(f"cannot read model file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedModelFileError("model document must be a JSON object")
    return model_from_dict(doc)
