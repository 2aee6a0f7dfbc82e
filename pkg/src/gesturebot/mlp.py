"""Tiny fully-connected gesture classifier: forward pass, cross-entropy
gradients, plain SGD training, evaluation, and a binary model file format.

The default network is 42-20-10-8 with ReLU hidden layers (1,158 parameters);
the 3-output variant of the same stack has exactly 1,103.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .landmarks import Dataset

MODEL_MAGIC = b"TGN1"
ACTIVATIONS = ("relu",)

DEFAULT_SIZES = (42, 20, 10, 8)

LOG_CLAMP = 1e-12


class ModelError(ValueError):
    """Bad layer spec, shape mismatch, or malformed model file."""


@dataclass(frozen=True)
class LayerSpec:
    sizes: tuple[int, ...] = DEFAULT_SIZES
    hidden_activation: str = "relu"

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise ModelError(f"bad layer sizes: {sizes}")
        if self.hidden_activation not in ACTIVATIONS:
            raise ModelError(f"unknown activation: {self.hidden_activation}")
        object.__setattr__(self, "sizes", sizes)

    @property
    def num_classes(self) -> int:
        return self.sizes[-1]

    @property
    def input_len(self) -> int:
        return self.sizes[0]


def param_count(spec: LayerSpec) -> int:
    """Total weights + biases: sum over layers of (fan_in + 1) * fan_out."""
    s = spec.sizes
    return sum((s[i] + 1) * s[i + 1] for i in range(len(s) - 1))


@dataclass
class MlpParams:
    """Dense float parameters; weights[l] is (fan_out, fan_in)."""

    spec: LayerSpec
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def __post_init__(self):
        s = self.spec.sizes
        if len(self.weights) != len(s) - 1 or len(self.biases) != len(s) - 1:
            raise ModelError("layer count mismatch")
        for l, (W, b) in enumerate(zip(self.weights, self.biases)):
            if W.shape != (s[l + 1], s[l]) or b.shape != (s[l + 1],):
                raise ModelError(f"layer {l}: bad shapes {W.shape}, {b.shape}")
            if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
                raise ModelError(f"layer {l}: non-finite parameters")

    def copy(self) -> "MlpParams":
        return MlpParams(self.spec, [w.copy() for w in self.weights], [b.copy() for b in self.biases])


def init_params(spec: LayerSpec, seed: int) -> MlpParams:
    """He-uniform init for weights, zero biases; deterministic per seed."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(spec.sizes[:-1], spec.sizes[1:]):
        limit = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpParams(spec, weights, biases)


def zero_params(spec: LayerSpec) -> MlpParams:
    return MlpParams(
        spec,
        [np.zeros((o, i)) for i, o in zip(spec.sizes[:-1], spec.sizes[1:])],
        [np.zeros(o) for o in spec.sizes[1:]],
    )


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _forward_batch(params: MlpParams, x: np.ndarray):
    """Returns (pre-activations per layer, post-activations per layer)."""
    zs, acts = [], [x]
    a = x
    n = len(params.weights)
    for l, (W, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ W.T + b
        zs.append(z)
        a = np.maximum(z, 0.0) if l < n - 1 else z
        acts.append(a)
    return zs, acts


def forward(params: MlpParams, features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Single-sample forward pass: (logits, probabilities)."""
    x = np.asarray(features, dtype=np.float64)
    if x.shape != (params.spec.input_len,):
        raise ModelError(f"expected {params.spec.input_len} features, got shape {x.shape}")
    _, acts = _forward_batch(params, x[None, :])
    logits = acts[-1][0]
    return logits, softmax(logits)


def loss_and_grad(params: MlpParams, features: np.ndarray, labels: np.ndarray):
    """Mean cross-entropy over the batch plus exact gradients.

    Uses the fused softmax-cross-entropy gradient (p - y); the log is clamped
    below at 1e-12 so a saturated softmax cannot produce -inf loss.
    """
    x = np.atleast_2d(np.asarray(features, dtype=np.float64))
    y = np.atleast_1d(np.asarray(labels, dtype=np.int64))
    if len(x) == 0:
        raise ModelError("empty batch")
    n = len(x)
    zs, acts = _forward_batch(params, x)
    probs = softmax(acts[-1])
    loss = float(-np.mean(np.log(np.maximum(probs[np.arange(n), y], LOG_CLAMP))))

    delta = probs.copy()
    delta[np.arange(n), y] -= 1.0
    delta /= n
    gw = [None] * len(params.weights)
    gb = [None] * len(params.biases)
    for l in range(len(params.weights) - 1, -1, -1):
        gw[l] = delta.T @ acts[l]
        gb[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ params.weights[l]) * (zs[l - 1] > 0)
    return loss, gw, gb


def sgd_step(params: MlpParams, gw, gb, lr: float) -> None:
    """In-place theta -= lr * grad."""
    for W, b, dW, db in zip(params.weights, params.biases, gw, gb):
        W -= lr * dW
        b -= lr * db


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    epochs: int = 300
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.epochs < 1 or self.batch_size < 1:
            raise ModelError("invalid training config")


@dataclass
class TrainHistory:
    train_loss: list[float] = field(default_factory=list)
    train_accuracy: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    val_accuracy: list[float] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "train_loss": self.train_loss,
            "train_accuracy": self.train_accuracy,
            "val_loss": self.val_loss,
            "val_accuracy": self.val_accuracy,
        }


@dataclass
class EvalReport:
    accuracy: float
    confusion: np.ndarray  # (m, m), row = true class, column = predicted

    def as_dict(self) -> dict:
        return {"accuracy": self.accuracy, "confusion": self.confusion.tolist()}


def _dataset_metrics(params: MlpParams, ds: Dataset) -> tuple[float, float]:
    _, acts = _forward_batch(params, ds.features)
    probs = softmax(acts[-1])
    n = len(ds)
    loss = float(-np.mean(np.log(np.maximum(probs[np.arange(n), ds.labels], LOG_CLAMP))))
    acc = float(np.mean(np.argmax(probs, axis=1) == ds.labels))
    return loss, acc


def train(
    train_set: Dataset,
    val_set: Dataset,
    spec: LayerSpec,
    config: TrainConfig,
) -> tuple[MlpParams, TrainHistory]:
    """Mini-batch SGD with a seeded shuffle per epoch; fully deterministic."""
    if len(train_set) == 0 or len(val_set) == 0:
        raise ModelError("empty dataset")
    if train_set.features.shape[1] != spec.input_len:
        raise ModelError("feature width does not match layer spec")
    params = init_params(spec, config.seed)
    rng = np.random.default_rng(config.seed + 1)
    history = TrainHistory()
    n = len(train_set)
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            loss, gw, gb = loss_and_grad(params, train_set.features[idx], train_set.labels[idx])
            if not np.isfinite(loss):
                raise ModelError(f"training diverged at epoch {epoch}")
            sgd_step(params, gw, gb, config.learning_rate)
        tl, ta = _dataset_metrics(params, train_set)
        vl, va = _dataset_metrics(params, val_set)
        history.train_loss.append(tl)
        history.train_accuracy.append(ta)
        history.val_loss.append(vl)
        history.val_accuracy.append(va)
    return params, history


def evaluate(params: MlpParams, dataset: Dataset) -> EvalReport:
    """Argmax predictions (ties to the lowest class id) with confusion matrix."""
    if len(dataset) == 0:
        raise ModelError("empty dataset")
    _, acts = _forward_batch(params, dataset.features)
    pred = np.argmax(acts[-1], axis=1)  # np.argmax already takes the first maximum
    m = params.spec.num_classes
    confusion = np.zeros((m, m), dtype=np.int64)
    np.add.at(confusion, (dataset.labels, pred), 1)
    accuracy = float(np.trace(confusion) / len(dataset))
    return EvalReport(accuracy, confusion)


def predict(params: MlpParams, features: np.ndarray, threshold: float = 0.0):
    """(label, confidence) from the probability argmax, or None below threshold."""
    if not 0.0 <= threshold <= 1.0:
        raise ModelError("threshold must be in [0, 1]")
    _, probs = forward(params, features)
    label = int(np.argmax(probs))
    confidence = float(probs[label])
    if confidence < threshold:
        return None
    return label, confidence


# --- binary model file (magic TGN1, little-endian) ---------------------------
# header: magic, u32 width count, u32 widths..., u8 activation tag
# body:   per layer, W row-major then b, all float32


def save_params(params: MlpParams, path) -> None:
    with open(path, "wb") as f:
        f.write(MODEL_MAGIC)
        f.write(struct.pack("<I", len(params.spec.sizes)))
        f.write(struct.pack(f"<{len(params.spec.sizes)}I", *params.spec.sizes))
        f.write(struct.pack("<B", ACTIVATIONS.index(params.spec.hidden_activation)))
        for W, b in zip(params.weights, params.biases):
            f.write(W.astype("<f4").tobytes())
            f.write(b.astype("<f4").tobytes())


def load_params(path) -> MlpParams:
    with open(path, "rb") as f:
        data = f.read()
    if data[:4] != MODEL_MAGIC:
        raise ModelError(f"{path}: bad magic")
    try:
        (nw,) = struct.unpack_from("<I", data, 4)
        sizes = struct.unpack_from(f"<{nw}I", data, 8)
        (act,) = struct.unpack_from("<B", data, 8 + 4 * nw)
        spec = LayerSpec(sizes, ACTIVATIONS[act])
        off = 9 + 4 * nw
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            W = np.frombuffer(data, "<f4", fan_out * fan_in, off).reshape(fan_out, fan_in)
            off += 4 * fan_out * fan_in
            b = np.frombuffer(data, "<f4", fan_out, off)
            off += 4 * fan_out
            weights.append(W.astype(np.float64))
            biases.append(b.astype(np.float64))
        if off != len(data):
            raise ModelError(f"{path}: trailing bytes")
    except (struct.error, ValueError, IndexError) as e:
        raise ModelError(f"{path}: truncated or corrupt model file: {e}") from None
    return MlpParams(spec, weights, biases)


def float_payload_bytes(spec: LayerSpec) -> int:
    """Size of the float32 parameter body, excluding the fixed header."""
    return 4 * param_count(spec)
