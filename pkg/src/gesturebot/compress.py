"""Post-training compression: magnitude pruning, per-tensor int8 quantization,
integer inference, and the compact quantized model file.

Weights use symmetric int8 (zero_point 0, scale max|w|/127); activations use
affine int8 calibrated from min/max over a calibration set; biases are int32 at
input_scale * weight_scale.  Pruned zeros are stored densely: at ~1.2k
parameters a sparse encoding would cost more than it saves.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .landmarks import Dataset
from .mlp import ACTIVATIONS, LayerSpec, MlpParams, ModelError, _forward_batch, softmax

QMODEL_MAGIC = b"TGQ1"

QMIN, QMAX = -128, 127


@dataclass(frozen=True)
class PruneConfig:
    target_sparsity: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.target_sparsity < 1.0:
            raise ModelError("target_sparsity must be in [0, 1)")


def prune_magnitude(params: MlpParams, config: PruneConfig) -> MlpParams:
    """Zero the floor(s * size) smallest-|w| entries of each weight matrix.

    Ties break by flat index order (stable sort); biases are left alone.
    """
    out = params.copy()
    for W in out.weights:
        k = int(config.target_sparsity * W.size)
        if k == 0:
            continue
        flat = W.reshape(-1)
        idx = np.argsort(np.abs(flat), kind="stable")[:k]
        flat[idx] = 0.0
    return out


@dataclass
class QuantTensor:
    data: np.ndarray  # int8
    scale: float
    zero_point: int = 0

    def dequantize(self) -> np.ndarray:
        return self.scale * (self.data.astype(np.float64) - self.zero_point)


def _quantize_symmetric(w: np.ndarray) -> QuantTensor:
    amax = float(np.max(np.abs(w))) if w.size else 0.0
    scale = amax / QMAX if amax > 0 else 1.0  # all-zero tensor: scale 1
    q = np.clip(np.rint(w / scale), QMIN, QMAX).astype(np.int8)
    return QuantTensor(q, scale, 0)


def _affine_qparams(lo: float, hi: float) -> tuple[float, int]:
    lo = min(lo, 0.0)
    hi = max(hi, 0.0)
    if hi == lo:
        return 1.0, 0
    scale = (hi - lo) / (QMAX - QMIN)
    zero_point = int(np.clip(np.rint(QMIN - lo / scale), QMIN, QMAX))
    return scale, zero_point


@dataclass
class QuantizedModel:
    spec: LayerSpec
    weights: list[QuantTensor]
    biases: list[np.ndarray]  # int32, scale = act_scale[l] * weight_scale[l]
    act_scales: list[float]  # input activation scale per layer
    act_zero_points: list[int]


def quantize(params: MlpParams, calibration: Dataset) -> QuantizedModel:
    """Build the full-integer model, calibrating activation ranges by running
    the calibration set through the float network."""
    if len(calibration) == 0:
        raise ModelError("empty calibration set")
    if calibration.features.shape[1] != params.spec.input_len:
        raise ModelError("calibration feature width mismatch")
    _, acts = _forward_batch(params, calibration.features)

    qweights, qbiases, scales, zps = [], [], [], []
    for l, (W, b) in enumerate(zip(params.weights, params.biases)):
        qw = _quantize_symmetric(W)
        s_in, zp_in = _affine_qparams(float(acts[l].min()), float(acts[l].max()))
        qb = np.clip(
            np.rint(b / (s_in * qw.scale)), np.iinfo(np.int32).min, np.iinfo(np.int32).max
        ).astype(np.int32)
        qweights.append(qw)
        qbiases.append(qb)
        scales.append(s_in)
        zps.append(zp_in)
    return QuantizedModel(params.spec, qweights, qbiases, scales, zps)


def quantized_forward(qmodel: QuantizedModel, features: np.ndarray):
    """Integer inference: int8 inputs/weights, int32 accumulate, float
    requantization between layers; softmax on the dequantized logits.

    Returns (probabilities, logits).
    """
    x = np.asarray(features, dtype=np.float64)
    if x.shape != (qmodel.spec.input_len,):
        raise ModelError(f"expected {qmodel.spec.input_len} features, got shape {x.shape}")
    n_layers = len(qmodel.weights)
    s, zp = qmodel.act_scales[0], qmodel.act_zero_points[0]
    qa = np.clip(np.rint(x / s) + zp, QMIN, QMAX).astype(np.int32)
    for l in range(n_layers):
        qw = qmodel.weights[l]
        acc = qw.data.astype(np.int32) @ (qa - zp) + qmodel.biases[l]
        real = (s * qw.scale) * acc.astype(np.float64)
        if l == n_layers - 1:
            logits = real
            break
        real = np.maximum(real, 0.0)
        s, zp = qmodel.act_scales[l + 1], qmodel.act_zero_points[l + 1]
        qa = np.clip(np.rint(real / s) + zp, QMIN, QMAX).astype(np.int32)
    return softmax(logits), logits


def quantized_predict(qmodel: QuantizedModel, features, threshold: float = 0.0):
    probs, _ = quantized_forward(qmodel, features)
    label = int(np.argmax(probs))
    confidence = float(probs[label])
    if confidence < threshold:
        return None
    return label, confidence


def agreement_rate(params: MlpParams, qmodel: QuantizedModel, dataset: Dataset) -> float:
    """Fraction of samples where float and quantized argmax agree."""
    if len(dataset) == 0:
        raise ModelError("empty dataset")
    _, acts = _forward_batch(params, dataset.features)
    float_pred = np.argmax(acts[-1], axis=1)
    agree = 0
    for i, row in enumerate(dataset.features):
        _, qlogits = quantized_forward(qmodel, row)
        if int(np.argmax(qlogits)) == float_pred[i]:
            agree += 1
    return agree / len(dataset)


# --- quantized model file (magic TGQ1, little-endian) ------------------------
# header: magic, u32 width count, u32 widths..., u8 activation tag,
#         per layer: f4 weight scale, i4 weight zero_point,
#                    f4 input act scale, i4 input act zero_point
# body:   all int8 weight tensors row-major, then all int32 biases


def save_quantized(qmodel: QuantizedModel, path) -> None:
    sizes = qmodel.spec.sizes
    with open(path, "wb") as f:
        f.write(QMODEL_MAGIC)
        f.write(struct.pack("<I", len(sizes)))
        f.write(struct.pack(f"<{len(sizes)}I", *sizes))
        f.write(struct.pack("<B", ACTIVATIONS.index(qmodel.spec.hidden_activation)))
        for l in range(len(sizes) - 1):
            f.write(
                struct.pack(
                    "<fifi",
                    qmodel.weights[l].scale,
                    qmodel.weights[l].zero_point,
                    qmodel.act_scales[l],
                    qmodel.act_zero_points[l],
                )
            )
        for qw in qmodel.weights:
            f.write(qw.data.astype("<i1").tobytes())
        for qb in qmodel.biases:
            f.write(qb.astype("<i4").tobytes())


def load_quantized(path) -> QuantizedModel:
    with open(path, "rb") as f:
        data = f.read()
    if data[:4] != QMODEL_MAGIC:
        raise ModelError(f"{path}: bad magic")
    try:
        (nw,) = struct.unpack_from("<I", data, 4)
        sizes = struct.unpack_from(f"<{nw}I", data, 8)
        (act,) = struct.unpack_from("<B", data, 8 + 4 * nw)
        spec = LayerSpec(sizes, ACTIVATIONS[act])
        off = 9 + 4 * nw
        wscales, wzps, ascales, azps = [], [], [], []
        for _ in range(len(sizes) - 1):
            ws, wz, as_, az = struct.unpack_from("<fifi", data, off)
            off += 16
            wscales.append(ws)
            wzps.append(wz)
            ascales.append(as_)
            azps.append(az)
        weights, biases = [], []
        for l, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            q = np.frombuffer(data, "<i1", fan_out * fan_in, off).reshape(fan_out, fan_in)
            off += fan_out * fan_in
            weights.append(QuantTensor(q.copy(), wscales[l], wzps[l]))
        for fan_out in sizes[1:]:
            b = np.frombuffer(data, "<i4", fan_out, off)
            off += 4 * fan_out
            biases.append(b.astype(np.int32))
        if off != len(data):
            raise ModelError(f"{path}: trailing bytes")
    except (struct.error, ValueError) as e:
        raise ModelError(f"{path}: truncated or corrupt model file: {e}") from None
    return QuantizedModel(spec, weights, biases, ascales, azps)


def model_size_bytes(path) -> int:
    import os

    return os.path.getsize(path)
