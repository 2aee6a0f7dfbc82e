"""Lifecycle operations behind the service endpoints: data generation,
training, evaluation, compression, scenario runs, and benchmarking.

Every file-producing operation writes a run manifest next to its primary
output (command, parameters, seeds, content hashes, timing) so any result can
be reproduced from disk.
"""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path
from typing import Optional

import numpy as np

from . import compress, landmarks, mlp
from .appconfig import AppConfig
from .pipeline import Pipeline
from .scenario import (
    ScenarioScript,
    limit_seeking_script,
    pick_and_place_script,
    run_scenario,
)


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(command: str, params: dict, inputs: list, outputs: list, elapsed: float) -> dict:
    manifest = {
        "command": command,
        "params": params,
        "inputs": {str(p): _sha256(p) for p in inputs if Path(p).exists()},
        "outputs": {str(p): _sha256(p) for p in outputs},
        "elapsed_s": round(elapsed, 4),
        "created": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    if outputs:
        dest = Path(str(outputs[0]) + ".manifest.json")
        dest.write_text(json.dumps(manifest, indent=2) + "\n")
        manifest["manifest_path"] = str(dest)
    return manifest


def gen_data(per_class: int, sigma: float, seed: int, out_path: str) -> dict:
    t0 = time.perf_counter()
    ds = landmarks.generate_synthetic_dataset(per_class, sigma, seed)
    landmarks.write_dataset(ds, out_path)
    manifest = write_manifest(
        "gen-data",
        {"per_class": per_class, "sigma": sigma, "seed": seed},
        [],
        [out_path],
        time.perf_counter() - t0,
    )
    return {"samples": len(ds), "classes": ds.class_count, "path": out_path, "manifest": manifest}


def train_model(
    data_path: str,
    out_path: str,
    spec_sizes: tuple[int, ...] = mlp.DEFAULT_SIZES,
    seed: int = 0,
    val_per_class: int = 50,
    config: Optional[AppConfig] = None,
    history_path: Optional[str] = None,
) -> dict:
    t0 = time.perf_counter()
    config = config or AppConfig()
    ds = landmarks.read_dataset(data_path)
    train_set, val_set = landmarks.split_dataset(ds, val_per_class, seed)
    spec = mlp.LayerSpec(spec_sizes)
    params, history = mlp.train(train_set, val_set, spec, config.train(seed))
    mlp.save_params(params, out_path)
    if history_path is None:
        history_path = str(Path(out_path).with_suffix(".history.json"))
    Path(history_path).write_text(json.dumps(history.as_dict()) + "\n")
    report = mlp.evaluate(params, val_set)
    manifest = write_manifest(
        "train",
        {"spec": list(spec.sizes), "seed": seed, "val_per_class": val_per_class,
         "train_config": vars(config.train(seed))},
        [data_path],
        [out_path, history_path],
        time.perf_counter() - t0,
    )
    return {
        "model_path": out_path,
        "history_path": history_path,
        "param_count": mlp.param_count(spec),
        "final_train_accuracy": history.train_accuracy[-1],
        "final_val_accuracy": history.val_accuracy[-1],
        "val_report": report.as_dict(),
        "manifest": manifest,
    }


def eval_model(model_path: str, data_path: str) -> dict:
    ds = landmarks.read_dataset(data_path)
    if model_path.endswith(".tgq"):
        qm = compress.load_quantized(model_path)
        pred = np.array(
            [compress.quantized_predict(qm, row)[0] for row in ds.features], dtype=np.int64
        )
        m = qm.spec.num_classes
        confusion = np.zeros((m, m), dtype=np.int64)
        np.add.at(confusion, (ds.labels, pred), 1)
        return {"accuracy": float(np.trace(confusion) / len(ds)), "confusion": confusion.tolist()}
    params = mlp.load_params(model_path)
    return mlp.evaluate(params, ds).as_dict()


def quantize_model(
    model_path: str, calib_path: str, out_path: str, sparsity: float = 0.0
) -> dict:
    t0 = time.perf_counter()
    params = mlp.load_params(model_path)
    calib = landmarks.read_dataset(calib_path)
    if sparsity > 0:
        params = compress.prune_magnitude(params, compress.PruneConfig(sparsity))
    qm = compress.quantize(params, calib)
    compress.save_quantized(qm, out_path)
    size = compress.model_size_bytes(out_path)
    agreement = compress.agreement_rate(params, qm, calib)
    manifest = write_manifest(
        "quantize",
        {"sparsity": sparsity},
        [model_path, calib_path],
        [out_path],
        time.perf_counter() - t0,
    )
    return {
        "qmodel_path": out_path,
        "size_bytes": size,
        "agreement_vs_float": agreement,
        "manifest": manifest,
    }


def agreement(model_path: str, qmodel_path: str, data_path: str) -> dict:
    params = mlp.load_params(model_path)
    qm = compress.load_quantized(qmodel_path)
    ds = landmarks.read_dataset(data_path)
    return {"agreement": compress.agreement_rate(params, qm, ds), "samples": len(ds)}


def make_predictor(model_path: Optional[str], threshold: float = 0.0):
    """Classifier callable for the pipeline; quantized path when given a .tgq."""
    if model_path is None:
        return lambda features: None
    if model_path.endswith(".tgq"):
        qm = compress.load_quantized(model_path)
        return lambda features: compress.quantized_predict(qm, features, threshold)
    params = mlp.load_params(model_path)
    return lambda features: mlp.predict(params, features, threshold)


def load_script(spec) -> ScenarioScript:
    """Named built-in scripts or a JSON entry list."""
    if spec == "pick-and-place":
        return pick_and_place_script()
    if spec == "limit-seek":
        return limit_seeking_script()
    if isinstance(spec, str):
        data = json.loads(Path(spec).read_text())
    else:
        data = spec
    entries = [(float(t), None if lab is None else int(lab)) for t, lab in data["entries"]]
    return ScenarioScript(entries, float(data["end_ms"]))


def sim_scenario(script_spec, config: Optional[AppConfig] = None) -> dict:
    config = config or AppConfig()
    script = load_script(script_spec)
    result = run_scenario(script, config.pipeline())
    return result.as_dict()


def bench(model_path: Optional[str] = None, n_frames: int = 300, seed: int = 0) -> dict:
    """Latency benchmark: synthetic template frames through the live classify
    and control path, one frame per tick, reporting per-stage percentiles."""
    if model_path is None:
        predictor = _default_quantized_predictor(seed)
    else:
        predictor = make_predictor(model_path)
    pipeline = Pipeline(predictor)
    rng = np.random.default_rng(seed)
    templates = list(landmarks.gesture_templates().values())
    dt_ms = pipeline.config.sim.dt * 1e3
    for n in range(n_frames):
        pts = templates[n % len(templates)] + rng.normal(0, 0.01, size=(21, 2))
        pipeline.submit({"type": "frame", "t": n * dt_ms, "pts": pts.tolist()})
        pipeline.tick(n * dt_ms)
    return pipeline.measure_latency(n_frames)


def _default_quantized_predictor(seed: int):
    """Train + quantize a throwaway default model on synthetic data."""
    ds = landmarks.generate_synthetic_dataset(100, 0.02, seed)
    train_set, val_set = landmarks.split_dataset(ds, 25, seed)
    params, _ = mlp.train(train_set, val_set, mlp.LayerSpec(), mlp.TrainConfig(epochs=60, seed=seed))
    qm = compress.quantize(params, train_set)
    return lambda features: compress.quantized_predict(qm, features)
