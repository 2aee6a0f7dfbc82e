"""Hand-landmark domain types, wrist-relative features, and dataset handling.

A frame is 21 tracked keypoints in normalized image coordinates (index 0 is
the wrist).  Features are the wrist-relative coordinates of all 21 points
flattened to 42 floats, so the whole pipeline is invariant to where the hand
sits in the image.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

NUM_LANDMARKS = 21
FEATURE_LEN = 2 * NUM_LANDMARKS
NUM_CLASSES = 8

GESTURE_NAMES = (
    "Fist",
    "OpenPalm",
    "PointUp",
    "PointDown",
    "PointLeft",
    "PointRight",
    "Peace",
    "ThumbUp",
)

HANDEDNESS = ("left", "right", "unknown")


class FrameError(ValueError):
    """Raised for malformed landmark frames."""


class DatasetError(ValueError):
    """Raised for malformed dataset files or invalid split requests."""


def gesture_name(label_id: int) -> str:
    if not 0 <= label_id < NUM_CLASSES:
        raise ValueError(f"gesture label id out of range: {label_id}")
    return GESTURE_NAMES[label_id]


def gesture_id(name: str) -> int:
    try:
        return GESTURE_NAMES.index(name)
    except ValueError:
        raise ValueError(f"unknown gesture name: {name!r}") from None


@dataclass(frozen=True)
class LandmarkFrame:
    """One timestamped set of 21 hand landmarks.

    `points` is a (21, 2) float array; `timestamp` is milliseconds since the
    stream epoch.  Any z coordinate from the provider is dropped before
    construction; features are strictly two-dimensional.
    """

    timestamp: float
    points: np.ndarray
    handedness: str = "unknown"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.shape != (NUM_LANDMARKS, 2):
            raise FrameError(
                f"frame needs {NUM_LANDMARKS} (x, y) points, got shape {pts.shape}"
            )
        if not np.all(np.isfinite(pts)):
            raise FrameError("frame contains non-finite coordinates")
        if self.handedness not in HANDEDNESS:
            raise FrameError(f"bad handedness tag: {self.handedness!r}")
        object.__setattr__(self, "points", pts)


def normalize_frame(frame: LandmarkFrame, scale_normalize: bool = False) -> np.ndarray:
    """Wrist-relative feature vector: (x_i - x_0, y_i - y_0) flattened to 42 floats.

    The wrist's own pair is kept as a constant (0, 0) so the vector width
    matches the classifier input.  Translation of every point by the same
    offset leaves the output unchanged.  `scale_normalize` additionally
    divides by the max absolute coordinate (off by default: plain
    wrist-relative offsets carry no scale correction).
    """
    rel = frame.points - frame.points[0]
    if scale_normalize:
        amax = np.abs(rel).max()
        if amax > 0:
            rel = rel / amax
    return rel.reshape(FEATURE_LEN).copy()


@dataclass
class Dataset:
    """Labeled feature vectors for training/evaluation."""

    features: np.ndarray  # (n, 42) float64
    labels: np.ndarray  # (n,) int
    class_count: int = NUM_CLASSES

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64).reshape(-1, FEATURE_LEN)
        self.labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if len(self.features) != len(self.labels):
            raise DatasetError("features/labels length mismatch")
        if len(self.labels) and self.labels.max() >= self.class_count:
            raise DatasetError(
                f"label {int(self.labels.max())} >= class_count {self.class_count}"
            )
        if len(self.labels) and self.labels.min() < 0:
            raise DatasetError("negative label")

    def __len__(self) -> int:
        return len(self.labels)

    def per_class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.class_count)


_CSV_HEADER = "label," + ",".join(f"f{i}" for i in range(FEATURE_LEN))


def write_dataset(dataset: Dataset, path) -> None:
    """CSV: header `label,f0,...,f41`, floats at 9 significant digits, LF endings."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(_CSV_HEADER + "\n")
        for label, row in zip(dataset.labels, dataset.features):
            f.write(str(int(label)) + "," + ",".join(f"{v:.9g}" for v in row) + "\n")


def read_dataset(path, class_count: int = NUM_CLASSES) -> Dataset:
    features = []
    labels = []
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().rstrip("\n")
        if header != _CSV_HEADER:
            raise DatasetError(f"{path}:1: bad header")
        for lineno, line in enumerate(f, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != FEATURE_LEN + 1:
                raise DatasetError(
                    f"{path}:{lineno}: expected {FEATURE_LEN + 1} fields, got {len(parts)}"
                )
            try:
                label = int(parts[0])
                row = [float(p) for p in parts[1:]]
            except ValueError as e:
                raise DatasetError(f"{path}:{lineno}: {e}") from None
            if not 0 <= label < class_count:
                raise DatasetError(f"{path}:{lineno}: label {label} out of range")
            if not all(math.isfinite(v) for v in row):
                raise DatasetError(f"{path}:{lineno}: non-finite feature")
            labels.append(label)
            features.append(row)
    if not features:
        features = np.empty((0, FEATURE_LEN))
    return Dataset(np.array(features), np.array(labels, dtype=np.int64), class_count)


def split_dataset(dataset: Dataset, val_per_class: int, seed: int) -> tuple[Dataset, Dataset]:
    """Draw `val_per_class` samples per class (seeded, without replacement) for
    validation; the remainder is the training set.  Deterministic for a fixed seed."""
    if val_per_class < 0:
        raise DatasetError("val_per_class must be >= 0")
    rng = np.random.default_rng(seed)
    val_mask = np.zeros(len(dataset), dtype=bool)
    for c in range(dataset.class_count):
        idx = np.flatnonzero(dataset.labels == c)
        if len(idx) < val_per_class:
            raise DatasetError(
                f"class {c} ({gesture_name(c)}) has {len(idx)} samples, "
                f"need >= {val_per_class}"
            )
        chosen = rng.choice(idx, size=val_per_class, replace=False)
        val_mask[chosen] = True
    train = Dataset(dataset.features[~val_mask], dataset.labels[~val_mask], dataset.class_count)
    val = Dataset(dataset.features[val_mask], dataset.labels[val_mask], dataset.class_count)
    return train, val


_templates_cache: dict[str, np.ndarray] | None = None


def gesture_templates() -> dict[str, np.ndarray]:
    """The 8 canonical 21-point hand skeletons used for synthetic data.

    Shipped as a versioned JSON asset; each is a (21, 2) array in normalized
    image coordinates.
    """
    global _templates_cache
    if _templates_cache is None:
        raw = json.loads(
            resources.files("gesturebot.data").joinpath("templates.json").read_text()
        )
        _templates_cache = {
            name: np.array(pts, dtype=np.float64) for name, pts in raw["templates"].items()
        }
        assert set(_templates_cache) == set(GESTURE_NAMES)
    return _templates_cache


def generate_synthetic_dataset(
    per_class: int, jitter_sigma: float, seed: int
) -> Dataset:
    """Synthetic stand-in for a recorded landmark dataset.

    Each sample is a class template with i.i.d. Gaussian jitter on every
    coordinate plus a random global translation, run through normalize_frame
    (so the translation carries no information).
    """
    if per_class < 1:
        raise DatasetError("per_class must be >= 1")
    if jitter_sigma < 0:
        raise DatasetError("jitter_sigma must be >= 0")
    rng = np.random.default_rng(seed)
    templates = gesture_templates()
    feats = np.empty((NUM_CLASSES * per_class, FEATURE_LEN))
    labels = np.empty(NUM_CLASSES * per_class, dtype=np.int64)
    i = 0
    for label_id, name in enumerate(GESTURE_NAMES):
        base = templates[name]
        for _ in range(per_class):
            pts = base + rng.normal(0.0, jitter_sigma, size=base.shape)
            pts = pts + rng.uniform(-0.1, 0.1, size=(1, 2))
            frame = LandmarkFrame(timestamp=0.0, points=pts)
            feats[i] = normalize_frame(frame)
            labels[i] = label_id
            i += 1
    return Dataset(feats, labels, NUM_CLASSES)
