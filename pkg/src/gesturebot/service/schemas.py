"""Pydantic request/response models for the lifecycle service."""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field


class GenDataRequest(BaseModel):
    per_class: int = Field(200, ge=1)
    sigma: float = Field(0.02, ge=0)
    seed: int = 0
    out_path: str


class GenDataResponse(BaseModel):
    samples: int
    classes: int
    path: str
    manifest: dict


class TrainRequest(BaseModel):
    data_path: str
    out_path: str
    spec: list[int] = [42, 20, 10, 8]
    seed: int = 0
    val_per_class: int = Field(50, ge=1)
    history_path: Optional[str] = None
    config_path: Optional[str] = None


class TrainResponse(BaseModel):
    model_path: str
    history_path: str
    param_count: int
    final_train_accuracy: float
    final_val_accuracy: float
    val_report: dict
    manifest: dict


class EvalRequest(BaseModel):
    model_path: str
    data_path: str


class EvalResponse(BaseModel):
    accuracy: float
    confusion: list[list[int]]


class QuantizeRequest(BaseModel):
    model_path: str
    calib_path: str
    out_path: str
    sparsity: float = Field(0.0, ge=0, lt=1)


class QuantizeResponse(BaseModel):
    qmodel_path: str
    size_bytes: int
    agreement_vs_float: float
    manifest: dict


class AgreeRequest(BaseModel):
    model_path: str
    qmodel_path: str
    data_path: str


class AgreeResponse(BaseModel):
    agreement: float
    samples: int


class PredictRequest(BaseModel):
    model_path: str
    points: Optional[list[list[float]]] = None  # 21 landmark pairs
    features: Optional[list[float]] = None  # or a ready 42-vector
    threshold: float = Field(0.0, ge=0, le=1)


class PredictResponse(BaseModel):
    label: Optional[int]
    name: Optional[str]
    confidence: float


class ScenarioRequest(BaseModel):
    script: Any = "pick-and-place"  # built-in name, file path, or inline dict
    config_path: Optional[str] = None


class ScenarioResponse(BaseModel):
    success: bool
    phases: list[dict]
    gripper_ok: bool
    expected_grips: list[str]
    observed_grips: list[str]
    safety_events: list[dict]
    violations: int


class BenchRequest(BaseModel):
    model_path: Optional[str] = None
    n_frames: int = Field(300, ge=1)
    seed: int = 0


class HealthResponse(BaseModel):
    status: str
    version: str
