"""FastAPI service wrapping the core package.

REST endpoints cover the full lifecycle (data generation, training,
evaluation, compression, scenarios, benchmarks); paths in requests are
server-side.  When a live pipeline is attached (the `serve` command), /ws
speaks the same newline-delimited JSON protocol as the TCP port so browser
clients can drive the robot, and the operator console is served as static
files.
"""

from __future__ import annotations

import asyncio
import json
from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .. import __version__, ops, wire
from ..appconfig import AppConfig
from ..kinematics import UR5_DH
from ..landmarks import LandmarkFrame, gesture_name, normalize_frame
from ..pipeline import Pipeline
from . import schemas

FANOUT_TOPICS = ("perception/gesture", "controller/jog", "robot/state", "safety/events")


def create_app(pipeline: Optional[Pipeline] = None, console_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="gesturebot", version=__version__)
    app.state.pipeline = pipeline

    def _run(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except FileNotFoundError as e:
            raise HTTPException(status_code=400, detail=f"missing file: {e}") from e
        except ValueError as e:
            raise HTTPException(status_code=400, detail=str(e)) from e

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/dh")
    def dh_table():
        return {"a": list(UR5_DH.a), "d": list(UR5_DH.d), "alpha": list(UR5_DH.alpha)}

    @app.post("/dataset/generate", response_model=schemas.GenDataResponse)
    def gen_data(req: schemas.GenDataRequest):
        return _run(ops.gen_data, req.per_class, req.sigma, req.seed, req.out_path)

    @app.post("/train", response_model=schemas.TrainResponse)
    def train(req: schemas.TrainRequest):
        config = _run(AppConfig.load, req.config_path)
        return _run(
            ops.train_model,
            req.data_path,
            req.out_path,
            tuple(req.spec),
            req.seed,
            req.val_per_class,
            config,
            req.history_path,
        )

    @app.post("/eval", response_model=schemas.EvalResponse)
    def eval_(req: schemas.EvalRequest):
        return _run(ops.eval_model, req.model_path, req.data_path)

    @app.post("/quantize", response_model=schemas.QuantizeResponse)
    def quantize(req: schemas.QuantizeRequest):
        return _run(ops.quantize_model, req.model_path, req.calib_path, req.out_path, req.sparsity)

    @app.post("/agree", response_model=schemas.AgreeResponse)
    def agree(req: schemas.AgreeRequest):
        return _run(ops.agreement, req.model_path, req.qmodel_path, req.data_path)

    @app.post("/predict", response_model=schemas.PredictResponse)
    def predict(req: schemas.PredictRequest):
        if (req.points is None) == (req.features is None):
            raise HTTPException(status_code=400, detail="give exactly one of points/features")
        if req.points is not None:
            pts = np.asarray(req.points, dtype=np.float64)
            frame = _run(LandmarkFrame, timestamp=0.0, points=pts[:, :2] if pts.ndim == 2 else pts)
            features = normalize_frame(frame)
        else:
            features = np.asarray(req.features, dtype=np.float64)
        predictor = _run(ops.make_predictor, req.model_path, req.threshold)
        result = _run(predictor, features)
        if result is None:
            return {"label": None, "name": None, "confidence": 0.0}
        label, conf = result
        return {"label": label, "name": gesture_name(label), "confidence": conf}

    @app.post("/scenario", response_model=schemas.ScenarioResponse)
    def scenario(req: schemas.ScenarioRequest):
        config = _run(AppConfig.load, req.config_path)
        return _run(ops.sim_scenario, req.script, config)

    @app.post("/bench")
    def bench(req: schemas.BenchRequest):
        return _run(ops.bench, req.model_path, req.n_frames, req.seed)

    @app.get("/latency")
    def latency(window: int = 300):
        if app.state.pipeline is None:
            raise HTTPException(status_code=400, detail="no live pipeline")
        return _run(app.state.pipeline.measure_latency, window)

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        pipeline: Optional[Pipeline] = app.state.pipeline
        if pipeline is None:
            await ws.send_text(json.dumps(wire.error_message("no_pipeline")))
            await ws.close()
            return
        await ws.send_text(json.dumps(wire.hello_message()))
        subs = [pipeline.bus.subscribe(t, maxsize=256) for t in FANOUT_TOPICS]

        async def fanout():
            try:
                while True:
                    sent = False
                    for sub in subs:
                        for env in sub.drain():
                            await ws.send_text(json.dumps(env.payload))
                            sent = True
                    if not sent:
                        await asyncio.sleep(0.004)
            except Exception:
                pass

        task = asyncio.create_task(fanout())
        try:
            while True:
                line = await ws.receive_text()
                try:
                    msg = wire.parse_client_line(line)
                except wire.WireError as e:
                    await ws.send_text(json.dumps(wire.error_message(e.code, str(e))))
                    if e.code == "proto_mismatch":
                        break
                    continue
                if msg["type"] != "hello":
                    pipeline.submit(msg)
        except WebSocketDisconnect:
            pass
        finally:
            task.cancel()
            for sub in subs:
                pipeline.bus.unsubscribe(sub)

    if console_dir and Path(console_dir).is_dir():
        app.mount("/", StaticFiles(directory=console_dir, html=True), name="console")

    return app
