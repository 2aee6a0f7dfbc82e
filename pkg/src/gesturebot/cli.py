"""Command-line entry point.

All lifecycle commands are thin clients of the FastAPI service: by default
they talk to an in-process app (no network), with `--url` to target a running
server instead.  `serve` is the long-running command that owns the pipeline,
the TCP protocol port, and the HTTP/WebSocket side.
"""

from __future__ import annotations

import argparse
import json
import sys
import time


def _client(url):
    if url:
        import httpx

        return httpx.Client(base_url=url, timeout=300.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from fastapi.testclient import TestClient

    from .service import create_app

    return TestClient(create_app())


def _call(args, method: str, path: str, body=None, query=None) -> int:
    with _client(args.url) as client:
        resp = client.request(method, path, json=body, params=query)
    try:
        payload = resp.json()
    except ValueError:
        payload = {"detail": resp.text}
    if resp.status_code >= 500:
        print(f"error: {payload.get('detail', resp.text)}", file=sys.stderr)
        return 2
    if resp.status_code >= 400:
        print(f"error: {payload.get('detail', resp.text)}", file=sys.stderr)
        return 1
    if not args.quiet:
        print(json.dumps(payload, indent=2))
    return 0


def cmd_gen_data(args) -> int:
    return _call(args, "POST", "/dataset/generate", {
        "per_class": args.per_class,
        "sigma": args.sigma,
        "seed": args.seed,
        "out_path": args.output,
    })


def cmd_train(args) -> int:
    spec = [int(s) for s in args.spec.split(",")]
    return _call(args, "POST", "/train", {
        "data_path": args.input,
        "out_path": args.output,
        "spec": spec,
        "seed": args.seed,
        "val_per_class": args.val_per_class,
        "config_path": args.config,
    })


def cmd_eval(args) -> int:
    return _call(args, "POST", "/eval", {"model_path": args.model, "data_path": args.input})


def cmd_quantize(args) -> int:
    return _call(args, "POST", "/quantize", {
        "model_path": args.input,
        "calib_path": args.calib,
        "out_path": args.output,
        "sparsity": args.sparsity,
    })


def cmd_agree(args) -> int:
    return _call(args, "POST", "/agree", {
        "model_path": args.model,
        "qmodel_path": args.qmodel,
        "data_path": args.input,
    })


def cmd_sim(args) -> int:
    # built-in names and file paths both pass through; the service resolves them
    return _call(args, "POST", "/scenario", {"script": args.script, "config_path": args.config})


def cmd_bench(args) -> int:
    return _call(args, "POST", "/bench", {
        "model_path": args.model,
        "n_frames": args.frames,
        "seed": args.seed,
    })


def cmd_serve(args) -> int:
    import uvicorn

    from .appconfig import AppConfig
    from .netserver import PipelineServer
    from .ops import make_predictor
    from .pipeline import Pipeline
    from .service import create_app

    config = AppConfig.load(args.config, args.gesture_map)
    predictor = make_predictor(args.model)
    pipeline = Pipeline(predictor, config.pipeline())
    if not args.quiet:
        print("active gesture map:")
        print(config.controller().describe_map())
    server = PipelineServer(pipeline, host=args.host, port=args.port)
    server.start()
    if not args.quiet:
        print(f"protocol port: tcp {args.host}:{server.port}")
    app = create_app(pipeline, console_dir=args.console)
    try:
        if args.http_port is not None:
            if not args.quiet:
                print(f"http/ws port: {args.host}:{args.http_port}")
            uvicorn.run(app, host=args.host, port=args.http_port, log_level="warning")
        else:
            while True:
                time.sleep(3600)
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gesturebot", description=__doc__)
    p.add_argument("--url", help="remote service URL (default: in-process)")
    p.add_argument("--config", help="key=value config file overriding defaults")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quiet", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-data", help="generate a synthetic landmark dataset CSV")
    g.add_argument("--per-class", type=int, default=200)
    g.add_argument("--sigma", type=float, default=0.02)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(fn=cmd_gen_data)

    t = sub.add_parser("train", help="train the classifier on a dataset CSV")
    t.add_argument("-i", "--input", required=True)
    t.add_argument("-o", "--output", required=True)
    t.add_argument("--spec", default="42,20,10,8")
    t.add_argument("--val-per-class", type=int, default=50)
    t.set_defaults(fn=cmd_train)

    e = sub.add_parser("eval", help="evaluate a model (.tgn or .tgq) on a dataset")
    e.add_argument("-m", "--model", required=True)
    e.add_argument("-i", "--input", required=True)
    e.set_defaults(fn=cmd_eval)

    q = sub.add_parser("quantize", help="prune/quantize a float model to int8")
    q.add_argument("-i", "--input", required=True)
    q.add_argument("--calib", required=True)
    q.add_argument("-o", "--output", required=True)
    q.add_argument("--sparsity", type=float, default=0.0)
    q.set_defaults(fn=cmd_quantize)

    a = sub.add_parser("agree", help="float vs quantized argmax agreement")
    a.add_argument("-m", "--model", required=True)
    a.add_argument("-q", "--qmodel", required=True)
    a.add_argument("-i", "--input", required=True)
    a.set_defaults(fn=cmd_agree)

    s = sub.add_parser("sim", help="run a headless scenario script")
    s.add_argument("--script", default="pick-and-place",
                   help="built-in name (pick-and-place, limit-seek) or JSON file")
    s.set_defaults(fn=cmd_sim)

    b = sub.add_parser("bench", help="latency benchmark of the live path")
    b.add_argument("-m", "--model", default=None)
    b.add_argument("--frames", type=int, default=300)
    b.set_defaults(fn=cmd_bench)

    sv = sub.add_parser("serve", help="run the pipeline with TCP and HTTP/WS endpoints")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=7780, help="TCP protocol port")
    sv.add_argument("--http-port", type=int, default=None, help="REST/WS/console port")
    sv.add_argument("-m", "--model", default=None, help="classifier model (.tgn or .tgq)")
    sv.add_argument("--console", default=None, help="static console asset directory")
    sv.add_argument("--gesture-map", default=None, help="label_id = intent map file")
    sv.set_defaults(fn=cmd_serve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # runtime failure
        print(f"runtime error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
