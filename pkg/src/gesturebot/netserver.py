"""TCP server speaking the newline-delimited JSON protocol.

Each direction starts with a hello/version line; a proto mismatch refuses the
connection with a reason.  Inbound frame/gesture_hold messages feed the
pipeline; gesture, jog, state, and safety traffic is fanned out to every
connected client through bounded drop-oldest queues so one slow reader cannot
stall the control loop.
"""

from __future__ import annotations

import socket
import threading
from typing import Optional

from . import wire
from .pipeline import Pipeline, PipelineRunner

FANOUT_TOPICS = ("perception/gesture", "controller/jog", "robot/state", "safety/events")


class _Client:
    def __init__(self, server: "PipelineServer", conn: socket.socket, addr):
        self.server = server
        self.conn = conn
        self.addr = addr
        self.subs = [server.pipeline.bus.subscribe(t, maxsize=256) for t in FANOUT_TOPICS]
        self.send_lock = threading.Lock()
        self.alive = True

    def send(self, msg: dict) -> None:
        try:
            with self.send_lock:
                self.conn.sendall(wire.encode(msg))
        except OSError:
            self.close()

    def close(self) -> None:
        if not self.alive:
            return
        self.alive = False
        for sub in self.subs:
            self.server.pipeline.bus.unsubscribe(sub)
        try:
            self.conn.close()
        except OSError:
            pass
        self.server._remove(self)

    def reader_loop(self) -> None:
        self.send(wire.hello_message())
        buf = b""
        greeted = False
        try:
            while self.alive:
                chunk = self.conn.recv(4096)
                if not chunk:
                    break
                buf += chunk
                while b"\n" in buf:
                    line, buf = buf.split(b"\n", 1)
                    if not line.strip():
                        continue
                    try:
                        msg = wire.parse_client_line(line.decode("utf-8", "replace"))
                    except wire.WireError as e:
                        self.send(wire.error_message(e.code, str(e)))
                        if e.code == "proto_mismatch":
                            self.close()
                            return
                        continue
                    if msg["type"] == "hello":
                        greeted = True
                        continue
                    if not greeted:
                        self.send(wire.error_message("hello_required"))
                        self.close()
                        return
                    self.server.pipeline.submit(msg)
        except OSError:
            pass
        finally:
            self.close()

    def writer_loop(self) -> None:
        while self.alive:
            sent = False
            for sub in self.subs:
                for env in sub.drain():
                    self.send(env.payload)
                    sent = True
            if not sent:
                # short poll keeps worst-case fan-out latency a few ms
                threading.Event().wait(0.004)


class PipelineServer:
    """Owns the pipeline runner thread and the TCP listener."""

    def __init__(self, pipeline: Pipeline, host: str = "127.0.0.1", port: int = 7780):
        self.pipeline = pipeline
        self.runner = PipelineRunner(pipeline)
        self.host = host
        self.port = port
        self._sock: Optional[socket.socket] = None
        self._clients: list[_Client] = []
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self._accept_thread: Optional[threading.Thread] = None

    def start(self) -> None:
        sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        sock.bind((self.host, self.port))
        self.port = sock.getsockname()[1]
        sock.listen(16)
        self._sock = sock
        self.runner.start()
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._accept_thread.start()

    def _accept_loop(self) -> None:
        assert self._sock is not None
        while not self._stop.is_set():
            try:
                conn, addr = self._sock.accept()
            except OSError:
                break
            conn.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            client = _Client(self, conn, addr)
            with self._lock:
                self._clients.append(client)
            threading.Thread(target=client.reader_loop, daemon=True).start()
            threading.Thread(target=client.writer_loop, daemon=True).start()

    def _remove(self, client: _Client) -> None:
        with self._lock:
            if client in self._clients:
                self._clients.remove(client)

    def stop(self) -> None:
        self._stop.set()
        if self._sock is not None:
            try:
                self._sock.close()
            except OSError:
                pass
        with self._lock:
            clients = list(self._clients)
        for c in clients:
            c.close()
        self.runner.stop()
