"""Real-time interaction endpoint speaking newline-free JSON over websockets.

One websocket connection owns one private simulation session. Incoming
messages:

    {"type": "force", "f_h1": <N>, "f_h2": <N, optional>}
    {"type": "reset"}
    {"type": "set_profile", "kind": "sinusoid", "M": <N>, "h": <s>}

The server answers every simulation tick with

    {"type": "state", "t", "s", "q": [...], "zmp", "inside_margin",
     "inside_support", "f_applied", "frames": [[x, z], ...], "failure"}

plus a one-off {"type": "hello", ...} with the model geometry after
connecting. Malformed input gets {"type": "error", "message"} and the
session continues.

Two pacing modes: real time (a 20 Hz wall-clock loop applies queued
commands at tick boundaries in arrival order and streams states) and
lockstep (--fast; every force message advances exactly one tick and is
answered with exactly one state), which makes scripted sessions byte-
reproducible against an equivalent offline episode.
"""

from __future__ import annotations

import functools
import http.server
import json
import math
import queue
import threading
import time
from pathlib import Path

import numpy as np

from .basis import ManifoldSpec
from .model import RobotModel, frame_points
from .simulator import ForceProfile, SimSettings, SimulationError, TickSession, force_profile_eval


def _state_message(session: TickSession, record: dict, model: RobotModel) -> str:
    frames = frame_points(model, record["q"])
    return json.dumps(
        {
            "type": "state",
            "t": record["t"],
            "s": record["s"],
            "q": [float(v) for v in record["q"]],
            "zmp": None if not math.isfinite(record["zmp"]) else record["zmp"],
            "inside_margin": record["inside_margin"],
            "inside_support": record["inside_support"],
            "f_applied": record["f_applied"],
            "frames": [[float(x), float(z)] for x, z in frames],
            "failure": record["failure"],
        },
        sort_keys=True,
    )


def _hello_message(model: RobotModel, manifold: ManifoldSpec, session: TickSession) -> str:
    return json.dumps(
        {
            "type": "hello",
            "f_max": manifold.f_max,
            "delta_margin": list(manifold.delta_margin),
            "foot_extent": list(model.foot_extent),
            "rate": session.settings.control_rate,
            "n_joints": model.n_joints,
        },
        sort_keys=True,
    )


def _error_message(text: str) -> str:
    return json.dumps({"type": "error", "message": text}, sort_keys=True)


class _Session:
    """Per-connection command handling around one TickSession."""

    def __init__(self, model: RobotModel, manifold: ManifoldSpec, settings: SimSettings):
        self.model = model
        self.manifold = manifold
        self.sim = TickSession(model, manifold, settings=settings)
        self.force = (0.0, 0.0)
        self.profile: ForceProfile | None = None
        self.profile_t0: float = 0.0

    def apply(self, msg: dict) -> str | None:
        """Apply one parsed client command; returns an immediate reply or None."""
        kind = msg.get("type")
        if kind == "force":
            f1 = float(msg.get("f_h1", 0.0))
            f2 = float(msg.get("f_h2", 0.0))
            if not (math.isfinite(f1) and math.isfinite(f2)):
                return _error_message("force components must be finite numbers")
            self.profile = None
            self.force = (f1, f2)
            return None
        if kind == "reset":
            self.sim.reset()
            self.force = (0.0, 0.0)
            self.profile = None
            return _state_message(self.sim, self.sim.record(0.0), self.model)
        if kind == "set_profile":
            try:
                samples = msg.get("samples")
                self.profile = ForceProfile(
                    kind=msg.get("kind", "sinusoid"),
                    M=float(msg.get("M", 100.0)),
                    h=float(msg.get("h", 2.0)),
                    samples=np.asarray(samples, float) if samples is not None else None,
                )
            except SimulationError as exc:
                return _error_message(str(exc))
            self.profile_t0 = self.sim.state.t
            return None
        return _error_message(f"unknown message type {kind!r}")

    def current_force(self) -> tuple[float, float]:
        if self.profile is not None:
            t = max(self.sim.state.t - self.profile_t0, 0.0)
            return float(force_profile_eval(self.profile, t)), 0.0
        return self.force

    def tick(self) -> str:
        f1, f2 = self.current_force()
        if self.sim.failure is not None:
            return _state_message(self.sim, self.sim.record(f1), self.model)
        record = self.sim.tick(f1, f_h2=f2)
        return _state_message(self.sim, record, self.model)


def _parse(raw) -> dict | None:
    try:
        msg = json.loads(raw)
    except (json.JSONDecodeError, TypeError):
        return None
    return msg if isinstance(msg, dict) else None


def _handle_fast(ws, session: _Session) -> None:
    """Lockstep: one incoming command, one reply; forces advance one tick."""
    for raw in ws:
        msg = _parse(raw)
        if msg is None:
            ws.send(_error_message("malformed message; expected a JSON object"))
            continue
        reply = session.apply(msg)
        if reply is not None:
            ws.send(reply)
            continue
        ws.send(session.tick())


def _handle_realtime(ws, session: _Session) -> None:
    """Wall-clock loop: commands queue up and apply at tick boundaries."""
    commands: queue.Queue = queue.Queue()
    done = threading.Event()

    def reader():
        try:
            for raw in ws:
                commands.put(raw)
        except Exception:
            pass
        finally:
            done.set()

    thread = threading.Thread(target=reader, daemon=True)
    thread.start()
    tick_dt = session.sim.settings.tick_dt
    next_tick = time.monotonic() + tick_dt
    try:
        while not done.is_set():
            while True:
                try:
                    raw = commands.get_nowait()
                except queue.Empty:
                    break
                msg = _parse(raw)
                if msg is None:
                    ws.send(_error_message("malformed message; expected a JSON object"))
                    continue
                reply = session.apply(msg)
                if reply is not None:
                    ws.send(reply)
            ws.send(session.tick())
            delay = next_tick - time.monotonic()
            if delay > 0:
                time.sleep(delay)
            next_tick += tick_dt
    except Exception:
        pass


def _connection_handler(ws, model, manifold, settings, fast):
    session = _Session(model, manifold, settings)
    ws.send(_hello_message(model, manifold, session.sim))
    if fast:
        _handle_fast(ws, session)
    else:
        _handle_realtime(ws, session)


def _start_ui_server(ui_dir: str, host: str, port: int):
    handler = functools.partial(
        http.server.SimpleHTTPRequestHandler, directory=str(Path(ui_dir).resolve())
    )
    httpd = http.server.ThreadingHTTPServer((host, port), handler)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    return httpd


def serve_forever(
    model: RobotModel,
    manifold: ManifoldSpec,
    settings: SimSettings | None = None,
    host: str = "127.0.0.1",
    port: int = 8765,
    fast: bool = False,
    ui_dir: str | None = None,
    ready: threading.Event | None = None,
    stop: threading.Event | None = None,
) -> None:
    """Run the websocket endpoint until interrupted (or `stop` is set)."""
    from websockets.sync.server import serve

    settings = settings if settings is not None else SimSettings()
    handler = functools.partial(
        _connection_handler,
        model=model, manifold=manifold, settings=settings, fast=fast,
    )
    httpd = None
    if ui_dir:
        httpd = _start_ui_server(ui_dir, host, port + 1)
        print(f"console: http://{host}:{port + 1}/  (websocket ws://{host}:{port})")
    with serve(handler, host, port) as server:
        print(f"serving ws://{host}:{port}  fast={fast}")
        if ready is not None:
            ready.set()
        if stop is None:
            server.serve_forever()
        else:
            waiter = threading.Thread(target=server.serve_forever, daemon=True)
            waiter.start()
            stop.wait()
            server.shutdown()
    if httpd is not None:
        httpd.shutdown()
