import json
import socket
import threading

import numpy as np
import pytest

websockets = pytest.importorskip("websockets")
from websockets.sync.client import connect

from stancepath import default_model
from stancepath.basis import BernsteinBasis, ManifoldSpec, constant_weights
from stancepath.model import CoordinationMatrix
from stancepath.serve import serve_forever
from stancepath.simulator import ForceProfile, SimSettings, run_episode


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


@pytest.fixture(scope="module")
def model():
    return default_model()


@pytest.fixture(scope="module")
def manifold(model):
    C = CoordinationMatrix.identity(model.n_joints)
    basis = BernsteinBasis(3)
    return ManifoldSpec(
        basis=basis, C=C,
        w=constant_weights(C, basis, model.default_config),
        f_max=200.0, delta_margin=(-0.05, 0.05), hand_displacement_cap=0.1,
        model_fingerprint=model.fingerprint(),
    )


@pytest.fixture()
def server(model, manifold):
    port = free_port()
    ready, stop = threading.Event(), threading.Event()
    thread = threading.Thread(
        target=serve_forever,
        kwargs=dict(
            model=model, manifold=manifold, settings=SimSettings(),
            host="127.0.0.1", port=port, fast=True, ready=ready, stop=stop,
        ),
        daemon=True,
    )
    thread.start()
    assert ready.wait(10), "server did not come up"
    yield f"ws://127.0.0.1:{port}"
    stop.set()
    thread.join(timeout=5)


class TestProtocol:
    def test_hello_then_zero_force_state(self, server, model):
        with connect(server) as ws:
            hello = json.loads(ws.recv())
            assert hello["type"] == "hello"
            assert hello["f_max"] == 200.0
            assert hello["n_joints"] == model.n_joints
            ws.send(json.dumps({"type": "force", "f_h1": 0.0}))
            state = json.loads(ws.recv())
            assert state["type"] == "state"
            assert state["s"] == 0.0
            np.testing.assert_allclose(state["q"], model.default_config, atol=1e-9)
            assert state["inside_support"] is True
            # frame positions included for client-side drawing cross-checks
            assert len(state["frames"]) == model.n_joints + 1

    def test_malformed_message_keeps_session_alive(self, server):
        with connect(server) as ws:
            ws.recv()
            ws.send("{{{ not json")
            err = json.loads(ws.recv())
            assert err["type"] == "error"
            ws.send(json.dumps({"type": "mystery"}))
            err = json.loads(ws.recv())
            assert err["type"] == "error"
            ws.send(json.dumps({"type": "force", "f_h1": 10.0}))
            assert json.loads(ws.recv())["type"] == "state"

    def test_reset_returns_fresh_state(self, server):
        with connect(server) as ws:
            ws.recv()
            for _ in range(3):
                ws.send(json.dumps({"type": "force", "f_h1": 150.0}))
                ws.recv()
            ws.send(json.dumps({"type": "reset"}))
            state = json.loads(ws.recv())
            assert state["type"] == "state"
            assert state["t"] == 0.0
            assert state["s"] == 0.0

    def test_non_finite_force_rejected(self, server):
        with connect(server) as ws:
            ws.recv()
            ws.send('{"type": "force", "f_h1": NaN}')
            reply = json.loads(ws.recv())
            assert reply["type"] == "error"

    def test_ramped_force_walks_s_toward_map(self, server):
        # ramp to 120 N (a step would slam the stationary test manifold);
        # s should rise monotonically to 120/200
        with connect(server) as ws:
            ws.recv()
            s_values = []
            for k in range(40):
                f = min(8.0 * k, 120.0)
                ws.send(json.dumps({"type": "force", "f_h1": f}))
                s_values.append(json.loads(ws.recv())["s"])
        assert s_values[-1] == pytest.approx(0.6, abs=1e-3)
        assert all(b >= a - 1e-12 for a, b in zip(s_values, s_values[1:]))


class TestReplayEquivalence:
    def test_scripted_session_equals_offline_episode(self, server, model, manifold):
        settings = SimSettings()
        tick_dt = settings.tick_dt
        n = 50
        forces = [
            float(120.0 * np.sin(np.pi * k * tick_dt / 3.0)) if k * tick_dt <= 3.0 else 0.0
            for k in range(n)
        ]
        states = []
        with connect(server) as ws:
            ws.recv()
            for f in forces:
                ws.send(json.dumps({"type": "force", "f_h1": f}))
                states.append(json.loads(ws.recv()))
        samples = np.array([[k * tick_dt, f] for k, f in enumerate(forces)])
        profile = ForceProfile(kind="piecewise", samples=samples, duration=n * tick_dt)
        episode = run_episode(model, manifold, profile, settings=settings)
        assert len(episode.t) == n + 1
        for k, st in enumerate(states):
            i = k + 1
            assert abs(st["t"] - episode.t[i]) < 1e-9
            assert abs(st["s"] - episode.s[i]) < 1e-9
            assert abs(st["zmp"] - episode.zmp[i]) < 1e-9
            np.testing.assert_allclose(st["q"], episode.q[i], atol=1e-9)

    def test_set_profile_drives_ticks(self, server):
        with connect(server) as ws:
            ws.recv()
            ws.send(json.dumps({"type": "set_profile", "kind": "sinusoid", "M": 80.0, "h": 1.0}))
            first = json.loads(ws.recv())  # lockstep: the command itself ticks once
            assert first["type"] == "state"
            assert first["f_applied"] == 0.0  # profile starts at zero force
            ws.send(json.dumps({"type": "set_profile", "kind": "sinusoid", "M": 80.0, "h": 1.0}))
            second = json.loads(ws.recv())
            assert second["t"] > first["t"]

    def test_bad_profile_parameters_reported(self, server):
        with connect(server) as ws:
            ws.recv()
            ws.send(json.dumps({"type": "set_profile", "kind": "sinusoid", "M": -5.0}))
            reply = json.loads(ws.recv())
            assert reply["type"] == "error"
