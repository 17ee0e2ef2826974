"""Drive the real-time endpoint with a scripted client.

Starts the websocket server in lockstep mode, connects, plays a recorded
pull, and prints the streamed states. The browser console under
frontend/ speaks exactly this protocol; run

    stancepath serve --manifold <manifold.json> --ui frontend/dist

to drive the robot by hand instead.
"""

import json
import threading

import numpy as np

from stancepath import default_model
from stancepath.planner import PlannerProblem, solve_manifold
from stancepath.serve import serve_forever
from stancepath.simulator import SimSettings

model = default_model()
problem = PlannerProblem(model=model)
manifold, report = solve_manifold(problem, "robust")
assert report.converged

settings = SimSettings()
ready, stop = threading.Event(), threading.Event()
server = threading.Thread(
    target=serve_forever,
    kwargs=dict(model=model, manifold=manifold, settings=settings,
                host="127.0.0.1", port=8765, fast=True, ready=ready, stop=stop),
    daemon=True,
)
server.start()
ready.wait(5)

from websockets.sync.client import connect

tick = settings.tick_dt
with connect("ws://127.0.0.1:8765") as ws:
    hello = json.loads(ws.recv())
    print(f"connected: {hello['n_joints']} joints, f_max {hello['f_max']} N, "
          f"margin {hello['delta_margin']}")
    print(f"\n{'t [s]':>6} {'pull [N]':>9} {'s':>6} {'zmp [m]':>8} {'ok':>4}")
    for k in range(120):
        t = k * tick
        f = 160.0 * np.sin(np.pi * t / 5.0) if t <= 5.0 else 0.0
        ws.send(json.dumps({"type": "force", "f_h1": f}))
        state = json.loads(ws.recv())
        if k % 10 == 0:
            print(f"{state['t']:6.2f} {state['f_applied']:9.1f} {state['s']:6.3f} "
                  f"{state['zmp']:+8.4f} {'ok' if state['inside_support'] else 'FALL':>4}")
stop.set()
print("\nsession closed")
