// Console wiring: connection, force inputs (slider and hand drag), render
// loop. Physics lives entirely on the server; this file only routes
// events and draws the latest reported state.

import { Connection } from "./connection.js";
import { History } from "./history.js";
import { forwardFrames, maxFrameDeviation, Point } from "./kinematics.js";
import {
  clampForce,
  encodeForce,
  encodeReset,
  HelloMessage,
  ServerMessage,
  StateMessage,
} from "./protocol.js";
import { drawScene, HEIGHT, Scene, screenToWorld, WIDTH, worldToScreen } from "./render.js";
import { Throttle } from "./throttle.js";

const SEND_HZ = 20;
const DRAG_NEWTONS_PER_METER = 400;

const canvas = document.getElementById("view") as HTMLCanvasElement;
canvas.width = WIDTH;
canvas.height = HEIGHT;
const ctx = canvas.getContext("2d") as CanvasRenderingContext2D;

const slider = document.getElementById("force") as HTMLInputElement;
const sliderLabel = document.getElementById("force-label") as HTMLElement;
const resetButton = document.getElementById("reset") as HTMLButtonElement;
const advancedToggle = document.getElementById("advanced") as HTMLInputElement;
const verticalSlider = document.getElementById("vertical") as HTMLInputElement;
const verticalRow = document.getElementById("vertical-row") as HTMLElement;

const scene: Scene = {
  hello: null,
  state: null,
  history: new History(240),
  connected: false,
  inputForce: 0,
  verticalForce: 0,
};

const wsUrl = (() => {
  const params = new URLSearchParams(window.location.search);
  const explicit = params.get("ws");
  if (explicit) {
    return explicit;
  }
  // the default pairing: ui on port+1, websocket on port
  const port = Number(window.location.port || "8766") - 1;
  return `ws://${window.location.hostname || "127.0.0.1"}:${port}`;
})();

const sendForce = new Throttle<[number, number]>(1000 / SEND_HZ, ([f1, f2]) => {
  connection.send(encodeForce(f1, f2));
});

function pushForce(): void {
  sendForce.call([scene.inputForce, scene.verticalForce]);
}

const connection = new Connection(wsUrl, {
  onMessage(msg: ServerMessage): void {
    if (msg.type === "hello") {
      onHello(msg);
    } else if (msg.type === "state") {
      onState(msg);
    } else {
      console.warn("server error:", msg.message);
    }
  },
  onStatus(connected: boolean): void {
    scene.connected = connected;
  },
});

function onHello(msg: HelloMessage): void {
  scene.hello = msg;
  slider.max = String(1.25 * msg.f_max);
  verticalSlider.min = String(-0.25 * msg.f_max);
  verticalSlider.max = String(0.25 * msg.f_max);
  // hold the current force at the server rate so the session keeps ticking
  window.setInterval(pushForce, 1000 / SEND_HZ);
}

function onState(msg: StateMessage): void {
  scene.state = msg;
  scene.history.push({ t: msg.t, f: msg.f_applied, zmp: msg.zmp, s: msg.s });
  if (scene.hello && msg.q.length === scene.hello.n_joints) {
    // drawing cross-check: our client-side chain must match the server's
    const lengths = linkLengthsFromFrames(msg.frames);
    const local = forwardFrames(lengths, msg.q);
    if (maxFrameDeviation(local, msg.frames) > 1e-6) {
      console.warn("client kinematics deviate from server frames");
    }
  }
}

function linkLengthsFromFrames(frames: Point[]): number[] {
  const lengths: number[] = [];
  for (let i = 1; i < frames.length; i++) {
    lengths.push(Math.hypot(frames[i][0] - frames[i - 1][0], frames[i][1] - frames[i - 1][1]));
  }
  return lengths;
}

// -- inputs ----------------------------------------------------------------

slider.addEventListener("input", () => {
  const fMax = scene.hello ? scene.hello.f_max : 200;
  scene.inputForce = clampForce(Number(slider.value), fMax);
  sliderLabel.textContent = `${scene.inputForce.toFixed(0)} N`;
  pushForce();
});

resetButton.addEventListener("click", () => {
  scene.inputForce = 0;
  scene.verticalForce = 0;
  slider.value = "0";
  verticalSlider.value = "0";
  sliderLabel.textContent = "0 N";
  scene.history.clear();
  connection.send(encodeReset());
});

advancedToggle.addEventListener("change", () => {
  verticalRow.style.display = advancedToggle.checked ? "flex" : "none";
  if (!advancedToggle.checked) {
    scene.verticalForce = 0;
    verticalSlider.value = "0";
  }
});

verticalSlider.addEventListener("input", () => {
  scene.verticalForce = Number(verticalSlider.value);
  pushForce();
});

// click-drag on the hand: pulling it forward maps displacement to force
let dragging = false;
let dragOrigin: Point | null = null;

canvas.addEventListener("pointerdown", (ev) => {
  if (!scene.state) {
    return;
  }
  const rect = canvas.getBoundingClientRect();
  const sx = ((ev.clientX - rect.left) / rect.width) * WIDTH;
  const sy = ((ev.clientY - rect.top) / rect.height) * HEIGHT;
  const hand = scene.state.frames[scene.state.frames.length - 1];
  const [hx, hy] = worldToScreen(hand[0], hand[1]);
  if (Math.hypot(sx - hx, sy - hy) < 30) {
    dragging = true;
    dragOrigin = screenToWorld(sx, sy);
    canvas.setPointerCapture(ev.pointerId);
  }
});

canvas.addEventListener("pointermove", (ev) => {
  if (!dragging || dragOrigin === null) {
    return;
  }
  const rect = canvas.getBoundingClientRect();
  const sx = ((ev.clientX - rect.left) / rect.width) * WIDTH;
  const sy = ((ev.clientY - rect.top) / rect.height) * HEIGHT;
  const [wx, wy] = screenToWorld(sx, sy);
  const fMax = scene.hello ? scene.hello.f_max : 200;
  scene.inputForce = clampForce((wx - dragOrigin[0]) * DRAG_NEWTONS_PER_METER, fMax);
  if (advancedToggle.checked) {
    const raw = (wy - dragOrigin[1]) * DRAG_NEWTONS_PER_METER;
    scene.verticalForce = Math.min(Math.max(raw, -0.25 * fMax), 0.25 * fMax);
  }
  slider.value = String(scene.inputForce);
  sliderLabel.textContent = `${scene.inputForce.toFixed(0)} N`;
  pushForce();
});

canvas.addEventListener("pointerup", () => {
  dragging = false;
  dragOrigin = null;
});

// -- render loop -------------------------------------------------------------

function frame(): void {
  drawScene(ctx, scene);
  requestAnimationFrame(frame);
}

connection.connect();
requestAnimationFrame(frame);
