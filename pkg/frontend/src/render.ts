// Canvas rendering: stick figure, balance gauge, manifold position bar
// and strip charts. Pure functions of the received server state; nothing
// here advances physics. Drawing goes through a narrow context interface
// so tests can drive frames without a real canvas.

import { History } from "./history.js";
import { HelloMessage, StateMessage } from "./protocol.js";

export interface Draw2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  textAlign: CanvasTextAlign;
  globalAlpha: number;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  stroke(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
  setLineDash(segments: number[]): void;
}

export interface Scene {
  hello: HelloMessage | null;
  state: StateMessage | null;
  history: History;
  connected: boolean;
  inputForce: number;
  verticalForce: number;
}

export const WIDTH = 960;
export const HEIGHT = 600;

const ROBOT_BOX = { x: 10, y: 10, w: 560, h: 580 };
const WORLD = { xMin: -1.0, xMax: 1.0, zMin: -0.15, zMax: 1.9 };

const COLORS = {
  background: "#11151a",
  panel: "#1a2028",
  text: "#d7dee8",
  dim: "#7a8694",
  body: "#8fd0ff",
  joint: "#e8f2ff",
  ground: "#55606d",
  margin: "#2ca02c",
  support: "#b8a23a",
  zmp: "#ff6f59",
  force: "#f2c14e",
  fall: "#d64545",
};

export function worldToScreen(x: number, z: number): [number, number] {
  const sx =
    ROBOT_BOX.x + ((x - WORLD.xMin) / (WORLD.xMax - WORLD.xMin)) * ROBOT_BOX.w;
  const sz =
    ROBOT_BOX.y + ((WORLD.zMax - z) / (WORLD.zMax - WORLD.zMin)) * ROBOT_BOX.h;
  return [sx, sz];
}

export function screenToWorld(sx: number, sz: number): [number, number] {
  const x =
    WORLD.xMin + ((sx - ROBOT_BOX.x) / ROBOT_BOX.w) * (WORLD.xMax - WORLD.xMin);
  const z =
    WORLD.zMax - ((sz - ROBOT_BOX.y) / ROBOT_BOX.h) * (WORLD.zMax - WORLD.zMin);
  return [x, z];
}

/** Fraction along a horizontal gauge for a balance value, clipped. */
export function gaugeFraction(value: number, lo: number, hi: number): number {
  return Math.min(Math.max((value - lo) / (hi - lo), 0), 1);
}

function groundBar(ctx: Draw2D, hello: HelloMessage, state: StateMessage | null): void {
  const [gx0, gy] = worldToScreen(WORLD.xMin, 0);
  const [gx1] = worldToScreen(WORLD.xMax, 0);
  ctx.strokeStyle = COLORS.ground;
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(gx0, gy);
  ctx.lineTo(gx1, gy);
  ctx.stroke();
  // true support interval, then the conservative planning margin on top
  const [sx0] = worldToScreen(hello.foot_extent[0], 0);
  const [sx1] = worldToScreen(hello.foot_extent[1], 0);
  ctx.fillStyle = COLORS.support;
  ctx.globalAlpha = 0.45;
  ctx.fillRect(sx0, gy - 4, sx1 - sx0, 8);
  const [mx0] = worldToScreen(hello.delta_margin[0], 0);
  const [mx1] = worldToScreen(hello.delta_margin[1], 0);
  ctx.fillStyle = COLORS.margin;
  ctx.globalAlpha = 0.7;
  ctx.fillRect(mx0, gy - 4, mx1 - mx0, 8);
  ctx.globalAlpha = 1;
  if (state && state.zmp !== null) {
    const [zx] = worldToScreen(state.zmp, 0);
    ctx.fillStyle = COLORS.zmp;
    ctx.beginPath();
    ctx.arc(zx, gy, 6, 0, Math.PI * 2);
    ctx.fill();
  }
}

function stickFigure(ctx: Draw2D, state: StateMessage): void {
  const pts = state.frames.map(([x, z]) => worldToScreen(x, z));
  ctx.strokeStyle = COLORS.body;
  ctx.lineWidth = 5;
  ctx.beginPath();
  ctx.moveTo(pts[0][0], pts[0][1]);
  for (let i = 1; i < pts.length; i++) {
    ctx.lineTo(pts[i][0], pts[i][1]);
  }
  ctx.stroke();
  ctx.fillStyle = COLORS.joint;
  for (const [px, py] of pts) {
    ctx.beginPath();
    ctx.arc(px, py, 4, 0, Math.PI * 2);
    ctx.fill();
  }
}

function forceArrow(ctx: Draw2D, state: StateMessage, hello: HelloMessage): void {
  if (state.frames.length === 0 || state.f_applied === 0) {
    return;
  }
  const hand = state.frames[state.frames.length - 1];
  const [hx, hy] = worldToScreen(hand[0], hand[1]);
  const len = (state.f_applied / hello.f_max) * 120;
  ctx.strokeStyle = COLORS.force;
  ctx.lineWidth = 3;
  ctx.beginPath();
  ctx.moveTo(hx, hy);
  ctx.lineTo(hx + len, hy);
  ctx.stroke();
  ctx.beginPath();
  ctx.moveTo(hx + len, hy);
  ctx.lineTo(hx + len - 8, hy - 5);
  ctx.lineTo(hx + len - 8, hy + 5);
  ctx.fill();
}

function sideBar(ctx: Draw2D, scene: Scene): void {
  const x0 = 590;
  ctx.fillStyle = COLORS.panel;
  ctx.fillRect(x0, 10, WIDTH - x0 - 10, 190);
  ctx.fillStyle = COLORS.text;
  ctx.font = "14px sans-serif";
  ctx.textAlign = "left";
  const hello = scene.hello;
  const state = scene.state;
  ctx.fillText("manifold position s", x0 + 14, 34);
  ctx.strokeStyle = COLORS.dim;
  ctx.lineWidth = 1;
  ctx.strokeRect(x0 + 14, 44, 320, 16);
  if (state) {
    ctx.fillStyle = COLORS.body;
    ctx.fillRect(x0 + 14, 44, 320 * Math.min(Math.max(state.s, 0), 1), 16);
  }
  ctx.fillStyle = COLORS.text;
  ctx.fillText("balance point", x0 + 14, 92);
  if (hello) {
    const lo = hello.foot_extent[0];
    const hi = hello.foot_extent[1];
    ctx.strokeStyle = COLORS.dim;
    ctx.strokeRect(x0 + 14, 102, 320, 16);
    const [m0, m1] = hello.delta_margin;
    ctx.fillStyle = COLORS.margin;
    ctx.globalAlpha = 0.5;
    ctx.fillRect(
      x0 + 14 + 320 * gaugeFraction(m0, lo, hi),
      102,
      320 * (gaugeFraction(m1, lo, hi) - gaugeFraction(m0, lo, hi)),
      16,
    );
    ctx.globalAlpha = 1;
    if (state && state.zmp !== null) {
      ctx.fillStyle = COLORS.zmp;
      const fx = x0 + 14 + 320 * gaugeFraction(state.zmp, lo, hi);
      ctx.fillRect(fx - 2, 100, 4, 20);
    }
  }
  ctx.fillStyle = COLORS.text;
  const f = state ? state.f_applied : scene.inputForce;
  ctx.fillText(`pull ${f.toFixed(1)} N`, x0 + 14, 150);
  const t = state ? state.t : 0;
  ctx.fillText(`t ${t.toFixed(2)} s`, x0 + 170, 150);
  if (scene.verticalForce !== 0) {
    ctx.fillText(`vertical ${scene.verticalForce.toFixed(1)} N`, x0 + 14, 172);
  }
}

function stripCharts(ctx: Draw2D, scene: Scene): void {
  const x0 = 590;
  const charts: {
    label: string;
    y0: number;
    pick: (s: { f: number; zmp: number | null }) => number | null;
    lo: number;
    hi: number;
    bands?: [number, number, string][];
  }[] = [
    {
      label: "pull [N]",
      y0: 220,
      pick: (s) => s.f,
      lo: 0,
      hi: scene.hello ? 1.25 * scene.hello.f_max : 250,
    },
    {
      label: "balance [m]",
      y0: 410,
      pick: (s) => s.zmp,
      lo: scene.hello ? scene.hello.foot_extent[0] * 1.4 : -0.14,
      hi: scene.hello ? scene.hello.foot_extent[1] * 1.4 : 0.14,
      bands: scene.hello
        ? [
            [scene.hello.delta_margin[0], scene.hello.delta_margin[1], COLORS.margin],
            [scene.hello.foot_extent[0], scene.hello.foot_extent[1], COLORS.support],
          ]
        : [],
    },
  ];
  const w = 340;
  const h = 160;
  const samples = scene.history.toArray();
  for (const chart of charts) {
    ctx.fillStyle = COLORS.panel;
    ctx.fillRect(x0, chart.y0, w + 20, h + 20);
    ctx.fillStyle = COLORS.dim;
    ctx.font = "12px sans-serif";
    ctx.textAlign = "left";
    ctx.fillText(chart.label, x0 + 10, chart.y0 + 16);
    const plotX = x0 + 10;
    const plotY = chart.y0 + 22;
    const plotH = h - 26;
    for (const [b0, b1, color] of chart.bands ?? []) {
      const f0 = gaugeFraction(b0, chart.lo, chart.hi);
      const f1 = gaugeFraction(b1, chart.lo, chart.hi);
      ctx.fillStyle = color;
      ctx.globalAlpha = 0.18;
      ctx.fillRect(plotX, plotY + plotH * (1 - f1), w, plotH * (f1 - f0));
      ctx.globalAlpha = 1;
    }
    if (samples.length >= 2) {
      ctx.strokeStyle = chart.label.startsWith("pull") ? COLORS.force : COLORS.zmp;
      ctx.lineWidth = 1.6;
      ctx.beginPath();
      let started = false;
      for (let i = 0; i < samples.length; i++) {
        const v = chart.pick(samples[i]);
        if (v === null) {
          continue;
        }
        const px = plotX + (w * i) / (scene.history.capacity - 1);
        const py = plotY + plotH * (1 - gaugeFraction(v, chart.lo, chart.hi));
        if (!started) {
          ctx.moveTo(px, py);
          started = true;
        } else {
          ctx.lineTo(px, py);
        }
      }
      ctx.stroke();
    }
  }
}

function overlays(ctx: Draw2D, scene: Scene): void {
  if (!scene.connected) {
    ctx.fillStyle = COLORS.fall;
    ctx.globalAlpha = 0.85;
    ctx.fillRect(ROBOT_BOX.x, 40, 270, 34);
    ctx.globalAlpha = 1;
    ctx.fillStyle = "#ffffff";
    ctx.font = "16px sans-serif";
    ctx.textAlign = "left";
    ctx.fillText("disconnected - retrying...", ROBOT_BOX.x + 12, 62);
  }
  const st = scene.state;
  if (st && (!st.inside_support || st.failure)) {
    ctx.fillStyle = COLORS.fall;
    ctx.globalAlpha = 0.25;
    ctx.fillRect(ROBOT_BOX.x, ROBOT_BOX.y, ROBOT_BOX.w, ROBOT_BOX.h);
    ctx.globalAlpha = 1;
    ctx.fillStyle = COLORS.fall;
    ctx.font = "bold 48px sans-serif";
    ctx.textAlign = "center";
    ctx.fillText("FALL", ROBOT_BOX.x + ROBOT_BOX.w / 2, ROBOT_BOX.y + 90);
    if (st.failure) {
      ctx.font = "16px sans-serif";
      ctx.fillText(st.failure, ROBOT_BOX.x + ROBOT_BOX.w / 2, ROBOT_BOX.y + 118);
    }
  }
}

export function drawScene(ctx: Draw2D, scene: Scene): void {
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, WIDTH, HEIGHT);
  ctx.fillStyle = COLORS.panel;
  ctx.fillRect(ROBOT_BOX.x, ROBOT_BOX.y, ROBOT_BOX.w, ROBOT_BOX.h);
  if (scene.hello) {
    groundBar(ctx, scene.hello, scene.state);
  }
  if (scene.state) {
    stickFigure(ctx, scene.state);
    if (scene.hello) {
      forceArrow(ctx, scene.state, scene.hello);
    }
  }
  sideBar(ctx, scene);
  stripCharts(ctx, scene);
  overlays(ctx, scene);
}
