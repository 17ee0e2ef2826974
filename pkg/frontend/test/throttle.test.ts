import { describe, expect, it } from "vitest";

import { Throttle } from "../src/throttle.js";

function harness(intervalMs: number) {
  let now = 0;
  const emitted: { t: number; v: number }[] = [];
  const timers: { at: number; fn: () => void }[] = [];
  const throttle = new Throttle<number>(
    intervalMs,
    (v) => emitted.push({ t: now, v }),
    () => now,
    (fn, delay) => timers.push({ at: now + delay, fn }),
  );
  const advance = (to: number) => {
    while (true) {
      const due = timers
        .filter((t) => t.at <= to)
        .sort((a, b) => a.at - b.at)[0];
      if (!due) {
        break;
      }
      timers.splice(timers.indexOf(due), 1);
      now = due.at;
      due.fn();
    }
    now = to;
  };
  return { throttle, emitted, advance, tick: (t: number) => (now = t) };
}

describe("input throttling", () => {
  it("emits immediately when idle", () => {
    const h = harness(50);
    h.throttle.call(1);
    expect(h.emitted).toEqual([{ t: 0, v: 1 }]);
  });

  it("caps a fast waggle at the configured rate and keeps the latest value", () => {
    const h = harness(50);
    // 100 calls over one second of fast waggling
    for (let i = 0; i < 100; i++) {
      h.tick(i * 10);
      h.throttle.call(i);
      h.advance(i * 10);
    }
    h.advance(1100);
    // no more than 1000 ms / 50 ms + trailing = 21 emissions, and gaps >= 50 ms
    expect(h.emitted.length).toBeLessThanOrEqual(21);
    for (let i = 1; i < h.emitted.length; i++) {
      expect(h.emitted[i].t - h.emitted[i - 1].t).toBeGreaterThanOrEqual(50);
    }
    expect(h.emitted[h.emitted.length - 1].v).toBe(99);
  });

  it("delivers the trailing value after the interval", () => {
    const h = harness(50);
    h.throttle.call(1);
    h.tick(10);
    h.throttle.call(2);
    h.tick(20);
    h.throttle.call(3);
    expect(h.emitted.map((e) => e.v)).toEqual([1]);
    h.advance(60);
    expect(h.emitted.map((e) => e.v)).toEqual([1, 3]);
  });

  it("rejects a nonpositive interval", () => {
    expect(() => new Throttle(0, () => undefined)).toThrow();
  });
});
