import { describe, expect, it } from "vitest";

import { History } from "../src/history.js";

describe("history ring buffer", () => {
  it("keeps insertion order below capacity", () => {
    const h = new History(5);
    for (let i = 0; i < 3; i++) {
      h.push({ t: i, f: i * 10, zmp: 0, s: 0 });
    }
    expect(h.length).toBe(3);
    expect(h.toArray().map((s) => s.t)).toEqual([0, 1, 2]);
  });

  it("evicts the oldest samples at capacity", () => {
    const h = new History(4);
    for (let i = 0; i < 10; i++) {
      h.push({ t: i, f: 0, zmp: null, s: 0 });
    }
    expect(h.length).toBe(4);
    expect(h.toArray().map((s) => s.t)).toEqual([6, 7, 8, 9]);
  });

  it("clears fully", () => {
    const h = new History(3);
    h.push({ t: 0, f: 0, zmp: 0, s: 0 });
    h.clear();
    expect(h.length).toBe(0);
    expect(h.toArray()).toEqual([]);
  });

  it("rejects zero capacity", () => {
    expect(() => new History(0)).toThrow();
  });
});
