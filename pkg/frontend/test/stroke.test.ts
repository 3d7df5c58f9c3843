import { describe, expect, it } from "vitest";

import {
  MAX_POINT_RATE_HZ,
  normalizePointer,
  StrokeTracker,
} from "../src/stroke.js";

describe("normalizePointer", () => {
  it("spans [0,1] across the full canvas", () => {
    expect(normalizePointer(0, 0, 400, 300)).toEqual({ u: 0, v: 0 });
    expect(normalizePointer(400, 300, 400, 300)).toEqual({ u: 1, v: 1 });
    expect(normalizePointer(200, 150, 400, 300)).toEqual({ u: 0.5, v: 0.5 });
  });

  it("clamps positions outside the canvas", () => {
    expect(normalizePointer(-20, 600, 400, 300)).toEqual({ u: 0, v: 1 });
  });
});

describe("StrokeTracker", () => {
  it("throttles to at most 120 Hz", () => {
    const tracker = new StrokeTracker();
    // 1 kHz pointer spam for one second
    for (let t = 0; t <= 1000; t += 1) {
      tracker.add(t, 0.5, 0.5);
    }
    expect(tracker.points.length).toBeLessThanOrEqual(MAX_POINT_RATE_HZ + 1);
    expect(tracker.points.length).toBeGreaterThan(100);
  });

  it("keeps timestamps monotone non-decreasing", () => {
    const tracker = new StrokeTracker();
    const stamps = [0, 20, 15, 40, 39.9, 80];
    for (const t of stamps) {
      tracker.add(t, 0.5, 0.5);
    }
    const sent = tracker.points.map((p) => p.t_ms);
    for (let i = 1; i < sent.length; i += 1) {
      expect(sent[i]).toBeGreaterThanOrEqual(sent[i - 1]);
    }
  });

  it("drops out-of-range or non-finite samples", () => {
    const tracker = new StrokeTracker();
    expect(tracker.add(0, 1.2, 0.5)).toBeNull();
    expect(tracker.add(0, 0.5, -0.1)).toBeNull();
    expect(tracker.add(Number.NaN, 0.5, 0.5)).toBeNull();
    expect(tracker.points).toHaveLength(0);
  });

  it("does not allow end before two points", () => {
    const tracker = new StrokeTracker();
    expect(tracker.canEnd()).toBe(false);
    tracker.add(0, 0.5, 0.5);
    expect(tracker.canEnd()).toBe(false);
    tracker.add(20, 0.6, 0.5);
    expect(tracker.canEnd()).toBe(true);
    tracker.reset();
    expect(tracker.canEnd()).toBe(false);
  });
});
