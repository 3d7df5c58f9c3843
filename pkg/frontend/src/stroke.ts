/**
 * Pointer-stroke capture logic, kept free of DOM types so it is unit
 * testable: normalization to the unit square, rate throttling, and the
 * monotonic-timestamp guarantee the server requires.
 */

export const MAX_POINT_RATE_HZ = 120;
const MIN_GAP_MS = 1000 / MAX_POINT_RATE_HZ;

export interface StrokePoint {
  t_ms: number;
  u: number;
  v: number;
}

/** Map a pixel position inside a width x height canvas to [0,1]^2
 * (clamped at the edges so a drag that leaves the canvas stays valid). */
export function normalizePointer(
  x: number,
  y: number,
  width: number,
  height: number,
): { u: number; v: number } {
  const clamp = (value: number) => Math.min(1, Math.max(0, value));
  return { u: clamp(x / width), v: clamp(y / height) };
}

/**
 * Accumulates one stroke.  add() returns the accepted point, or null
 * when the sample is dropped by the <= 120 Hz throttle or is out of
 * range.  Timestamps are forced non-decreasing even if the caller's
 * clock is not strictly monotonic.
 */
export class StrokeTracker {
  points: StrokePoint[] = [];

  add(t_ms: number, u: number, v: number): StrokePoint | null {
    if (!(u >= 0 && u <= 1 && v >= 0 && v <= 1) || !Number.isFinite(t_ms)) {
      return null;
    }
    const last = this.points[this.points.length - 1];
    if (last !== undefined) {
      if (t_ms - last.t_ms < MIN_GAP_MS) {
        return null;
      }
      if (t_ms < last.t_ms) {
        t_ms = last.t_ms;
      }
    } else if (t_ms < 0) {
      t_ms = 0;
    }
    const point = { t_ms, u, v };
    this.points.push(point);
    return point;
  }

  /** The server rejects strokes of fewer than two points, so `end` must
   * not be sent before this is true. */
  canEnd(): boolean {
    return this.points.length >= 2;
  }

  reset(): void {
    this.points = [];
  }
}
