/**
 * Canvas drawing: orthographic side/top projections of the arm
 * skeleton and the prediction panel (vote bars plus duration and
 * displacement readouts).  No classification happens here; the panel
 * only displays the server's prediction payload verbatim.
 */
import type { Vec3 } from "./kinematics.js";
import type { Prediction } from "./protocol.js";

/** Side view: world x rightward, world z upward. */
export function projectSide(p: Vec3): [number, number] {
  return [p[0], p[2]];
}

/** Top view: world x rightward, world y downward on screen. */
export function projectTop(p: Vec3): [number, number] {
  return [p[0], p[1]];
}

export interface Viewport {
  width: number;
  height: number;
  /** Meters shown across the smaller canvas dimension. */
  span_m: number;
  /** World point drawn at the canvas center. */
  center: [number, number];
}

export function toPixels(
  point: [number, number],
  view: Viewport,
): [number, number] {
  const scale = Math.min(view.width, view.height) / view.span_m;
  return [
    view.width / 2 + (point[0] - view.center[0]) * scale,
    view.height / 2 - (point[1] - view.center[1]) * scale,
  ];
}

export function drawSkeleton(
  ctx: CanvasRenderingContext2D,
  points: Vec3[],
  project: (p: Vec3) => [number, number],
  view: Viewport,
): void {
  ctx.clearRect(0, 0, view.width, view.height);
  ctx.strokeStyle = "#888";
  ctx.beginPath();
  const [gx0, gy] = toPixels([view.center[0] - view.span_m, 0], view);
  const [gx1] = toPixels([view.center[0] + view.span_m, 0], view);
  ctx.moveTo(gx0, gy);
  ctx.lineTo(gx1, gy);
  ctx.stroke();

  ctx.strokeStyle = "#1f77b4";
  ctx.lineWidth = 3;
  ctx.beginPath();
  points.forEach((p, i) => {
    const [x, y] = toPixels(project(p), view);
    if (i === 0) {
      ctx.moveTo(x, y);
    } else {
      ctx.lineTo(x, y);
    }
  });
  ctx.stroke();

  ctx.fillStyle = "#1f77b4";
  for (const p of points) {
    const [x, y] = toPixels(project(p), view);
    ctx.beginPath();
    ctx.arc(x, y, 4, 0, 2 * Math.PI);
    ctx.fill();
  }
  const tip = toPixels(project(points[points.length - 1]), view);
  ctx.fillStyle = "#d62728";
  ctx.beginPath();
  ctx.arc(tip[0], tip[1], 5, 0, 2 * Math.PI);
  ctx.fill();
  ctx.lineWidth = 1;
}

export function drawStrokeEcho(
  ctx: CanvasRenderingContext2D,
  points: { u: number; v: number }[],
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  ctx.strokeStyle = "#ccc";
  ctx.strokeRect(0.5, 0.5, width - 1, height - 1);
  if (points.length === 0) {
    return;
  }
  ctx.strokeStyle = "#2ca02c";
  ctx.lineWidth = 2;
  ctx.beginPath();
  points.forEach((p, i) => {
    const x = p.u * width;
    const y = p.v * height;
    if (i === 0) {
      ctx.moveTo(x, y);
    } else {
      ctx.lineTo(x, y);
    }
  });
  ctx.stroke();
  ctx.lineWidth = 1;
}

/** Vote-bar data: one share in [0,1] per class label, in label order. */
export function voteShares(votes: number[]): number[] {
  const total = votes.reduce((a, b) => a + b, 0);
  if (total <= 0) {
    return votes.map(() => 0);
  }
  return votes.map((n) => n / total);
}

export function renderPredictionPanel(
  panel: HTMLElement,
  prediction: Prediction,
  classLabels: string[],
): void {
  const shares = voteShares(prediction.votes);
  const bars = classLabels
    .map((label, i) => {
      const pct = (100 * (shares[i] ?? 0)).toFixed(0);
      const cls = label === prediction.label ? "bar winner" : "bar";
      return (
        `<div class="vote-row"><span class="vote-label">${label}</span>` +
        `<span class="${cls}" style="width:${pct}%"></span>` +
        `<span class="vote-pct">${pct}%</span></div>`
      );
    })
    .join("");
  panel.innerHTML =
    `<div class="pred-label">${prediction.label}</div>` +
    bars +
    `<div class="readout">duration ${prediction.duration_s.toFixed(2)} s` +
    ` &middot; max displacement ` +
    `${prediction.max_displacement_m.toFixed(3)} m</div>`;
}
