// Top-down trajectory map and command gauges. The viewport math is pure so
// the orientation conventions are testable without a canvas: world +y maps
// to screen -y, which makes a heading increase (a right turn) trace
// clockwise on screen.

import { Command } from "./protocol.js";
import { TimedPose } from "./cockpit.js";

export interface Viewport {
  scale: number; // pixels per meter
  offsetX: number;
  offsetY: number;
}

export const VIEW_MARGIN_FRAC = 0.1;

/** Fit the trajectory bounding box into width x height with a 10% margin. */
export function fitViewport(poses: TimedPose[], width: number, height: number): Viewport {
  let minX = 0, maxX = 0, minY = 0, maxY = 0;
  if (poses.length > 0) {
    minX = Math.min(...poses.map((p) => p.x));
    maxX = Math.max(...poses.map((p) => p.x));
    minY = Math.min(...poses.map((p) => p.y));
    maxY = Math.max(...poses.map((p) => p.y));
  }
  const spanX = Math.max(maxX - minX, 1e-6);
  const spanY = Math.max(maxY - minY, 1e-6);
  const usable = 1 - 2 * VIEW_MARGIN_FRAC;
  const scale = Math.min((width * usable) / spanX, (height * usable) / spanY);
  const centerX = (minX + maxX) / 2;
  const centerY = (minY + maxY) / 2;
  return {
    scale,
    offsetX: width / 2 - centerX * scale,
    offsetY: height / 2 + centerY * scale,
  };
}

/** World meters to screen pixels; screen y grows downward. */
export function project(view: Viewport, x: number, y: number): [number, number] {
  return [view.offsetX + x * view.scale, view.offsetY - y * view.scale];
}

export function drawMap(ctx: CanvasRenderingContext2D, poses: TimedPose[], width: number, height: number): void {
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, width, height);
  if (poses.length === 0) return;
  const view = fitViewport(poses, width, height);

  ctx.strokeStyle = "#3fa7d6";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  poses.forEach((p, i) => {
    const [sx, sy] = project(view, p.x, p.y);
    if (i === 0) ctx.moveTo(sx, sy);
    else ctx.lineTo(sx, sy);
  });
  ctx.stroke();

  const head = poses[poses.length - 1];
  const [hx, hy] = project(view, head.x, head.y);
  const rad = (head.heading_deg * Math.PI) / 180;
  // Heading arrow: world direction (cos, sin) with the screen y flip.
  const dirX = Math.cos(rad);
  const dirY = -Math.sin(rad);
  ctx.strokeStyle = "#f2f230";
  ctx.fillStyle = "#f2f230";
  ctx.beginPath();
  ctx.arc(hx, hy, 4, 0, 2 * Math.PI);
  ctx.fill();
  ctx.beginPath();
  ctx.moveTo(hx, hy);
  ctx.lineTo(hx + 16 * dirX, hy + 16 * dirY);
  ctx.stroke();
}

/** Horizontal bar gauge with the physical limits marked at the ends. */
export function drawGauge(
  ctx: CanvasRenderingContext2D,
  value: number,
  limit: number,
  y: number,
  width: number,
  label: string,
): void {
  const mid = width / 2;
  ctx.strokeStyle = "#555";
  ctx.strokeRect(10, y, width - 20, 14);
  ctx.beginPath();
  ctx.moveTo(mid, y);
  ctx.lineTo(mid, y + 14);
  ctx.stroke();
  const frac = Math.max(-1, Math.min(1, value / limit));
  ctx.fillStyle = frac >= 0 ? "#68c964" : "#d66853";
  const extent = frac * (width - 20) * 0.5;
  ctx.fillRect(mid, y + 1, extent, 12);
  ctx.fillStyle = "#ccc";
  ctx.font = "11px monospace";
  ctx.fillText(`${label} ${value.toFixed(2)} (limit ±${limit})`, 10, y - 3);
}

export function drawGauges(ctx: CanvasRenderingContext2D, cmd: Command | null, width: number): void {
  ctx.clearRect(0, 0, width, 70);
  if (cmd === null) return;
  drawGauge(ctx, cmd.throttle, 1.0, 16, width, "throttle");
  drawGauge(ctx, cmd.steering_delta_deg, 180.0, 48, width, "steering");
}
