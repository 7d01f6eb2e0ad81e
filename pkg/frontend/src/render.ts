// Top-down chamber renderer: bounds to scale, entity glyphs with
// velocity vectors, and the gNB-UE segment colored by LoS state.

import type { EntitySnap, Snapshot } from "./protocol";
import { fitWorld, lengthToPixels, toScreen, WorldToScreen } from "./transform";

export const COLORS = {
  bounds: "#39424e",
  grid: "#242b33",
  gnb: "#4da3ff",
  ue: "#ffd24d",
  obstacle: "#9aa5b1",
  losClear: "#3ddc84",
  losBlocked: "#ff5d5d",
  obstacleBlocking: "#c05050",
  velocity: "#8fd0ff",
  rail: "#2e3844",
  text: "#c6cdd5",
};

function entityById(snapshot: Snapshot, id: string): EntitySnap | undefined {
  return snapshot.entities.find((e) => e.id === id);
}

function drawVelocity(ctx: CanvasRenderingContext2D, t: WorldToScreen, e: EntitySnap): void {
  const [vx, vy] = e.velocity;
  if (vx === 0 && vy === 0) return;
  const [x0, y0] = toScreen(t, e.position[0], e.position[1]);
  // one second of travel, so the arrow length reads as speed
  const [x1, y1] = toScreen(t, e.position[0] + vx, e.position[1] + vy);
  ctx.strokeStyle = COLORS.velocity;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.moveTo(x0, y0);
  ctx.lineTo(x1, y1);
  ctx.stroke();
  const angle = Math.atan2(y1 - y0, x1 - x0);
  ctx.beginPath();
  ctx.moveTo(x1, y1);
  ctx.lineTo(x1 - 6 * Math.cos(angle - 0.5), y1 - 6 * Math.sin(angle - 0.5));
  ctx.lineTo(x1 - 6 * Math.cos(angle + 0.5), y1 - 6 * Math.sin(angle + 0.5));
  ctx.closePath();
  ctx.fillStyle = COLORS.velocity;
  ctx.fill();
}

export function drawPlaceholder(ctx: CanvasRenderingContext2D, width: number, height: number, status: string): void {
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = COLORS.text;
  ctx.font = "14px system-ui, sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(`no snapshot yet (${status})`, width / 2, height / 2);
  ctx.textAlign = "start";
}

export function drawChamber(
  ctx: CanvasRenderingContext2D,
  snapshot: Snapshot,
  worldWidth: number,
  worldDepth: number,
  canvasWidth: number,
  canvasHeight: number,
  gnbTrackY: number,
): void {
  const t = fitWorld(worldWidth, worldDepth, canvasWidth, canvasHeight);
  ctx.clearRect(0, 0, canvasWidth, canvasHeight);

  // chamber bounds and the gNB rail
  const [bx, by] = toScreen(t, 0, worldDepth);
  ctx.strokeStyle = COLORS.bounds;
  ctx.lineWidth = 2;
  ctx.strokeRect(bx, by, lengthToPixels(t, worldWidth), lengthToPixels(t, worldDepth));
  const [rx0, ry0] = toScreen(t, 0, gnbTrackY);
  const [rx1] = toScreen(t, worldWidth, gnbTrackY);
  ctx.strokeStyle = COLORS.rail;
  ctx.setLineDash([6, 6]);
  ctx.beginPath();
  ctx.moveTo(rx0, ry0);
  ctx.lineTo(rx1, ry0);
  ctx.stroke();
  ctx.setLineDash([]);

  const gnb = entityById(snapshot, "gnb");
  const ue = entityById(snapshot, "ue");
  const obstacle = entityById(snapshot, "obstacle");
  if (!gnb || !ue || !obstacle) return;

  // LoS segment, colored by state
  const [gx, gy] = toScreen(t, gnb.position[0], gnb.position[1]);
  const [ux, uy] = toScreen(t, ue.position[0], ue.position[1]);
  ctx.strokeStyle = snapshot.los === 0 ? COLORS.losClear : COLORS.losBlocked;
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(gx, gy);
  ctx.lineTo(ux, uy);
  ctx.stroke();

  // obstacle rectangle, highlighted while blocking
  const [ox, oy] = toScreen(t, obstacle.position[0] - obstacle.half_size[0], obstacle.position[1] + obstacle.half_size[1]);
  ctx.fillStyle = snapshot.los === 1 ? COLORS.obstacleBlocking : COLORS.obstacle;
  ctx.fillRect(ox, oy, lengthToPixels(t, 2 * obstacle.half_size[0]), lengthToPixels(t, 2 * obstacle.half_size[1]));

  // point glyphs
  ctx.fillStyle = COLORS.gnb;
  ctx.beginPath();
  ctx.arc(gx, gy, 7, 0, Math.PI * 2);
  ctx.fill();
  ctx.fillStyle = COLORS.ue;
  ctx.beginPath();
  ctx.arc(ux, uy, 6, 0, Math.PI * 2);
  ctx.fill();

  drawVelocity(ctx, t, gnb);
  drawVelocity(ctx, t, ue);
  drawVelocity(ctx, t, obstacle);

  ctx.fillStyle = COLORS.text;
  ctx.font = "12px system-ui, sans-serif";
  ctx.fillText("gNB", gx + 10, gy + 4);
  ctx.fillText("UE", ux + 9, uy + 4);
}
