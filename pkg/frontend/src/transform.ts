// World-to-screen mapping for the top-down chamber view. The chamber
// aspect ratio is preserved; leftover canvas space becomes symmetric
// letterbox margins. World y points up, screen y points down.

export interface WorldToScreen {
  scale: number; // pixels per meter
  offsetX: number;
  offsetY: number;
  worldWidth: number;
  worldDepth: number;
}

export function fitWorld(
  worldWidth: number,
  worldDepth: number,
  canvasWidth: number,
  canvasHeight: number,
  margin = 12,
): WorldToScreen {
  const availW = Math.max(canvasWidth - 2 * margin, 1);
  const availH = Math.max(canvasHeight - 2 * margin, 1);
  const scale = Math.min(availW / worldWidth, availH / worldDepth);
  const offsetX = (canvasWidth - worldWidth * scale) / 2;
  const offsetY = (canvasHeight - worldDepth * scale) / 2;
  return { scale, offsetX, offsetY, worldWidth, worldDepth };
}

export function toScreen(t: WorldToScreen, x: number, y: number): [number, number] {
  return [t.offsetX + x * t.scale, t.offsetY + (t.worldDepth - y) * t.scale];
}

export function lengthToPixels(t: WorldToScreen, meters: number): number {
  return meters * t.scale;
}
