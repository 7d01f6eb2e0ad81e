import { describe, expect, it } from "vitest";

import { fitWorld, lengthToPixels, toScreen } from "../src/transform";

describe("world-to-screen transform", () => {
  it("preserves chamber aspect ratio with letterboxing", () => {
    // 8x5 world in a 640x420 canvas with 12 px margins
    const t = fitWorld(8, 5, 640, 420, 12);
    expect(lengthToPixels(t, 8) / lengthToPixels(t, 5)).toBeCloseTo(8 / 5, 10);
    // the limiting axis is x: scale = (640-24)/8 = 77
    expect(t.scale).toBeCloseTo(77, 10);
    // letterbox: world height 5*77=385 < 420, so symmetric top/bottom offsets
    expect(t.offsetY).toBeCloseTo((420 - 385) / 2, 10);
  });

  it("maps chamber corners to the letterboxed viewport corners", () => {
    const t = fitWorld(8, 5, 640, 420, 12);
    const [x0, y0] = toScreen(t, 0, 0); // world origin = bottom-left
    const [x1, y1] = toScreen(t, 8, 5); // world top-right
    expect(x0).toBeCloseTo(t.offsetX, 10);
    expect(y0).toBeCloseTo(t.offsetY + 5 * t.scale, 10); // bottom of the viewport
    expect(x1).toBeCloseTo(t.offsetX + 8 * t.scale, 10);
    expect(y1).toBeCloseTo(t.offsetY, 10); // top of the viewport (y flipped)
  });

  it("screen y decreases as world y increases", () => {
    const t = fitWorld(8, 5, 640, 420);
    const [, low] = toScreen(t, 4, 0.5);
    const [, high] = toScreen(t, 4, 3.5);
    expect(high).toBeLessThan(low);
  });

  it("handles a canvas taller than the world aspect", () => {
    const t = fitWorld(8, 5, 300, 800, 0);
    expect(t.scale).toBeCloseTo(300 / 8, 10);
    expect(t.offsetX).toBeCloseTo(0, 10);
    expect(t.offsetY).toBeCloseTo((800 - 5 * t.scale) / 2, 10);
  });
});
