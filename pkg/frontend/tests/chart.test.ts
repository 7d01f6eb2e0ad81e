import { describe, expect, it } from "vitest";

import { pathLossSeries, rewardSeries, telemetryToCsv } from "../src/chart";
import type { TelemetryPoint } from "../src/store";

const points: TelemetryPoint[] = [
  { tick: 1, pathLoss: 55.0, reward: 0.3, los: 0 },
  { tick: 2, pathLoss: 55.0, reward: 0.3, los: 0 },
  { tick: 3, pathLoss: 75.0, reward: -0.6, los: 1 },
  { tick: 4, pathLoss: 75.0, reward: -0.4, los: 1 },
  { tick: 5, pathLoss: 55.0, reward: 0.3, los: 0 },
  { tick: 6, pathLoss: 75.0, reward: -0.9, los: 1 },
];

describe("telemetry charts", () => {
  it("extracts the path loss series with NLoS shading ranges", () => {
    const series = pathLossSeries(points);
    expect(series.points).toHaveLength(6);
    expect(series.points[2]).toEqual([3, 75.0]);
    expect(series.nlosRanges).toEqual([
      [3, 4],
      [6, 6],
    ]);
    expect(series.min).toBeLessThan(55.0);
    expect(series.max).toBeGreaterThan(75.0);
  });

  it("fixes the reward axis to the declared range [-1, k]", () => {
    const series = rewardSeries(points, 0.75);
    expect(series.min).toBe(-1);
    expect(series.max).toBe(0.75);
  });

  it("a constant-LoS run produces no shading", () => {
    const clear = points.filter((p) => p.los === 0);
    expect(pathLossSeries(clear).nlosRanges).toEqual([]);
  });

  it("exports the visible window as CSV", () => {
    const csv = telemetryToCsv(points.slice(0, 2));
    expect(csv).toBe("tick,path_loss,reward,los\n1,55,0.3,0\n2,55,0.3,0\n");
  });
});
