// Scrolling telemetry chart model and its canvas renderer. The model is
// pure (testable without a DOM): series extraction, axis bounds, NLoS
// shading ranges, and CSV export of the visible window.

import type { TelemetryPoint } from "./store";

export interface SeriesModel {
  points: Array<[number, number]>; // (tick, value)
  min: number;
  max: number;
  nlosRanges: Array<[number, number]>; // inclusive tick ranges under NLoS
}

function nlosRangesOf(telemetry: TelemetryPoint[]): Array<[number, number]> {
  const ranges: Array<[number, number]> = [];
  let start: number | null = null;
  let last: number | null = null;
  for (const p of telemetry) {
    if (p.los === 1) {
      if (start === null) start = p.tick;
      last = p.tick;
    } else if (start !== null && last !== null) {
      ranges.push([start, last]);
      start = null;
      last = null;
    }
  }
  if (start !== null && last !== null) ranges.push([start, last]);
  return ranges;
}

export function pathLossSeries(telemetry: TelemetryPoint[]): SeriesModel {
  const points = telemetry.map((p) => [p.tick, p.pathLoss] as [number, number]);
  const values = points.map(([, v]) => v);
  const min = values.length ? Math.min(...values) : 0;
  const max = values.length ? Math.max(...values) : 1;
  const pad = Math.max((max - min) * 0.1, 1.0);
  return { points, min: min - pad, max: max + pad, nlosRanges: nlosRangesOf(telemetry) };
}

export function rewardSeries(telemetry: TelemetryPoint[], rewardGain: number): SeriesModel {
  const points = telemetry.map((p) => [p.tick, p.reward] as [number, number]);
  // axis fixed to the reward's declared range [-1, k]
  return { points, min: -1, max: rewardGain, nlosRanges: nlosRangesOf(telemetry) };
}

export function telemetryToCsv(telemetry: TelemetryPoint[]): string {
  const lines = ["tick,path_loss,reward,los"];
  for (const p of telemetry) {
    lines.push(`${p.tick},${p.pathLoss},${p.reward},${p.los}`);
  }
  return lines.join("\n") + "\n";
}

export interface ChartStyle {
  line: string;
  shade: string;
  axis: string;
  text: string;
}

export function drawChart(
  ctx: CanvasRenderingContext2D,
  series: SeriesModel,
  width: number,
  height: number,
  label: string,
  style: ChartStyle,
): void {
  ctx.clearRect(0, 0, width, height);
  if (series.points.length < 2) {
    ctx.fillStyle = style.text;
    ctx.fillText(`${label}: waiting for data`, 8, 16);
    return;
  }
  const t0 = series.points[0][0];
  const t1 = series.points[series.points.length - 1][0];
  const span = Math.max(t1 - t0, 1);
  const xOf = (tick: number) => ((tick - t0) / span) * (width - 8) + 4;
  const yOf = (v: number) => height - 18 - ((v - series.min) / (series.max - series.min)) * (height - 30);

  for (const [a, b] of series.nlosRanges) {
    ctx.fillStyle = style.shade;
    const xa = xOf(Math.max(a, t0));
    const xb = xOf(Math.min(b, t1));
    ctx.fillRect(xa, 4, Math.max(xb - xa, 2), height - 22);
  }

  ctx.strokeStyle = style.axis;
  ctx.strokeRect(0.5, 0.5, width - 1, height - 1);

  ctx.strokeStyle = style.line;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  series.points.forEach(([tick, v], i) => {
    const x = xOf(tick);
    const y = yOf(v);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();

  ctx.fillStyle = style.text;
  const last = series.points[series.points.length - 1][1];
  ctx.fillText(`${label}: ${last.toFixed(2)}`, 8, 14);
  ctx.fillText(series.max.toFixed(1), width - 36, 14);
  ctx.fillText(series.min.toFixed(1), width - 36, height - 6);
}
