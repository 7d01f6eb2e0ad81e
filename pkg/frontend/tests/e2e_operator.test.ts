// End-to-end operator loop against the real control server: the test
// spawns the simulator CLI, connects like the browser console does, and
// drives the same ViewState/protocol code the UI renders from.

import { spawn, ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { makeCommand, parseServerMessage, CommandType } from "../src/protocol";
import { ViewState } from "../src/store";
import { pathLossSeries } from "../src/chart";

let proc: ChildProcess;
let socket: WebSocket;
const store = new ViewState(2000);

function sendCommand(type: CommandType, payload: Record<string, unknown> = {}): string {
  const cmd = makeCommand(type, payload);
  store.registerPending(cmd.id, cmd.type);
  socket.send(JSON.stringify(cmd));
  return cmd.id;
}

async function waitFor(predicate: () => boolean, what: string, timeoutMs = 15000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (predicate()) return;
    await new Promise((r) => setTimeout(r, 20));
  }
  throw new Error(`timed out waiting for ${what}`);
}

async function ackOf(id: string): Promise<void> {
  await waitFor(() => !store.pending.has(id), `reply to ${id}`);
  expect(store.lastError?.id === id ? store.lastError.reason : null).toBeNull();
}

beforeAll(async () => {
  proc = spawn(
    "python3",
    ["-m", "chambersim.cli", "simulate", "--use-case", "O.1", "--serve", "127.0.0.1:0"],
    { cwd: "..", stdio: ["ignore", "pipe", "pipe"] },
  );
  const port: number = await new Promise((resolve, reject) => {
    let buffer = "";
    const timer = setTimeout(() => reject(new Error(`server did not announce a port: ${buffer}`)), 20000);
    proc.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = buffer.match(/ws:\/\/127\.0\.0\.1:(\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve(Number(match[1]));
      }
    });
    proc.on("exit", (code) => reject(new Error(`server exited early (${code}): ${buffer}`)));
  });

  socket = new WebSocket(`ws://127.0.0.1:${port}`);
  socket.on("message", (data) => {
    store.apply(parseServerMessage(data.toString()));
  });
  await new Promise<void>((resolve, reject) => {
    socket.once("open", () => {
      store.setStatus("connected");
      resolve();
    });
    socket.once("error", reject);
  });
}, 30000);

afterAll(() => {
  try {
    socket?.close();
  } catch {
    /* closing */
  }
  proc?.kill("SIGINT");
});

describe("operator loop against the live control server", () => {
  it("receives the greeting and a flowing snapshot stream", async () => {
    await waitFor(() => store.hello !== null, "hello event");
    expect(store.hello!.chamber.width).toBeGreaterThan(0);
    await waitFor(() => store.latest !== null && store.latest.tick >= 2, "snapshots");
  });

  it("pause acks and the stream stops", async () => {
    await ackOf(sendCommand("pause"));
    // let in-flight frames land, then expect silence
    await new Promise((r) => setTimeout(r, 300));
    const tick = store.latest!.tick;
    await new Promise((r) => setTimeout(r, 500));
    expect(store.latest!.tick).toBe(tick);
  });

  it("sets the UE velocity to 0.6 m/s with a single acked command", async () => {
    const before = store.acked;
    await ackOf(sendCommand("set_velocity", { entity: "ue", vx: 0.6 }));
    expect(store.acked).toBe(before + 1);
  });

  it("step once yields exactly one snapshot", async () => {
    const tick = store.latest!.tick;
    await ackOf(sendCommand("step_once"));
    await waitFor(() => store.latest!.tick === tick + 1, "the stepped snapshot");
    // UE moved by v * dt under the commanded velocity
    const ue = store.latest!.entities.find((e) => e.id === "ue")!;
    expect(ue.velocity[0]).toBeCloseTo(0.6, 10);
    await new Promise((r) => setTimeout(r, 500));
    expect(store.latest!.tick).toBe(tick + 1); // exactly one
  });

  it("resume restarts the stream", async () => {
    const tick = store.latest!.tick;
    await ackOf(sendCommand("resume"));
    await waitFor(() => store.latest!.tick > tick + 1, "post-resume snapshots");
    await ackOf(sendCommand("pause"));
    await new Promise((r) => setTimeout(r, 300));
  });

  it("path loss chart shows a step of exactly the NLoS attenuation at a forced transition", async () => {
    // rebuild a clear-LoS world, then drive the obstacle into the link
    // while gNB and UE stand still, so the only path loss change at the
    // transition is the attenuation factor itself
    await ackOf(sendCommand("reset_scenario", { use_case: "O.1" }));
    await ackOf(sendCommand("set_velocity", { entity: "obstacle", vx: 1.2 }));

    let flipTick: number | null = null;
    for (let step = 0; step < 40 && flipTick === null; step++) {
      const tick = store.latest!.tick;
      await ackOf(sendCommand("step_once"));
      await waitFor(() => store.latest!.tick === tick + 1, "stepped snapshot");
      if (store.latest!.los === 1) flipTick = store.latest!.tick;
    }
    expect(flipTick).not.toBeNull();

    const attenuation = store.hello!.chamber.nlos_attenuation;
    const series = pathLossSeries(store.telemetry);
    const idx = series.points.findIndex(([tick]) => tick === flipTick);
    expect(idx).toBeGreaterThan(0);
    const step = series.points[idx][1] - series.points[idx - 1][1];
    expect(Math.abs(step - attenuation)).toBeLessThan(1e-9);
    // and the shading model marks the transition tick as obstructed
    expect(series.nlosRanges.some(([a]) => a === flipTick)).toBe(true);
  });
});
