import { describe, expect, it } from "vitest";

import type { Snapshot } from "../src/protocol";
import { ViewState } from "../src/store";

function snap(tick: number, overrides: Partial<Snapshot> = {}): Snapshot {
  return {
    type: "snapshot",
    tick,
    entities: [
      { id: "gnb", kind: "GNB", position: [4, 0.5], velocity: [0, 0], half_size: [0, 0] },
      { id: "ue", kind: "UE", position: [4, 3.5], velocity: [0, 0], half_size: [0, 0] },
      { id: "obstacle", kind: "OBSTACLE", position: [2, 1.6], velocity: [0, 0], half_size: [0.5, 0.2] },
    ],
    los: 0,
    path_loss: 55.0,
    d_ue: 3.0,
    reward: 0.3,
    last_action: 0,
    mode: "simulation",
    epsilon: null,
    ...overrides,
  };
}

describe("ViewState", () => {
  it("rendered tick never decreases", () => {
    const store = new ViewState();
    store.apply(snap(5));
    store.apply(snap(6));
    store.apply(snap(4)); // stale: ignored
    store.apply(snap(6)); // duplicate: ignored
    expect(store.latest?.tick).toBe(6);
    expect(store.staleIgnored).toBe(2);
    expect(store.telemetry.map((p) => p.tick)).toEqual([5, 6]);
  });

  it("keeps a bounded rolling telemetry window", () => {
    const store = new ViewState(10);
    for (let t = 1; t <= 25; t++) store.apply(snap(t, { path_loss: 50 + t }));
    expect(store.telemetry).toHaveLength(10);
    expect(store.telemetry[0].tick).toBe(16);
    expect(store.telemetry[9].pathLoss).toBe(75);
  });

  it("clears pending ids on ack and on error", () => {
    const store = new ViewState();
    store.registerPending("a1", "pause");
    store.registerPending("a2", "resume");
    store.apply({ type: "ack", id: "a1", command: "pause" });
    expect(store.pending.has("a1")).toBe(false);
    expect(store.pending.has("a2")).toBe(true);
    store.apply({ type: "error", id: "a2", reason: "nope" });
    expect(store.pending.size).toBe(0);
    expect(store.lastError?.reason).toBe("nope");
  });

  it("pending ids do not outlive the connection", () => {
    const store = new ViewState();
    store.setStatus("connected");
    store.registerPending("x", "pause");
    store.setStatus("disconnected");
    expect(store.pending.size).toBe(0);
  });

  it("accumulates snapshot drop counts from events", () => {
    const store = new ViewState();
    store.apply({ type: "event", name: "snapshot_drop", detail: { dropped: 3, total_dropped: 3 } });
    store.apply({ type: "event", name: "snapshot_drop", detail: { dropped: 2, total_dropped: 5 } });
    expect(store.droppedTotal).toBe(5);
  });

  it("captures the hello greeting", () => {
    const store = new ViewState();
    store.apply({
      type: "event",
      name: "hello",
      detail: {
        chamber: { width: 8, depth: 5, gnb_track_y: 0.5, tick: 0.2, nlos_attenuation: 20, v_gnb_max: 1, velocity_step: 0.35 },
        reward_gain: 0.75,
        mode: "simulation",
        use_cases: ["S"],
      },
    });
    expect(store.hello?.chamber.width).toBe(8);
    expect(store.hello?.reward_gain).toBe(0.75);
  });

  it("telemetry reflects NLoS flags for shading", () => {
    const store = new ViewState();
    store.apply(snap(1, { los: 0 }));
    store.apply(snap(2, { los: 1, path_loss: 75.0 }));
    expect(store.telemetry[1].los).toBe(1);
  });
});
