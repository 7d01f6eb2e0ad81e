// Client-side view state. The store mutates only in response to server
// messages (no optimistic updates): controls register a pending command
// id when they send, and the id clears when its ack or error arrives.

import type { HelloDetail, ServerMessage, Snapshot } from "./protocol";

export type ConnectionStatus = "disconnected" | "connecting" | "connected";

export interface TelemetryPoint {
  tick: number;
  pathLoss: number;
  reward: number;
  los: 0 | 1;
}

export interface UiError {
  id: string | null;
  reason: string;
}

const DEFAULT_WINDOW = 300;

export class ViewState {
  latest: Snapshot | null = null;
  hello: HelloDetail | null = null;
  telemetry: TelemetryPoint[] = [];
  windowLength: number;
  status: ConnectionStatus = "disconnected";
  pending = new Map<string, string>(); // correlation id -> command type
  droppedTotal = 0;
  staleIgnored = 0;
  lastError: UiError | null = null;
  recentEvents: string[] = [];
  acked = 0;

  constructor(windowLength: number = DEFAULT_WINDOW) {
    this.windowLength = windowLength;
  }

  get connected(): boolean {
    return this.status === "connected";
  }

  setStatus(status: ConnectionStatus): void {
    this.status = status;
    if (status !== "connected") {
      // replies can never arrive on a dead socket
      this.pending.clear();
    }
  }

  registerPending(id: string, commandType: string): void {
    this.pending.set(id, commandType);
  }

  apply(message: ServerMessage): void {
    switch (message.type) {
      case "snapshot": {
        // the rendered tick never decreases
        if (this.latest !== null && message.tick <= this.latest.tick) {
          this.staleIgnored += 1;
          return;
        }
        this.latest = message;
        this.telemetry.push({
          tick: message.tick,
          pathLoss: message.path_loss,
          reward: message.reward,
          los: message.los,
        });
        if (this.telemetry.length > this.windowLength) {
          this.telemetry.splice(0, this.telemetry.length - this.windowLength);
        }
        return;
      }
      case "ack": {
        if (message.id !== null) {
          this.pending.delete(message.id);
        }
        this.acked += 1;
        return;
      }
      case "error": {
        if (message.id !== null) {
          this.pending.delete(message.id);
        }
        this.lastError = { id: message.id, reason: message.reason };
        return;
      }
      case "event": {
        if (message.name === "hello") {
          this.hello = message.detail as unknown as HelloDetail;
        } else if (message.name === "snapshot_drop") {
          const detail = message.detail as { dropped?: number; total_dropped?: number };
          if (typeof detail.total_dropped === "number") {
            this.droppedTotal = detail.total_dropped;
          } else if (typeof detail.dropped === "number") {
            this.droppedTotal += detail.dropped;
          }
        }
        this.recentEvents.push(message.name);
        if (this.recentEvents.length > 20) {
          this.recentEvents.shift();
        }
        return;
      }
    }
  }
}
