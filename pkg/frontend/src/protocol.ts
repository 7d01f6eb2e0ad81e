// Wire types for the control-server protocol: one JSON document per
// WebSocket frame. Field names mirror the server exactly.

export interface EntitySnap {
  id: "gnb" | "ue" | "obstacle";
  kind: string;
  position: [number, number];
  velocity: [number, number];
  half_size: [number, number];
}

export interface Snapshot {
  type: "snapshot";
  tick: number;
  entities: EntitySnap[];
  los: 0 | 1;
  path_loss: number;
  d_ue: number;
  reward: number;
  last_action: number | null;
  mode: string;
  epsilon: number | null;
}

export interface ChamberInfo {
  width: number;
  depth: number;
  gnb_track_y: number;
  tick: number;
  nlos_attenuation: number;
  v_gnb_max: number;
  velocity_step: number;
}

export interface HelloDetail {
  chamber: ChamberInfo;
  reward_gain: number;
  mode: string;
  use_cases: string[];
}

export interface EventMessage {
  type: "event";
  name: string;
  tick?: number;
  detail: Record<string, unknown>;
}

export interface AckMessage {
  type: "ack";
  id: string | null;
  command: string;
}

export interface ErrorMessage {
  type: "error";
  id: string | null;
  reason: string;
}

export type ServerMessage = Snapshot | EventMessage | AckMessage | ErrorMessage;

export type CommandType =
  | "set_velocity"
  | "set_motion_model"
  | "pause"
  | "resume"
  | "step_once"
  | "set_mode"
  | "load_policy"
  | "set_action_override"
  | "reset_scenario";

export interface ClientCommand {
  type: CommandType;
  id: string;
  [key: string]: unknown;
}

export function parseServerMessage(raw: string): ServerMessage {
  const doc = JSON.parse(raw);
  if (typeof doc !== "object" || doc === null || typeof doc.type !== "string") {
    throw new Error("not a server message");
  }
  switch (doc.type) {
    case "snapshot":
    case "event":
    case "ack":
    case "error":
      return doc as ServerMessage;
    default:
      throw new Error(`unknown message type ${doc.type}`);
  }
}

let commandCounter = 0;

export function freshCorrelationId(): string {
  commandCounter += 1;
  return `ui-${commandCounter.toString(36)}-${Math.floor(Math.random() * 0xffff).toString(16)}`;
}

export function makeCommand(type: CommandType, payload: Record<string, unknown> = {}): ClientCommand {
  return { type, id: freshCorrelationId(), ...payload };
}

export const ACTION_LABELS: Record<number, string> = {
  0: "maintain",
  1: "increment",
  2: "decrement",
};
