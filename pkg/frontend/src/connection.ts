// WebSocket wiring. Every outbound command carries a fresh correlation
// id that is registered as pending before the frame leaves; the store
// clears it when the matching ack or error comes back.

import { ClientCommand, CommandType, makeCommand, parseServerMessage } from "./protocol";
import type { ViewState } from "./store";

export class Connection {
  private socket: WebSocket | null = null;
  private listeners: Array<() => void> = [];

  constructor(private store: ViewState) {}

  onChange(fn: () => void): void {
    this.listeners.push(fn);
  }

  private notify(): void {
    for (const fn of this.listeners) fn();
  }

  open(url: string): void {
    this.close();
    this.store.setStatus("connecting");
    this.notify();
    const socket = new WebSocket(url);
    this.socket = socket;
    socket.onopen = () => {
      this.store.setStatus("connected");
      this.notify();
    };
    socket.onclose = () => {
      if (this.socket === socket) {
        this.store.setStatus("disconnected");
        this.socket = null;
        this.notify();
      }
    };
    socket.onerror = () => {
      // onclose follows and handles the state change
    };
    socket.onmessage = (frame) => {
      try {
        this.store.apply(parseServerMessage(String(frame.data)));
      } catch (err) {
        this.store.lastError = { id: null, reason: `bad frame: ${String(err)}` };
      }
      this.notify();
    };
  }

  close(): void {
    if (this.socket !== null) {
      const s = this.socket;
      this.socket = null;
      s.close();
      this.store.setStatus("disconnected");
      this.notify();
    }
  }

  /** Send one command; returns its correlation id (or null if offline). */
  send(type: CommandType, payload: Record<string, unknown> = {}): string | null {
    if (this.socket === null || this.socket.readyState !== WebSocket.OPEN) {
      return null;
    }
    const command: ClientCommand = makeCommand(type, payload);
    this.store.registerPending(command.id, command.type);
    this.socket.send(JSON.stringify(command));
    this.notify();
    return command.id;
  }
}
