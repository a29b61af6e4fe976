/** WebSocket transport for the session server. Parses server updates and
 * surfaces connection lifecycle as local ConnectionUpdate values so the whole
 * UI can be driven through a single update stream.
 */

import type { SessionMessage, SessionUpdate } from "./protocol.js";

export type UpdateHandler = (update: SessionUpdate) => void;

export class SessionTransport {
  private ws: WebSocket | null = null;

  constructor(private readonly onUpdate: UpdateHandler) {}

  get connected(): boolean {
    return this.ws !== null && this.ws.readyState === WebSocket.OPEN;
  }

  connect(url: string): void {
    this.disconnect();
    this.onUpdate({ type: "connection", status: "connecting" });
    const ws = new WebSocket(url);
    this.ws = ws;
    ws.onopen = () => {
      if (this.ws === ws) {
        this.onUpdate({ type: "connection", status: "open" });
      }
    };
    ws.onclose = () => {
      if (this.ws === ws) {
        this.ws = null;
        this.onUpdate({ type: "connection", status: "closed" });
      }
    };
    ws.onmessage = (ev: MessageEvent) => {
      if (this.ws !== ws) {
        return;
      }
      let parsed: unknown;
      try {
        parsed = JSON.parse(String(ev.data));
      } catch {
        console.warn("unparseable server message", ev.data);
        return;
      }
      this.onUpdate(parsed as SessionUpdate);
    };
  }

  disconnect(): void {
    if (this.ws !== null) {
      const ws = this.ws;
      this.ws = null;
      ws.close();
      this.onUpdate({ type: "connection", status: "closed" });
    }
  }

  /** Send a client message if the socket is open; returns whether it went out. */
  send(msg: SessionMessage): boolean {
    if (!this.connected || this.ws === null) {
      return false;
    }
    this.ws.send(JSON.stringify(msg));
    return true;
  }
}
