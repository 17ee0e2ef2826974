// Websocket wrapper with exponential-backoff reconnect. Sends are dropped
// while disconnected (the server is the single source of truth; there is
// nothing useful to queue). Reconnecting resumes rendering from whatever
// the server reports next.

import { parseServerMessage, ServerMessage } from "./protocol.js";

export interface ConnectionHandlers {
  onMessage(msg: ServerMessage): void;
  onStatus(connected: boolean): void;
}

export class Connection {
  private ws: WebSocket | null = null;
  private backoffMs = 500;
  private closed = false;

  constructor(
    private readonly url: string,
    private readonly handlers: ConnectionHandlers,
  ) {}

  connect(): void {
    if (this.closed) {
      return;
    }
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.backoffMs = 500;
      this.handlers.onStatus(true);
    };
    ws.onmessage = (event: MessageEvent) => {
      const msg = parseServerMessage(String(event.data));
      if (msg === null) {
        console.warn("dropping malformed server message", event.data);
        return;
      }
      this.handlers.onMessage(msg);
    };
    ws.onclose = () => {
      this.handlers.onStatus(false);
      this.scheduleReconnect();
    };
    ws.onerror = () => {
      ws.close();
    };
  }

  private scheduleReconnect(): void {
    if (this.closed) {
      return;
    }
    const delay = this.backoffMs;
    this.backoffMs = Math.min(this.backoffMs * 2, 5000);
    setTimeout(() => this.connect(), delay);
  }

  send(text: string): boolean {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(text);
      return true;
    }
    return false;
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}
