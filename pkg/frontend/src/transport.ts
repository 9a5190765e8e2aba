/** Transport abstraction: the browser uses WebSocket, tests may plug in a
 * TCP line-JSON adapter; both carry identical envelopes. */

import type { Envelope } from "./protocol.js";

export interface Transport {
  send(msg: Envelope<unknown>): boolean;
  close(): void;
}

export interface TransportEvents {
  onMessage: (msg: Envelope<unknown>) => void;
  onOpen: () => void;
  onClose: () => void;
}

export class WebSocketTransport implements Transport {
  private ws: WebSocket;

  constructor(url: string, events: TransportEvents) {
    this.ws = new WebSocket(url);
    this.ws.onopen = () => events.onOpen();
    this.ws.onclose = () => events.onClose();
    this.ws.onmessage = (ev) => {
      let msg: Envelope<unknown>;
      try {
        msg = JSON.parse(String(ev.data));
      } catch {
        return;
      }
      events.onMessage(msg);
    };
  }

  send(msg: Envelope<unknown>): boolean {
    if (this.ws.readyState !== WebSocket.OPEN) return false;
    this.ws.send(JSON.stringify(msg));
    return true;
  }

  close(): void {
    this.ws.close();
  }
}
