/** WebSocket client with automatic reconnect and exponential backoff. */

import { parseEvent, ServiceEvent } from './protocol.js';

export type ConnectionStatus = 'connecting' | 'connected' | 'disconnected';

export class EventSocket {
  private ws: WebSocket | null = null;
  private attempts = 0;
  private closed = false;

  constructor(
    private url: string,
    private onEvent: (event: ServiceEvent) => void,
    private onStatus: (status: ConnectionStatus) => void,
  ) {
    this.connect();
  }

  private connect(): void {
    if (this.closed) return;
    this.onStatus('connecting');
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => {
      this.attempts = 0;
      this.onStatus('connected');
    };
    this.ws.onmessage = (message: MessageEvent) => {
      if (typeof message.data !== 'string') return;
      const event = parseEvent(message.data);
      if (event !== null) {
        this.onEvent(event);
      } else {
        console.warn('malformed event ignored', message.data);
      }
    };
    this.ws.onclose = () => {
      this.onStatus('disconnected');
      this.scheduleReconnect();
    };
    this.ws.onerror = () => {
      this.ws?.close();
    };
  }

  private scheduleReconnect(): void {
    if (this.closed) return;
    const delay = Math.min(500 * 2 ** this.attempts, 15000);
    this.attempts += 1;
    setTimeout(() => this.connect(), delay);
  }

  sendPcm(frame: ArrayBuffer): void {
    if (this.ws?.readyState === WebSocket.OPEN) {
      this.ws.send(frame);
    }
  }

  sendReset(): void {
    if (this.ws?.readyState === WebSocket.OPEN) {
      this.ws.send('reset');
    }
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}
