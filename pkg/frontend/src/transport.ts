/** Line-oriented transport abstraction so the session logic is identical over
 * a browser WebSocket and the node test harness's raw TCP socket. */

export interface Transport {
  send(line: string): void;
  onLine(cb: (line: string) => void): void;
  onClose(cb: () => void): void;
  close(): void;
}

export class WebSocketTransport implements Transport {
  private ws: WebSocket;
  private lineCb: ((line: string) => void) | null = null;
  private closeCb: (() => void) | null = null;
  private pending: string[] = [];

  constructor(url: string) {
    this.ws = new WebSocket(url);
    this.ws.onopen = () => {
      for (const line of this.pending) this.ws.send(line);
      this.pending = [];
    };
    this.ws.onmessage = (ev) => this.lineCb?.(String(ev.data));
    this.ws.onclose = () => this.closeCb?.();
    this.ws.onerror = () => this.closeCb?.();
  }

  send(line: string): void {
    if (this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(line);
    } else if (this.ws.readyState === WebSocket.CONNECTING) {
      this.pending.push(line);
    }
  }

  onLine(cb: (line: string) => void): void {
    this.lineCb = cb;
  }

  onClose(cb: () => void): void {
    this.closeCb = cb;
  }

  close(): void {
    this.ws.close();
  }
}
