/** Single session store: socket callbacks write into it, rendering reads
 * snapshots.  The console is a pure client — every displayed quantity comes
 * from a server message. */

import {
  ErrorMsg,
  GestureMsg,
  JogMsg,
  SafetyMsg,
  StateMsg,
  encode,
  frameMessage,
  gestureHoldMessage,
  helloMessage,
  parseServerLine,
} from "./protocol";
import { Transport } from "./transport";

export type InputMode = "gesture-buttons" | "webcam-landmarks" | "replay-file";
export type Status = "connecting" | "connected" | "disconnected" | "error";

const MAX_SEND_HZ = 30;
const MIN_SEND_GAP_MS = 1000 / MAX_SEND_HZ;

export interface SessionSnapshot {
  status: Status;
  mode: InputMode;
  banner: string | null;
  gesture: GestureMsg | null;
  jog: JogMsg | null;
  state: StateMsg | null;
  safety: SafetyMsg | null;
  roundTripMs: number | null;
  statesSeen: number;
  sent: number;
}

export class ConsoleSession {
  status: Status = "connecting";
  mode: InputMode = "gesture-buttons";
  banner: string | null = null;
  gesture: GestureMsg | null = null;
  jog: JogMsg | null = null;
  state: StateMsg | null = null;
  safety: SafetyMsg | null = null;
  roundTripMs: number | null = null;
  statesSeen = 0;
  sent = 0;

  private transport: Transport;
  private now: () => number;
  private listeners: Array<(s: ConsoleSession) => void> = [];
  private lastSendAt = -Infinity;
  private pendingSendAt: number | null = null;
  private holdTimer: ReturnType<typeof setInterval> | null = null;
  private holdLabel: number | null = null;

  constructor(transport: Transport, now: () => number = () => Date.now()) {
    this.transport = transport;
    this.now = now;
    transport.onLine((line) => this.handleLine(line));
    transport.onClose(() => {
      this.stopHold();
      if (this.status !== "error") this.status = "disconnected";
      this.notify();
    });
    transport.send(encode(helloMessage()));
  }

  subscribe(cb: (s: ConsoleSession) => void): void {
    this.listeners.push(cb);
  }

  snapshot(): SessionSnapshot {
    return {
      status: this.status,
      mode: this.mode,
      banner: this.banner,
      gesture: this.gesture,
      jog: this.jog,
      state: this.state,
      safety: this.safety,
      roundTripMs: this.roundTripMs,
      statesSeen: this.statesSeen,
      sent: this.sent,
    };
  }

  setMode(mode: InputMode): void {
    if (mode === this.mode) return;
    this.stopHold(); // exactly one input mode active at a time
    this.mode = mode;
    this.notify();
  }

  close(): void {
    this.stopHold();
    this.transport.close();
  }

  // --- inbound ---------------------------------------------------------------

  handleLine(line: string): void {
    const msg = parseServerLine(line);
    if (msg === null) {
      console.warn("dropped malformed server message:", line.slice(0, 120));
      return;
    }
    switch (msg.type) {
      case "hello":
        this.status = "connected";
        this.banner = null;
        break;
      case "gesture":
        this.gesture = msg;
        this.noteRoundTrip();
        break;
      case "jog":
        this.jog = msg;
        this.noteRoundTrip();
        break;
      case "state":
        this.state = msg;
        this.statesSeen += 1;
        break;
      case "safety":
        this.safety = msg;
        break;
      case "error":
        this.handleError(msg);
        break;
    }
    this.notify();
  }

  private handleError(msg: ErrorMsg): void {
    if (msg.error === "proto_mismatch") {
      this.status = "error";
      this.banner = `Protocol mismatch: ${msg.detail || "server speaks a different version"}`;
      this.stopHold();
    } else {
      this.banner = `Server error: ${msg.error}${msg.detail ? ` (${msg.detail})` : ""}`;
    }
  }

  private noteRoundTrip(): void {
    if (this.pendingSendAt !== null) {
      this.roundTripMs = this.now() - this.pendingSendAt;
      this.pendingSendAt = null;
    }
  }

  // --- outbound --------------------------------------------------------------

  /** Rate-capped send; silently refuses while not connected. */
  private sendCapped(line: string): boolean {
    if (this.status !== "connected") return false;
    const t = this.now();
    // 1 ms tolerance for integer-ms timer scheduling
    if (t - this.lastSendAt < MIN_SEND_GAP_MS - 1) return false;
    this.lastSendAt = t;
    if (this.pendingSendAt === null) this.pendingSendAt = t;
    this.transport.send(line);
    this.sent += 1;
    return true;
  }

  sendFrame(pts: number[][], t = this.now()): boolean {
    if (this.mode === "gesture-buttons") return false; // frames come from webcam/replay only
    return this.sendCapped(encode(frameMessage(pts, t)));
  }

  sendHold(label: number, t = this.now()): boolean {
    return this.sendCapped(encode(gestureHoldMessage(label, t)));
  }

  /** Button mode: emit gesture_hold at 30 Hz until release(). */
  press(label: number): void {
    if (this.mode !== "gesture-buttons") return;
    this.stopHold();
    this.holdLabel = label;
    this.sendHold(label);
    this.holdTimer = setInterval(() => {
      if (this.holdLabel !== null) this.sendHold(this.holdLabel);
    }, Math.ceil(MIN_SEND_GAP_MS));
  }

  release(): void {
    this.stopHold();
  }

  private stopHold(): void {
    if (this.holdTimer !== null) {
      clearInterval(this.holdTimer);
      this.holdTimer = null;
    }
    this.holdLabel = null;
  }

  private notify(): void {
    for (const cb of this.listeners) cb(this);
  }
}
