/** Wire protocol (proto 1): one JSON object per line, both directions. */

export const PROTO_VERSION = 1;
export const NUM_LANDMARKS = 21;
export const NUM_CLASSES = 8;

export const GESTURE_NAMES = [
  "Fist",
  "OpenPalm",
  "PointUp",
  "PointDown",
  "PointLeft",
  "PointRight",
  "Peace",
  "ThumbUp",
] as const;

export interface HelloMsg {
  type: "hello";
  proto: number;
}

export interface FrameMsg {
  type: "frame";
  t: number;
  pts: number[][]; // 21 x [x, y]
}

export interface GestureHoldMsg {
  type: "gesture_hold";
  label: number;
  t: number;
}

export type ClientMsg = HelloMsg | FrameMsg | GestureHoldMsg;

export interface GestureMsg {
  type: "gesture";
  t: number;
  label: number | null;
  name: string | null;
  conf: number;
}

export interface JogMsg {
  type: "jog";
  t: number;
  v: number[];
  grip: string | null;
}

export interface StateMsg {
  type: "state";
  t: number;
  q: number[]; // 6 joint angles, radians
  ee: number[]; // end-effector position, meters
  R: number[]; // 3x3 rotation, row-major
  grip: string;
}

export interface SafetyMsg {
  type: "safety";
  t: number;
  reasons: string[];
  clamped: boolean;
}

export interface ErrorMsg {
  type: "error";
  error: string;
  detail: string;
}

export type ServerMsg = HelloMsg | GestureMsg | JogMsg | StateMsg | SafetyMsg | ErrorMsg;

export function encode(msg: ClientMsg): string {
  return JSON.stringify(msg);
}

export function helloMessage(): HelloMsg {
  return { type: "hello", proto: PROTO_VERSION };
}

export function frameMessage(pts: number[][], t: number): FrameMsg {
  return { type: "frame", t, pts };
}

export function gestureHoldMessage(label: number, t: number): GestureHoldMsg {
  return { type: "gesture_hold", label, t };
}

/** Parse one server line; returns null (caller logs and drops) on anything
 * that is not a well-formed known message — the view keeps its last good
 * state. */
export function parseServerLine(line: string): ServerMsg | null {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null) return null;
  const msg = raw as Record<string, unknown>;
  switch (msg.type) {
    case "hello":
      return typeof msg.proto === "number" ? (msg as unknown as HelloMsg) : null;
    case "gesture":
      if (msg.label !== null && typeof msg.label !== "number") return null;
      return msg as unknown as GestureMsg;
    case "jog":
      return Array.isArray(msg.v) && msg.v.length === 3 ? (msg as unknown as JogMsg) : null;
    case "state":
      if (!Array.isArray(msg.q) || msg.q.length !== 6) return null;
      if (!Array.isArray(msg.ee) || msg.ee.length !== 3) return null;
      return msg as unknown as StateMsg;
    case "safety":
      return Array.isArray(msg.reasons) ? (msg as unknown as SafetyMsg) : null;
    case "error":
      return typeof msg.error === "string" ? (msg as unknown as ErrorMsg) : null;
    default:
      return null;
  }
}
