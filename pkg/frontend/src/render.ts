/** View rendering: arm skeleton, gesture/confidence, jog arrow, safety toast,
 * latency readout.  Projection math is kept pure so tests can check the drawn
 * geometry against the `ee` field reported in the same state message. */

import { DhTable, jointPositions } from "./kinematics";
import { SessionSnapshot } from "./session";

export interface Projected {
  points: Array<[number, number]>; // screen-space joint positions, base first
  scale: number;
}

/** Orthographic projection of the arm onto the screen: world x to the right,
 * world z up, world y folded in at 30 degrees for a hint of depth. */
export function projectSkeleton(
  q: number[],
  dh: DhTable,
  width: number,
  height: number,
): Projected {
  const joints = jointPositions(q, dh);
  const cos30 = Math.cos(Math.PI / 6);
  const sin30 = Math.sin(Math.PI / 6);
  const reach = 1.2; // slightly above the arm's max reach in meters
  const scale = Math.min(width, height) / (2 * reach);
  const cx = width / 2;
  const cy = height * 0.55;
  const points = joints.map(([x, y, z]): [number, number] => [
    cx + (x + y * cos30 * 0.4) * scale,
    cy - (z + y * sin30 * 0.4) * scale,
  ]);
  return { points, scale };
}

/** Screen-space point for an arbitrary world position with the same camera. */
export function projectPoint(
  p: number[],
  width: number,
  height: number,
): [number, number] {
  const cos30 = Math.cos(Math.PI / 6);
  const sin30 = Math.sin(Math.PI / 6);
  const reach = 1.2;
  const scale = Math.min(width, height) / (2 * reach);
  return [
    width / 2 + (p[0] + p[1] * cos30 * 0.4) * scale,
    height * 0.55 - (p[2] + p[1] * sin30 * 0.4) * scale,
  ];
}

export function drawArm(
  ctx: CanvasRenderingContext2D,
  snap: SessionSnapshot,
  dh: DhTable,
): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  if (!snap.state) {
    ctx.fillStyle = "#8892a6";
    ctx.font = "14px system-ui";
    ctx.fillText("waiting for robot state…", 16, 28);
    return;
  }
  const { points } = projectSkeleton(snap.state.q, dh, width, height);

  // links
  ctx.lineWidth = 5;
  ctx.lineCap = "round";
  ctx.strokeStyle = "#4a90d9";
  ctx.beginPath();
  ctx.moveTo(points[0][0], points[0][1]);
  for (let i = 1; i < points.length; i++) ctx.lineTo(points[i][0], points[i][1]);
  ctx.stroke();

  // joints
  for (const [x, y] of points) {
    ctx.fillStyle = "#1c2733";
    ctx.beginPath();
    ctx.arc(x, y, 5, 0, 2 * Math.PI);
    ctx.fill();
  }

  // end effector marker drawn from the server-reported ee, not recomputed FK,
  // so a mismatch between the two is visible
  const ee = projectPoint(snap.state.ee, width, height);
  ctx.strokeStyle = snap.state.grip === "closed" ? "#d04545" : "#3cb371";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.arc(ee[0], ee[1], 9, 0, 2 * Math.PI);
  ctx.stroke();

  // active jog arrow from the last jog message
  if (snap.jog && snap.jog.v.some((v) => v !== 0)) {
    const [vx, vy, vz] = snap.jog.v;
    const tip = projectPoint(
      [snap.state.ee[0] + vx * 3, snap.state.ee[1] + vy * 3, snap.state.ee[2] + vz * 3],
      width,
      height,
    );
    ctx.strokeStyle = "#e8a33d";
    ctx.lineWidth = 3;
    ctx.beginPath();
    ctx.moveTo(ee[0], ee[1]);
    ctx.lineTo(tip[0], tip[1]);
    ctx.stroke();
  }
}

export function gestureText(snap: SessionSnapshot): string {
  if (!snap.gesture || snap.gesture.label === null) return "no gesture";
  return `${snap.gesture.name} (${(snap.gesture.conf * 100).toFixed(0)}%)`;
}

export function safetyText(snap: SessionSnapshot): string | null {
  if (!snap.safety || snap.safety.reasons.length === 0) return null;
  const names = snap.safety.reasons
    .map((r) => (r === "joint_limit" ? "joint limit (shoulder lift)" : r.replace("_", " ")))
    .join(", ");
  return `safety: ${names}`;
}

export function latencyText(snap: SessionSnapshot): string {
  if (snap.roundTripMs === null) return "latency: –";
  return `latency: ${snap.roundTripMs.toFixed(0)} ms`;
}
