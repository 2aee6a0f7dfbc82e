/** Minimal standard-DH forward kinematics, just enough to draw the arm
 * skeleton from the six joint angles.  The table itself is served by the
 * robot process at GET /dh so the console never hard-codes geometry; the
 * constants below are only the offline fallback/test fixture. */

export interface DhTable {
  a: number[];
  d: number[];
  alpha: number[];
}

export const UR5_DH: DhTable = {
  a: [0.0, -0.425, -0.39225, 0.0, 0.0, 0.0],
  d: [0.089159, 0.0, 0.0, 0.10915, 0.09465, 0.0823],
  alpha: [Math.PI / 2, 0.0, 0.0, Math.PI / 2, -Math.PI / 2, 0.0],
};

type Mat4 = number[]; // 16, row-major

const IDENTITY: Mat4 = [1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1];

function matMul(a: Mat4, b: Mat4): Mat4 {
  const out = new Array(16).fill(0);
  for (let i = 0; i < 4; i++)
    for (let j = 0; j < 4; j++) {
      let s = 0;
      for (let k = 0; k < 4; k++) s += a[i * 4 + k] * b[k * 4 + j];
      out[i * 4 + j] = s;
    }
  return out;
}

/** One link transform: Rz(theta) Tz(d) Tx(a) Rx(alpha). */
export function dhTransform(theta: number, d: number, a: number, alpha: number): Mat4 {
  const ct = Math.cos(theta);
  const st = Math.sin(theta);
  const ca = Math.cos(alpha);
  const sa = Math.sin(alpha);
  return [
    ct, -st * ca, st * sa, a * ct,
    st, ct * ca, -ct * sa, a * st,
    0, sa, ca, d,
    0, 0, 0, 1,
  ];
}

/** Origins of the base frame plus each link frame: 7 points of [x, y, z]. */
export function jointPositions(q: number[], dh: DhTable = UR5_DH): number[][] {
  if (q.length !== 6) throw new Error(`need 6 joint angles, got ${q.length}`);
  const points: number[][] = [[0, 0, 0]];
  let T = IDENTITY;
  for (let i = 0; i < 6; i++) {
    T = matMul(T, dhTransform(q[i], dh.d[i], dh.a[i], dh.alpha[i]));
    points.push([T[3], T[7], T[11]]);
  }
  return points;
}

export function forwardPosition(q: number[], dh: DhTable = UR5_DH): number[] {
  const pts = jointPositions(q, dh);
  return pts[pts.length - 1];
}
