/** End-to-end tests against a real robot server process: build a quantized
 * model with the CLI, launch `serve`, and drive it through the same
 * ConsoleSession the browser uses (over the TCP protocol port, which shares
 * framing and schema with the WebSocket bridge). */

import { execFile, spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import path from "node:path";
import { promisify } from "node:util";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { FrameMsg, GestureMsg, frameMessage } from "../src/protocol";
import { replay } from "../src/replay";
import { ConsoleSession } from "../src/session";
import { TcpTransport } from "./tcp-transport";

const run = promisify(execFile);
const PY = "python3";
const CLI = ["-m", "gesturebot.cli"];

let work: string;
let server: ChildProcess;
let port: number;

function sleep(ms: number): Promise<void> {
  return new Promise((r) => setTimeout(r, ms));
}

async function waitFor(cond: () => boolean, timeoutMs: number, what: string): Promise<void> {
  const t0 = Date.now();
  while (!cond()) {
    if (Date.now() - t0 > timeoutMs) throw new Error(`timeout waiting for ${what}`);
    await sleep(20);
  }
}

function connect(): ConsoleSession {
  return new ConsoleSession(new TcpTransport("127.0.0.1", port));
}

/** Rebuild raw landmark points from a dataset CSV row: the features are
 * wrist-relative (x, y) pairs, which are themselves a valid frame. */
function framesFromCsv(csvPath: string, count: number): { frames: FrameMsg[]; labels: number[] } {
  const lines = readFileSync(csvPath, "utf-8").trim().split("\n").slice(1);
  const frames: FrameMsg[] = [];
  const labels: number[] = [];
  const stride = Math.max(1, Math.floor(lines.length / count));
  for (let i = 0; i < lines.length && frames.length < count; i += stride) {
    const cells = lines[i].split(",");
    labels.push(Number(cells[0]));
    const pts: number[][] = [];
    for (let j = 0; j < 21; j++) {
      pts.push([Number(cells[1 + 2 * j]), Number(cells[2 + 2 * j])]);
    }
    frames.push(frameMessage(pts, frames.length * 33));
  }
  return { frames, labels };
}

beforeAll(async () => {
  work = mkdtempSync(path.join(tmpdir(), "gbconsole-"));
  const data = path.join(work, "data.csv");
  const model = path.join(work, "model.tgn");
  const qmodel = path.join(work, "model.tgq");
  await run(PY, [...CLI, "--quiet", "--seed", "3", "gen-data", "--per-class", "100", "-o", data]);
  await run(PY, [...CLI, "--quiet", "--seed", "3", "train", "-i", data, "-o", model, "--val-per-class", "25"]);
  await run(PY, [...CLI, "--quiet", "quantize", "-i", model, "--calib", data, "-o", qmodel]);

  server = spawn(PY, [...CLI, "serve", "--port", "0", "-m", qmodel], {
    stdio: ["ignore", "pipe", "pipe"],
    env: { ...process.env, PYTHONUNBUFFERED: "1" },
  });
  port = await new Promise<number>((resolve, reject) => {
    let out = "";
    const timer = setTimeout(() => reject(new Error(`server never printed its port: ${out}`)), 30000);
    server.stdout!.on("data", (chunk) => {
      out += chunk.toString();
      const m = out.match(/protocol port: tcp [\d.]+:(\d+)/);
      if (m) {
        clearTimeout(timer);
        resolve(Number(m[1]));
      }
    });
    server.on("exit", (code) => reject(new Error(`server exited early (${code}): ${out}`)));
  });
}, 120000);

afterAll(() => {
  server?.kill("SIGINT");
  if (work) rmSync(work, { recursive: true, force: true });
});

describe("live console loop", () => {
  it("connects and renders state within a second", async () => {
    const session = connect();
    try {
      await waitFor(() => session.status === "connected", 2000, "hello");
      await waitFor(() => session.state !== null, 1000, "first state message");
      expect(session.state!.q).toHaveLength(6);
      expect(session.state!.ee).toHaveLength(3);
    } finally {
      session.close();
    }
  });

  it("holding a jog button for 1 s raises z monotonically, release stops it", async () => {
    const session = connect();
    try {
      await waitFor(() => session.state !== null, 3000, "state stream");
      const zs: number[] = [];
      session.subscribe((s) => {
        if (s.state) zs.push(s.state.ee[2]);
      });
      session.press(2); // PointUp -> jog z+
      await sleep(1000);
      session.release();
      const heldZs = [...zs];
      expect(session.sent).toBeGreaterThanOrEqual(25); // ~30 Hz for 1 s

      // monotone (non-decreasing) during the hold, with real displacement
      for (let i = 1; i < heldZs.length; i++) {
        expect(heldZs[i]).toBeGreaterThanOrEqual(heldZs[i - 1] - 1e-12);
      }
      expect(heldZs[heldZs.length - 1] - heldZs[0]).toBeGreaterThan(0.005);

      // stop-on-release: within the 300 ms gesture timeout (plus margin) the
      // arm is stationary again
      await sleep(1000);
      const settled = zs[zs.length - 1];
      await sleep(300);
      expect(zs[zs.length - 1]).toBe(settled);
    } finally {
      session.close();
    }
  }, 20000);

  it("replaying a recording twice reproduces the gesture-label sequence exactly", async () => {
    const { frames } = framesFromCsv(path.join(work, "data.csv"), 40);
    const sequences: Array<Array<number | null>> = [];
    for (let k = 0; k < 2; k++) {
      const session = connect();
      try {
        await waitFor(() => session.status === "connected", 3000, "hello");
        session.setMode("replay-file");
        const seen: GestureMsg[] = [];
        let lastGesture: GestureMsg | null = null;
        session.subscribe((s) => {
          if (s.gesture && s.gesture !== lastGesture) {
            lastGesture = s.gesture;
            seen.push(s.gesture);
          }
        });
        const handle = replay(session, frames, 0);
        await handle.done;
        await waitFor(() => seen.length >= frames.length, 10000, "gesture replies");
        sequences.push(seen.slice(0, frames.length).map((g) => g.label));
      } finally {
        session.close();
      }
    }
    expect(sequences[0]).toEqual(sequences[1]);
    expect(new Set(sequences[0]).size).toBeGreaterThan(1); // a real mix of labels
  }, 30000);

  it("latency readout populates from live traffic", async () => {
    const session = connect();
    try {
      await waitFor(() => session.status === "connected", 3000, "hello");
      session.press(7);
      await waitFor(() => session.roundTripMs !== null, 3000, "round trip sample");
      session.release();
      expect(session.roundTripMs!).toBeGreaterThanOrEqual(0);
      expect(session.roundTripMs!).toBeLessThan(1000);
    } finally {
      session.close();
    }
  }, 15000);
});
