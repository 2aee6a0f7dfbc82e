/** Replay mode: stream a recorded landmark file (NDJSON of `frame` messages,
 * exactly what webcam mode sends) back to the server at its original
 * relative timing, or as fast as the 30 Hz cap allows when speed === 0. */

import { FrameMsg, NUM_LANDMARKS } from "./protocol";
import { ConsoleSession } from "./session";

export function parseRecording(text: string): FrameMsg[] {
  const frames: FrameMsg[] = [];
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    let msg: unknown;
    try {
      msg = JSON.parse(line);
    } catch {
      throw new Error(`recording line ${i + 1}: not JSON`);
    }
    const f = msg as FrameMsg;
    if (f.type !== "frame" || typeof f.t !== "number" || !Array.isArray(f.pts)) {
      throw new Error(`recording line ${i + 1}: not a frame message`);
    }
    if (f.pts.length !== NUM_LANDMARKS) {
      throw new Error(`recording line ${i + 1}: need ${NUM_LANDMARKS} points`);
    }
    if (frames.length > 0 && f.t < frames[frames.length - 1].t) {
      throw new Error(`recording line ${i + 1}: timestamps must not decrease`);
    }
    frames.push(f);
  }
  return frames;
}

export function serializeRecording(frames: FrameMsg[]): string {
  return frames.map((f) => JSON.stringify(f)).join("\n") + "\n";
}

export interface ReplayHandle {
  done: Promise<number>; // resolves with the number of frames sent
  cancel(): void;
}

/**
 * Send every frame with its original recorded timestamp `t` (so the server's
 * classification sequence is reproducible) while pacing wall-clock delivery
 * by the recorded gaps scaled by 1/speed.  speed === 0 means "no pacing":
 * frames go out back-to-back at the session's 30 Hz cap.
 */
export function replay(session: ConsoleSession, frames: FrameMsg[], speed = 1): ReplayHandle {
  let cancelled = false;
  let timer: ReturnType<typeof setTimeout> | null = null;

  const done = new Promise<number>((resolve) => {
    let i = 0;
    let sentCount = 0;
    const sendNext = () => {
      if (cancelled || i >= frames.length) {
        resolve(sentCount);
        return;
      }
      const frame = frames[i];
      if (session.sendFrame(frame.pts, frame.t)) {
        sentCount += 1;
        i += 1;
      }
      // unsent frames (rate cap) retry on the next tick instead of dropping
      let gapMs = 1000 / 30 + 1;
      if (speed > 0 && i > 0 && i < frames.length) {
        gapMs = Math.max((frames[i].t - frames[i - 1].t) / speed, 0);
      }
      timer = setTimeout(sendNext, gapMs);
    };
    sendNext();
  });

  return {
    done,
    cancel() {
      cancelled = true;
      if (timer !== null) clearTimeout(timer);
    },
  };
}
