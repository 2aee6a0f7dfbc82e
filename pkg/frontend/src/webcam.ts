/** Webcam input mode.  The console does no hand tracking itself; it looks for
 * an in-page tracking provider that emits the 21-landmark schema (for example
 * a MediaPipe HandLandmarker wrapper registered as
 * `window.gesturebotHandTracker`).  When no provider is present the UI falls
 * back to button mode with a notice. */

import { NUM_LANDMARKS } from "./protocol";
import { ConsoleSession } from "./session";

export interface HandTrackerProvider {
  /** Begin streaming landmark frames; returns a stop function. */
  start(onFrame: (pts: number[][], timestampMs: number) => void): () => void;
}

declare global {
  interface Window {
    gesturebotHandTracker?: HandTrackerProvider;
  }
}

export function findHandTracker(): HandTrackerProvider | null {
  if (typeof window === "undefined") return null;
  const provider = window.gesturebotHandTracker;
  return provider && typeof provider.start === "function" ? provider : null;
}

/** Wire a provider into the session; frames are validated and rate-capped by
 * the session itself.  Returns the stop function, or null if unavailable. */
export function startWebcamInput(
  session: ConsoleSession,
  provider: HandTrackerProvider | null = findHandTracker(),
): (() => void) | null {
  if (provider === null) return null;
  return provider.start((pts, timestampMs) => {
    if (Array.isArray(pts) && pts.length === NUM_LANDMARKS) {
      session.sendFrame(pts, timestampMs);
    }
  });
}
