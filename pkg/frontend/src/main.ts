import { DhTable, UR5_DH } from "./kinematics";
import { GESTURE_NAMES } from "./protocol";
import { parseRecording, replay } from "./replay";
import { drawArm, gestureText, latencyText, safetyText } from "./render";
import { ConsoleSession, InputMode } from "./session";
import { WebSocketTransport } from "./transport";
import { findHandTracker, startWebcamInput } from "./webcam";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const canvas = $<HTMLCanvasElement>("arm");
const ctx = canvas.getContext("2d")!;
const statusEl = $("status");
const bannerEl = $("banner");
const gestureEl = $("gesture");
const latencyEl = $("latency");
const toastEl = $("toast");
const buttonsEl = $("buttons");
const fileInput = $<HTMLInputElement>("replay-file");

let dh: DhTable = UR5_DH;
let session: ConsoleSession | null = null;
let stopWebcam: (() => void) | null = null;
let toastTimer: ReturnType<typeof setTimeout> | null = null;
let lastSafetyT = -1;

function wsUrl(): string {
  const proto = location.protocol === "https:" ? "wss:" : "ws:";
  return `${proto}//${location.host}/ws`;
}

async function fetchDh(): Promise<void> {
  try {
    const resp = await fetch("/dh");
    if (resp.ok) dh = (await resp.json()) as DhTable;
  } catch {
    console.warn("could not fetch DH table, using built-in UR5 values");
  }
}

function render(): void {
  if (!session) return;
  const snap = session.snapshot();
  statusEl.textContent = snap.status;
  statusEl.className = `status ${snap.status}`;
  bannerEl.textContent = snap.banner ?? "";
  bannerEl.style.display = snap.banner ? "block" : "none";
  gestureEl.textContent = gestureText(snap);
  latencyEl.textContent = latencyText(snap);

  const toast = safetyText(snap);
  if (toast && snap.safety && snap.safety.t !== lastSafetyT) {
    lastSafetyT = snap.safety.t;
    toastEl.textContent = toast;
    toastEl.style.display = "block";
    if (toastTimer) clearTimeout(toastTimer);
    toastTimer = setTimeout(() => (toastEl.style.display = "none"), 4000);
  }
  drawArm(ctx, snap, dh);
}

function connect(): void {
  session?.close();
  session = new ConsoleSession(new WebSocketTransport(wsUrl()));
  session.subscribe(render);
  render();
}

function setMode(mode: InputMode): void {
  if (!session) return;
  stopWebcam?.();
  stopWebcam = null;
  if (mode === "webcam-landmarks") {
    const tracker = findHandTracker();
    if (tracker === null) {
      bannerEl.textContent = "No hand-tracking provider found — using gesture buttons.";
      bannerEl.style.display = "block";
      mode = "gesture-buttons";
    } else {
      session.setMode(mode);
      stopWebcam = startWebcamInput(session, tracker);
      return;
    }
  }
  session.setMode(mode);
}

function buildButtons(): void {
  GESTURE_NAMES.forEach((name, label) => {
    const btn = document.createElement("button");
    btn.textContent = name;
    btn.className = "gesture-btn";
    btn.addEventListener("pointerdown", () => session?.press(label));
    btn.addEventListener("pointerup", () => session?.release());
    btn.addEventListener("pointerleave", () => session?.release());
    buttonsEl.appendChild(btn);
  });
}

fileInput.addEventListener("change", async () => {
  const file = fileInput.files?.[0];
  if (!file || !session) return;
  setMode("replay-file");
  session.setMode("replay-file");
  try {
    const frames = parseRecording(await file.text());
    await replay(session, frames).done;
  } catch (e) {
    bannerEl.textContent = `Replay failed: ${e instanceof Error ? e.message : e}`;
    bannerEl.style.display = "block";
  }
});

for (const mode of ["gesture-buttons", "webcam-landmarks", "replay-file"] as InputMode[]) {
  $(`mode-${mode}`).addEventListener("click", () => setMode(mode));
}
$("reconnect").addEventListener("click", connect);

buildButtons();
fetchDh().then(connect);
