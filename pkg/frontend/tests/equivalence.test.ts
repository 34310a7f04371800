// The secondary acceptance path: a scripted pointer trace driven through the
// browser client (gaze source -> session client -> wire decode) against the
// real Python server must reproduce the offline replay dump frame-for-frame.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import WebSocket from "ws";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { PointerGazeSource } from "../src/gaze.js";
import { decodeFrame, type GazeSample } from "../src/protocol.js";
import { SessionClient, type SocketLike } from "../src/session.js";
import { ViewerCore } from "../src/viewer.js";

const PY = process.env.HOOPSIGHT_PYTHON ?? "python3";
const FRAMES = 120;

let work: string;
let server: ChildProcess | null = null;
let port: number;
let offlineRecords: Uint8Array[] = [];
let trace: GazeSample[] = [];

function run(args: string[]): void {
  const res = spawnSync(PY, ["-m", "hoopsight.cli", ...args],
                        { encoding: "utf-8" });
  if (res.status !== 0) {
    throw new Error(`hoopsight ${args[0]} failed:\n${res.stderr}`);
  }
}

function splitDump(bytes: Uint8Array): Uint8Array[] {
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  const out: Uint8Array[] = [];
  let pos = 0;
  while (pos < bytes.byteLength) {
    const length = view.getUint32(pos, true);
    out.push(bytes.subarray(pos, pos + 4 + length));
    pos += 4 + length;
  }
  return out;
}

function parseTrace(text: string): GazeSample[] {
  return text.split("\n").filter((l) => l.trim().length > 0).map((line) => {
    const [t, x, y, valid] = line.split(",");
    return { t: Number(t), x: Number(x), y: Number(y), valid: valid === "1" };
  });
}

async function waitForServer(port: number): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const res = await fetch(`http://127.0.0.1:${port}/games`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("server did not come up");
}

function nodeSocket(ws: WebSocket): SocketLike {
  return {
    send: (data) => ws.send(data),
    close: () => ws.close(),
    onMessage: (handler) => ws.on("message", (data: Buffer, isBinary: boolean) => {
      if (isBinary) handler(new Uint8Array(data));
      else handler(data.toString("utf-8"));
    }),
    onClose: (handler) => ws.on("close", () => handler()),
  };
}

beforeAll(async () => {
  work = mkdtempSync(join(tmpdir(), "hoopsight-viewer-"));
  const inputs = join(work, "inputs");
  const bundles = join(work, "bundles");
  run(["fixture", "--out", inputs, "--frames", String(FRAMES)]);
  run(["preprocess",
       "--detections", join(inputs, "detections.csv"),
       "--tracking", join(inputs, "tracking.csv"),
       "--masks", join(inputs, "masks.rle"),
       "--shots", join(inputs, "shots.csv"),
       "--defense", join(inputs, "defense.csv"),
       "--roster", join(inputs, "roster.csv"),
       "--keypoints", join(inputs, "keypoints.csv"),
       "--court", join(inputs, "court.csv"),
       "--game-id", "demo", "--out", join(bundles, "demo")]);
  run(["replay", "--bundle", join(bundles, "demo"),
       "--gaze", join(inputs, "gaze_trace.csv"),
       "--out", join(work, "offline.dump")]);
  offlineRecords = splitDump(new Uint8Array(readFileSync(join(work, "offline.dump"))));
  trace = parseTrace(readFileSync(join(inputs, "gaze_trace.csv"), "utf-8"));

  port = 20000 + Math.floor(Math.random() * 20000);
  server = spawn(PY, ["-m", "hoopsight.cli", "serve",
                      "--bundles", bundles, "--port", String(port)],
                 { stdio: "ignore" });
  await waitForServer(port);
}, 240_000);

afterAll(() => {
  server?.kill();
  if (work) rmSync(work, { recursive: true, force: true });
});

describe("offline/online equivalence through the viewer path", () => {
  it("scripted pointer trace reproduces the offline dump frame-for-frame",
     async () => {
    expect(offlineRecords).toHaveLength(FRAMES);

    // Re-derive the gaze stream by driving the pointer source with the
    // scripted trace: pointer moves (or leaves) then one sampling tick per
    // scripted timestamp.
    let clockNow = 0;
    let move: (x: number, y: number) => void = () => {};
    let leave: () => void = () => {};
    const source = new PointerGazeSource({
      clock: () => clockNow,
      hz: 60,
      attach: (onMove, onLeave) => {
        move = onMove;
        leave = onLeave;
        return () => {};
      },
      interval: () => () => {},
    });
    const captured: GazeSample[] = [];
    source.start((s) => captured.push(s));
    for (const s of trace) {
      if (s.valid) move(s.x, s.y);
      else leave();
      clockNow = s.t;
      source.sample((s2) => captured.push(s2));
    }
    expect(captured).toEqual(trace);  // the capture path is lossless

    const ws = new WebSocket(`ws://127.0.0.1:${port}/session`);
    await new Promise((resolve, reject) => {
      ws.on("open", resolve);
      ws.on("error", reject);
    });

    const rawFrames: Uint8Array[] = [];
    let acks = 0;
    let errors = 0;
    const socket = nodeSocket(ws);
    const tappedSocket: SocketLike = {
      ...socket,
      onMessage: (handler) => socket.onMessage((data) => {
        if (typeof data !== "string") rawFrames.push(data);
        else {
          const msg = JSON.parse(data);
          if (msg.type === "ack") acks++;
          if (msg.type === "error") errors++;
        }
        handler(data);
      }),
    };

    const frames: number[] = [];
    const client = new SessionClient(tappedSocket, {
      onFrame: (f) => frames.push(f.frame),
    });
    const viewer = new ViewerCore(client, { draw: () => {} }, 30);
    viewer.toggleMode("FULL");

    const info = await client.create("demo");
    expect(info.frameCount).toBe(FRAMES);

    for (const s of captured) {
      expect(viewer.onGaze(s)).toBe(true);
    }
    // Acks are answered in order; wait for the last one.
    await waitFor(() => acks === captured.length, 20_000);
    expect(errors).toBe(0);

    for (let i = 0; i < FRAMES; i++) {
      const before = rawFrames.length;
      client.step();
      await waitFor(() => rawFrames.length > before, 10_000);
      expect(Buffer.from(rawFrames[i]).equals(Buffer.from(offlineRecords[i])))
        .toBe(true);
      expect(decodeFrame(rawFrames[i]).frame).toBe(i);
    }
    expect(frames).toEqual([...Array(FRAMES).keys()]);
    client.close();
  }, 120_000);

  it("AUG mode sends no gaze even while samples arrive", async () => {
    const ws = new WebSocket(`ws://127.0.0.1:${port}/session`);
    await new Promise((resolve, reject) => {
      ws.on("open", resolve);
      ws.on("error", reject);
    });
    let sentGaze = 0;
    const socket = nodeSocket(ws);
    const counting: SocketLike = {
      ...socket,
      send: (data) => {
        if (typeof data === "string" && JSON.parse(data).type === "gaze") {
          sentGaze++;
        }
        socket.send(data);
      },
    };
    const client = new SessionClient(counting);
    const viewer = new ViewerCore(client, { draw: () => {} }, 30);
    await client.create("demo");
    viewer.toggleMode("AUG");
    for (const s of trace.slice(0, 20)) viewer.onGaze(s);
    expect(sentGaze).toBe(0);
    viewer.toggleMode("FULL");
    viewer.onGaze(trace[20]);
    expect(sentGaze).toBe(1);
    client.close();
  }, 30_000);
});

async function waitFor(cond: () => boolean, timeoutMs: number): Promise<void> {
  const start = Date.now();
  while (!cond()) {
    if (Date.now() - start > timeoutMs) throw new Error("timeout waiting");
    await new Promise((r) => setTimeout(r, 5));
  }
}
