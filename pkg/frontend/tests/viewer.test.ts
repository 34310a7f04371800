import { describe, expect, it } from "vitest";

import type { FrameMessage, RenderCommand } from "../src/protocol.js";
import { SessionClient, type SocketLike } from "../src/session.js";
import { ViewerCore } from "../src/viewer.js";

class RecordingSocket implements SocketLike {
  sent: any[] = [];
  send(data: string | Uint8Array): void {
    if (typeof data === "string") this.sent.push(JSON.parse(data));
  }
  close(): void {}
  onMessage(): void {}
  onClose(): void {}
}

const cmd: RenderCommand = {
  layer: 1, player: "A1", primitive: 0, colorRole: 0, x: 1, y: 2,
  p0: 3, p1: 0, p2: 0, p3: 0, opacity: 1, ease: 0, text: "", icon: 0,
};

function makeViewer() {
  const socket = new RecordingSocket();
  const client = new SessionClient(socket);
  const drawn: Array<[number, RenderCommand[] | null]> = [];
  const viewer = new ViewerCore(client, {
    draw: (frame, commands) => drawn.push([frame, commands]),
  }, 30);
  return { socket, client, viewer, drawn };
}

const frame = (i: number): FrameMessage => ({ frame: i, commands: [cmd] });

describe("mode semantics", () => {
  it("FULL sends gaze, AUG and RAW do not", () => {
    const { socket, viewer } = makeViewer();
    viewer.toggleMode("FULL");
    expect(viewer.onGaze({ t: 0.1, x: 0, y: 0, valid: true })).toBe(true);
    viewer.toggleMode("AUG");
    expect(viewer.onGaze({ t: 0.2, x: 0, y: 0, valid: true })).toBe(false);
    viewer.toggleMode("RAW");
    expect(viewer.onGaze({ t: 0.3, x: 0, y: 0, valid: true })).toBe(false);
    const gazeMsgs = socket.sent.filter((m) => m.type === "gaze");
    expect(gazeMsgs).toHaveLength(1);
    expect(gazeMsgs[0].t).toBe(0.1);
  });

  it("RAW renders the video only (null commands)", () => {
    const { viewer, drawn } = makeViewer();
    viewer.toggleMode("RAW");
    viewer.onFrame(frame(0));
    viewer.tick(0.0);
    expect(drawn).toEqual([[0, null]]);
  });

  it("AUG renders overlays without sending gaze", () => {
    const { viewer, drawn } = makeViewer();
    viewer.toggleMode("AUG");
    viewer.onFrame(frame(0));
    viewer.tick(0.0);
    expect(drawn[0][1]).toEqual([cmd]);
  });
});

describe("frame pacing", () => {
  it("never renders a frame ahead of the video clock", () => {
    const { viewer, drawn } = makeViewer();
    for (let i = 0; i < 6; i++) viewer.onFrame(frame(i));
    viewer.tick(3 / 30);  // video at frame 3
    expect(viewer.renderedFrame).toBe(3);
    viewer.tick(3 / 30);  // no newer eligible frame
    expect(drawn).toHaveLength(1);
    viewer.tick(10 / 30);
    expect(viewer.renderedFrame).toBe(5);
  });

  it("skips straight to the newest eligible frame", () => {
    const { viewer } = makeViewer();
    for (let i = 0; i < 30; i++) viewer.onFrame(frame(i));
    viewer.tick(1.0);
    expect(viewer.renderedFrame).toBe(29);
  });

  it("renders nothing before the first frame arrives", () => {
    const { viewer, drawn } = makeViewer();
    expect(viewer.tick(0.5)).toBeNull();
    expect(drawn).toHaveLength(0);
  });
});
