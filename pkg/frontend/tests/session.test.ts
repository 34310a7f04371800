import { describe, expect, it } from "vitest";

import { encodeFrame, type FrameMessage } from "../src/protocol.js";
import { SessionClient, type SocketLike } from "../src/session.js";

class FakeSocket implements SocketLike {
  sent: unknown[] = [];
  private messageHandler: ((data: string | Uint8Array) => void) | null = null;
  closed = false;

  send(data: string | Uint8Array): void {
    this.sent.push(typeof data === "string" ? JSON.parse(data) : data);
  }

  close(): void {
    this.closed = true;
  }

  onMessage(handler: (data: string | Uint8Array) => void): void {
    this.messageHandler = handler;
  }

  onClose(): void {}

  deliver(data: string | Uint8Array): void {
    this.messageHandler?.(data);
  }

  deliverJson(obj: unknown): void {
    this.deliver(JSON.stringify(obj));
  }
}

const frameMsg = (frame: number): FrameMessage => ({ frame, commands: [] });

describe("SessionClient", () => {
  it("create resolves with the session info", async () => {
    const socket = new FakeSocket();
    const client = new SessionClient(socket);
    const pending = client.create("demo");
    socket.deliverJson({ type: "created", session: "s1", frame_rate: 30,
                         frame_count: 120, width: 640, height: 360 });
    const info = await pending;
    expect(info.frameCount).toBe(120);
    expect(socket.sent[0]).toMatchObject({ type: "create", game: "demo" });
  });

  it("delivers decoded binary frames", () => {
    const socket = new FakeSocket();
    const frames: number[] = [];
    new SessionClient(socket, { onFrame: (f) => frames.push(f.frame) });
    socket.deliver(encodeFrame(frameMsg(7)));
    socket.deliver(encodeFrame(frameMsg(8)));
    expect(frames).toEqual([7, 8]);
  });

  it("drops non-monotone gaze timestamps before sending", () => {
    const socket = new FakeSocket();
    const client = new SessionClient(socket);
    expect(client.submitGaze({ t: 1.0, x: 0, y: 0, valid: true })).toBe(true);
    expect(client.submitGaze({ t: 1.0, x: 1, y: 1, valid: true })).toBe(false);
    expect(client.submitGaze({ t: 0.5, x: 1, y: 1, valid: true })).toBe(false);
    expect(client.submitGaze({ t: 1.5, x: 1, y: 1, valid: true })).toBe(true);
    expect(socket.sent.filter((m: any) => m.type === "gaze")).toHaveLength(2);
  });

  it("seek rebases the gaze watermark", () => {
    const socket = new FakeSocket();
    const client = new SessionClient(socket);
    client.submitGaze({ t: 5.0, x: 0, y: 0, valid: true });
    client.seek(0);
    expect(client.submitGaze({ t: 0.1, x: 0, y: 0, valid: true })).toBe(true);
    expect(socket.sent.at(-2)).toMatchObject({ type: "control", action: "seek",
                                               frame: 0 });
  });

  it("surfaced errors reach the error callback", () => {
    const socket = new FakeSocket();
    const codes: string[] = [];
    new SessionClient(socket, { onError: (code) => codes.push(code) });
    socket.deliverJson({ type: "error", code: "seek_range" });
    expect(codes).toEqual(["seek_range"]);
  });

  it("state updates reach the state callback", () => {
    const socket = new FakeSocket();
    const states: Array<[boolean, number, boolean]> = [];
    new SessionClient(socket, {
      onState: (playing, playhead, ended) => states.push([playing, playhead, ended]),
    });
    socket.deliverJson({ type: "state", playing: true, playhead: 3 });
    socket.deliverJson({ type: "state", playing: false, playhead: 120, ended: true });
    expect(states).toEqual([[true, 3, false], [false, 120, true]]);
  });
});
