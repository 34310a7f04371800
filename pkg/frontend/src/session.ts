// Session client over an injectable socket, so the same state machine runs
// against a browser WebSocket, a node ws socket, or a test fake.

import { decodeFrame, type ClientMessage, type FrameMessage, type GazeSample,
         type ServerEvent } from "./protocol.js";

export interface SocketLike {
  send(data: string | Uint8Array): void;
  close(): void;
  onMessage(handler: (data: string | Uint8Array) => void): void;
  onClose(handler: () => void): void;
}

export interface SessionInfo {
  session: string;
  frameRate: number;
  frameCount: number;
  width: number;
  height: number;
}

export interface SessionCallbacks {
  onFrame?(frame: FrameMessage): void;
  onState?(playing: boolean, playhead: number, ended: boolean): void;
  onError?(code: string, message?: string): void;
}

/** Wrap a browser/ws WebSocket instance (binaryType must be "arraybuffer"). */
export function wrapWebSocket(ws: {
  send(data: string | ArrayBufferLike | Uint8Array): void;
  close(): void;
  addEventListener(type: string, fn: (ev: any) => void): void;
}): SocketLike {
  return {
    send: (data) => ws.send(data),
    close: () => ws.close(),
    onMessage: (handler) => ws.addEventListener("message", (ev: MessageEvent) => {
      if (typeof ev.data === "string") handler(ev.data);
      else handler(new Uint8Array(ev.data as ArrayBuffer));
    }),
    onClose: (handler) => ws.addEventListener("close", () => handler()),
  };
}

export class SessionClient {
  private socket: SocketLike;
  private callbacks: SessionCallbacks;
  private pendingCreate: ((info: SessionInfo) => void)[] = [];
  private lastGazeT: number | null = null;
  info: SessionInfo | null = null;

  constructor(socket: SocketLike, callbacks: SessionCallbacks = {}) {
    this.socket = socket;
    this.callbacks = callbacks;
    socket.onMessage((data) => this.handle(data));
  }

  private sendJson(msg: ClientMessage): void {
    this.socket.send(JSON.stringify(msg));
  }

  private handle(data: string | Uint8Array): void {
    if (typeof data !== "string") {
      this.callbacks.onFrame?.(decodeFrame(data));
      return;
    }
    const msg = JSON.parse(data) as ServerEvent;
    switch (msg.type) {
      case "created":
        this.info = {
          session: msg.session,
          frameRate: msg.frame_rate,
          frameCount: msg.frame_count,
          width: msg.width,
          height: msg.height,
        };
        this.pendingCreate.shift()?.(this.info);
        break;
      case "state":
        this.callbacks.onState?.(msg.playing, msg.playhead, msg.ended ?? false);
        break;
      case "ack":
        break;
      case "error":
        this.callbacks.onError?.(msg.code, msg.message);
        break;
    }
  }

  create(game: string, config?: unknown): Promise<SessionInfo> {
    return new Promise((resolve) => {
      this.pendingCreate.push(resolve);
      this.sendJson({ type: "create", game, config });
    });
  }

  play(): void {
    this.sendJson({ type: "control", action: "play" });
  }

  pause(): void {
    this.sendJson({ type: "control", action: "pause" });
  }

  seek(frame: number): void {
    // dwell state resets server-side; rebase the local monotonicity watermark
    this.lastGazeT = null;
    this.sendJson({ type: "control", action: "seek", frame });
  }

  /** Pull exactly one frame regardless of play state (lockstep mode). */
  step(): void {
    this.sendJson({ type: "step" });
  }

  /** Video-clock timestamps must be strictly increasing; stale samples drop. */
  submitGaze(sample: GazeSample): boolean {
    if (this.lastGazeT !== null && sample.t <= this.lastGazeT) return false;
    this.lastGazeT = sample.t;
    this.sendJson({ type: "gaze", ...sample });
    return true;
  }

  close(): void {
    this.socket.close();
  }
}
