// Mode handling and frame pacing: the piece between the socket, the gaze
// source, and the renderer. RAW ignores overlay commands, AUG renders them
// but sends no gaze, FULL also streams gaze samples to the server.

import type { GazeSample, FrameMessage } from "./protocol.js";
import type { SessionClient } from "./session.js";

export type ViewerMode = "RAW" | "AUG" | "FULL";

export interface ViewerHooks {
  /** Draw the chosen frame; commands are null in RAW mode. */
  draw(frame: number, commands: FrameMessage["commands"] | null): void;
}

export class ViewerCore {
  mode: ViewerMode = "FULL";
  private queue: FrameMessage[] = [];
  private lastRendered = -1;
  private frameRate: number;

  constructor(private client: SessionClient, private hooks: ViewerHooks,
              frameRate = 30) {
    this.frameRate = frameRate;
  }

  toggleMode(mode: ViewerMode): void {
    this.mode = mode;
  }

  /** Socket delivery: frames queue until the video clock reaches them. */
  onFrame(msg: FrameMessage): void {
    this.queue.push(msg);
    if (this.queue.length > 240) this.queue.shift();
  }

  /** Pointer/eye-tracker delivery: forwarded only in FULL mode. */
  onGaze(sample: GazeSample): boolean {
    if (this.mode !== "FULL") return false;
    return this.client.submitGaze(sample);
  }

  /**
   * Animation tick. Renders the newest queued frame whose index does not
   * exceed the video's current frame, keeping overlay/video desync within
   * one frame at the nominal rate.
   */
  tick(videoTimeSec: number): number | null {
    const videoFrame = Math.floor(videoTimeSec * this.frameRate + 1e-9);
    let chosen: FrameMessage | null = null;
    while (this.queue.length > 0 && this.queue[0].frame <= videoFrame) {
      chosen = this.queue.shift()!;
    }
    if (chosen === null) return null;
    this.lastRendered = chosen.frame;
    this.hooks.draw(chosen.frame, this.mode === "RAW" ? null : chosen.commands);
    return chosen.frame;
  }

  get renderedFrame(): number {
    return this.lastRendered;
  }
}
