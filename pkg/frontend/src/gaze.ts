// Gaze sources. The default proxies the mouse pointer; a hardware eye
// tracker plugs in behind the same interface. Samples carry video-clock
// timestamps so the server's state evolution is replayable.

import type { GazeSample } from "./protocol.js";

export interface GazeSource {
  /** Begin emitting samples to the sink; returns a stop function. */
  start(sink: (sample: GazeSample) => void): () => void;
}

export interface PointerGazeOptions {
  /** Current video time in seconds. */
  clock: () => number;
  /** Sampling rate; clamped to a floor of 30 Hz. */
  hz?: number;
  /** Map client (element) coordinates to video pixels. */
  toVideo?: (x: number, y: number) => { x: number; y: number };
  /** Install pointer listeners (defaults to window events in a browser). */
  attach?: (onMove: (x: number, y: number) => void,
            onLeave: () => void) => () => void;
  /** Timer installer, injectable for tests. */
  interval?: (fn: () => void, ms: number) => () => void;
}

export class PointerGazeSource implements GazeSource {
  private clock: () => number;
  private hz: number;
  private toVideo: (x: number, y: number) => { x: number; y: number };
  private attach: (onMove: (x: number, y: number) => void,
                   onLeave: () => void) => () => void;
  private installInterval: (fn: () => void, ms: number) => () => void;
  private last: { x: number; y: number } | null = null;
  private lastT: number | null = null;

  constructor(opts: PointerGazeOptions) {
    this.clock = opts.clock;
    this.hz = Math.max(30, opts.hz ?? 60);
    this.toVideo = opts.toVideo ?? ((x, y) => ({ x, y }));
    this.attach = opts.attach ?? ((onMove, onLeave) => {
      const move = (ev: PointerEvent) => onMove(ev.clientX, ev.clientY);
      const leave = () => onLeave();
      window.addEventListener("pointermove", move);
      document.documentElement.addEventListener("pointerleave", leave);
      return () => {
        window.removeEventListener("pointermove", move);
        document.documentElement.removeEventListener("pointerleave", leave);
      };
    });
    this.installInterval = opts.interval ?? ((fn, ms) => {
      const id = setInterval(fn, ms);
      return () => clearInterval(id);
    });
  }

  /** One sampling tick; exposed so tests can drive a scripted clock. */
  sample(sink: (sample: GazeSample) => void): void {
    const t = this.clock();
    // A paused or stalled video clock must not emit non-monotone timestamps.
    if (this.lastT !== null && t <= this.lastT) return;
    this.lastT = t;
    if (this.last === null) {
      sink({ t, x: 0, y: 0, valid: false });
      return;
    }
    const mapped = this.toVideo(this.last.x, this.last.y);
    sink({ t, x: mapped.x, y: mapped.y, valid: true });
  }

  start(sink: (sample: GazeSample) => void): () => void {
    const detach = this.attach(
      (x, y) => { this.last = { x, y }; },
      () => { this.last = null; });
    const stop = this.installInterval(() => this.sample(sink), 1000 / this.hz);
    return () => {
      detach();
      stop();
    };
  }
}

/** Replays a prerecorded trace on a scripted clock (testing/tooling). */
export class TraceGazeSource implements GazeSource {
  constructor(private samples: GazeSample[]) {}

  start(sink: (sample: GazeSample) => void): () => void {
    for (const s of this.samples) sink(s);
    return () => {};
  }
}
