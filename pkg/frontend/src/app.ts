// Browser entry point: wires the video element, layered canvas, WebSocket
// session, and the pointer-as-gaze source together.

import { PointerGazeSource } from "./gaze.js";
import { maskToAlpha, parseMaskStream, type RleMask } from "./masks.js";
import { OverlayRenderer, type Context2DLike } from "./renderer.js";
import { SessionClient, wrapWebSocket } from "./session.js";
import { ViewerCore, type ViewerMode } from "./viewer.js";

interface GameMeta {
  game_id: string;
  frame_rate: number;
  frame_count: number;
  width: number;
  height: number;
  court_polygon: Array<[number, number]> | null;
  video: string | null;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

async function fetchMeta(base: string, game: string): Promise<GameMeta> {
  const res = await fetch(`${base}/games/${game}/meta`);
  if (!res.ok) throw new Error(`meta fetch failed: ${res.status}`);
  return (await res.json()) as GameMeta;
}

async function fetchMasks(base: string, game: string): Promise<Map<number, RleMask>> {
  const res = await fetch(`${base}/games/${game}/masks`);
  if (!res.ok) return new Map();
  return parseMaskStream(await res.text());
}

function maskCanvas(mask: RleMask): HTMLCanvasElement {
  const canvas = document.createElement("canvas");
  canvas.width = mask.width;
  canvas.height = mask.height;
  const ctx = canvas.getContext("2d")!;
  ctx.putImageData(new ImageData(maskToAlpha(mask), mask.width, mask.height), 0, 0);
  return canvas;
}

export async function startViewer(): Promise<void> {
  const base = location.origin;
  const games = (await (await fetch(`${base}/games`)).json()) as GameMeta[];
  if (games.length === 0) throw new Error("server has no bundles");
  const meta = await fetchMeta(base, games[0].game_id);
  const masks = await fetchMasks(base, games[0].game_id);

  const video = el<HTMLVideoElement>("video");
  if (meta.video) video.src = `${base}${meta.video}`;
  const canvas = el<HTMLCanvasElement>("overlay");
  canvas.width = meta.width;
  canvas.height = meta.height;
  const ctx = canvas.getContext("2d") as unknown as Context2DLike;
  const renderer = new OverlayRenderer(ctx);

  // Scratch canvas producing the mask-restored player pixels per frame.
  const scratch = document.createElement("canvas");
  scratch.width = meta.width;
  scratch.height = meta.height;
  const scratchCtx = scratch.getContext("2d")!;

  const frameSource: CanvasImageSource = meta.video ? video : makeCourtStandin(meta);

  function foregroundFor(frame: number): HTMLCanvasElement | null {
    const mask = masks.get(frame);
    if (!mask) return null;
    scratchCtx.globalCompositeOperation = "source-over";
    scratchCtx.clearRect(0, 0, meta.width, meta.height);
    scratchCtx.drawImage(frameSource, 0, 0);
    scratchCtx.globalCompositeOperation = "destination-in";
    scratchCtx.drawImage(maskCanvas(mask), 0, 0);
    return scratch;
  }

  const ws = new WebSocket(`${base.replace(/^http/, "ws")}/session`);
  ws.binaryType = "arraybuffer";
  await new Promise((resolve) => ws.addEventListener("open", resolve));
  const client = new SessionClient(wrapWebSocket(ws), {
    onFrame: (frame) => viewer.onFrame(frame),
    onError: (code, message) => console.warn("session error", code, message),
  });

  const viewer = new ViewerCore(client, {
    draw: (frame, commands) => {
      renderer.render({
        video: frameSource,
        foreground: commands === null ? null : foregroundFor(frame),
        courtPolygon: meta.court_polygon,
        width: meta.width,
        height: meta.height,
      }, commands);
    },
  }, meta.frame_rate);

  await client.create(meta.game_id);

  // Pointer-as-gaze at 60 Hz on the video clock; a hardware tracker can be
  // swapped in behind the same GazeSource interface.
  const gaze = new PointerGazeSource({
    clock: () => video.currentTime || performance.now() / 1000,
    hz: 60,
    toVideo: (x, y) => {
      const rect = canvas.getBoundingClientRect();
      return {
        x: ((x - rect.left) / rect.width) * meta.width,
        y: ((y - rect.top) / rect.height) * meta.height,
      };
    },
  });
  gaze.start((sample) => viewer.onGaze(sample));

  for (const mode of ["RAW", "AUG", "FULL"] as ViewerMode[]) {
    el<HTMLButtonElement>(`mode-${mode.toLowerCase()}`)
      .addEventListener("click", () => viewer.toggleMode(mode));
  }
  el<HTMLButtonElement>("play").addEventListener("click", () => {
    video.play().catch(() => {});  // bundles without video use the stand-in
    client.play();
  });
  el<HTMLButtonElement>("pause").addEventListener("click", () => {
    video.pause();
    client.pause();
  });

  const loop = () => {
    viewer.tick(video.currentTime || performance.now() / 1000);
    requestAnimationFrame(loop);
  };
  requestAnimationFrame(loop);
}

/** Flat court backdrop for bundles shipped without a video file. */
function makeCourtStandin(meta: GameMeta): HTMLCanvasElement {
  const canvas = document.createElement("canvas");
  canvas.width = meta.width;
  canvas.height = meta.height;
  const ctx = canvas.getContext("2d")!;
  ctx.fillStyle = "#2a2a33";
  ctx.fillRect(0, 0, meta.width, meta.height);
  if (meta.court_polygon && meta.court_polygon.length >= 3) {
    ctx.fillStyle = "#b8833f";
    ctx.beginPath();
    const [first, ...rest] = meta.court_polygon;
    ctx.moveTo(first[0], first[1]);
    for (const [x, y] of rest) ctx.lineTo(x, y);
    ctx.closePath();
    ctx.fill();
  }
  return canvas;
}

if (typeof document !== "undefined" && document.getElementById("overlay")) {
  startViewer().catch((err) => console.error(err));
}
