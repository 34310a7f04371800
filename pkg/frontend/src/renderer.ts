// Layered canvas compositor. Per frame: video, then background darkens,
// court overlays, the mask-restored player pixels (with their accent
// effects), and labels on top. The context is injected structurally so tests
// can record the call sequence without a DOM.

import { ColorRole, Layer, Primitive, type RenderCommand } from "./protocol.js";

export interface Context2DLike {
  save(): void;
  restore(): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  rect(x: number, y: number, w: number, h: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number,
      counterclockwise?: boolean): void;
  ellipse(x: number, y: number, rx: number, ry: number, rot: number,
          a0: number, a1: number): void;
  fill(rule?: "nonzero" | "evenodd"): void;
  stroke(): void;
  clip(): void;
  drawImage(image: unknown, dx: number, dy: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
  fillStyle: string;
  strokeStyle: string;
  lineWidth: number;
  globalAlpha: number;
  font: string;
  textAlign: string;
  filter: string;
}

export interface FrameSources {
  /** Current video frame (drawn first, restored above overlays). */
  video: unknown;
  /** Video pixels pre-masked to the human foreground, or null when absent. */
  foreground: unknown | null;
  /** Court quad in video pixels; exempt from audience darkening. */
  courtPolygon: Array<[number, number]> | null;
  width: number;
  height: number;
}

const SPOTLIGHT_SQUASH = 0.35; // feet-level ellipses fake the court plane

function sequentialColor(position: number): string {
  const p = Math.min(1, Math.max(0, position));
  const r = Math.round(255 - 205 * p);
  const g = Math.round(230 - 170 * p);
  const b = Math.round(140 - 100 * p);
  return `rgb(${r},${g},${b})`;
}

const ROLE_COLORS: Record<number, string> = {
  [ColorRole.White]: "rgba(255,255,255,0.85)",
  [ColorRole.Green]: "rgba(80,220,100,0.85)",
  [ColorRole.Gold]: "rgb(240,200,60)",
  [ColorRole.Neutral]: "rgb(224,224,224)",
};

export class OverlayRenderer {
  constructor(private ctx: Context2DLike) {}

  /** Composite one frame; null commands = RAW mode (video only). */
  render(sources: FrameSources, commands: RenderCommand[] | null): void {
    const ctx = this.ctx;
    ctx.drawImage(sources.video, 0, 0);
    if (commands === null) return;

    const byLayer = (layer: number) => commands.filter((c) => c.layer === layer);

    for (const cmd of byLayer(Layer.BackgroundDarken)) {
      this.darken(cmd, sources);
    }
    for (const cmd of byLayer(Layer.CourtOverlay)) {
      this.courtOverlay(cmd);
    }
    if (sources.foreground !== null) {
      ctx.drawImage(sources.foreground, 0, 0);
      for (const cmd of byLayer(Layer.ForegroundRestore)) {
        this.foregroundAccent(cmd, sources);
      }
    }
    for (const cmd of byLayer(Layer.Label)) {
      this.label(cmd);
    }
  }

  private darken(cmd: RenderCommand, sources: FrameSources): void {
    const ctx = this.ctx;
    ctx.save();
    ctx.beginPath();
    ctx.rect(0, 0, sources.width, sources.height);
    const audience = cmd.p1 === 1;
    if (audience && sources.courtPolygon && sources.courtPolygon.length >= 3) {
      const [first, ...rest] = sources.courtPolygon;
      ctx.moveTo(first[0], first[1]);
      for (const [x, y] of rest) ctx.lineTo(x, y);
      ctx.closePath();
    }
    if (cmd.p0 > 0) {
      ctx.moveTo(cmd.x + cmd.p0, cmd.y);
      ctx.arc(cmd.x, cmd.y, cmd.p0, 0, Math.PI * 2);
    }
    ctx.fillStyle = `rgba(0,0,0,${cmd.opacity})`;
    ctx.fill("evenodd"); // holes: court polygon and the gaze disk stay bright
    ctx.restore();
  }

  private courtOverlay(cmd: RenderCommand): void {
    const ctx = this.ctx;
    ctx.save();
    switch (cmd.primitive) {
      case Primitive.Spotlight: {
        ctx.globalAlpha = cmd.opacity;
        ctx.fillStyle = ROLE_COLORS[cmd.colorRole] ?? ROLE_COLORS[ColorRole.White];
        ctx.beginPath();
        ctx.ellipse(cmd.x, cmd.y, cmd.p0, cmd.p0 * SPOTLIGHT_SQUASH, 0, 0,
                    Math.PI * 2);
        ctx.fill();
        break;
      }
      case Primitive.OffenseRing: {
        ctx.globalAlpha = cmd.opacity;
        for (const [radius, width, style] of [
          [cmd.p0, 1, ROLE_COLORS[ColorRole.Neutral]],
          [cmd.p1, 1, ROLE_COLORS[ColorRole.Neutral]],
          [cmd.p2, 4, sequentialColor(cmd.p3)],
        ] as Array<[number, number, string]>) {
          ctx.strokeStyle = style;
          ctx.lineWidth = width;
          ctx.beginPath();
          ctx.ellipse(cmd.x, cmd.y, radius, radius * SPOTLIGHT_SQUASH, 0, 0,
                      Math.PI * 2);
          ctx.stroke();
        }
        break;
      }
      case Primitive.DefenseShield: {
        if (cmd.p2 <= 0) break;
        ctx.globalAlpha = cmd.opacity;
        ctx.strokeStyle = ROLE_COLORS[ColorRole.Neutral];
        ctx.lineWidth = Math.max(cmd.p1, 1);
        const span = (cmd.p2 * Math.PI) / 2;
        ctx.beginPath();
        ctx.arc(cmd.x, cmd.y, cmd.p0, cmd.p3 - span, cmd.p3 + span);
        ctx.stroke();
        break;
      }
      case Primitive.Link: {
        ctx.globalAlpha = cmd.opacity;
        ctx.strokeStyle = ROLE_COLORS[ColorRole.Neutral];
        ctx.lineWidth = cmd.p2;
        ctx.beginPath();
        ctx.moveTo(cmd.x, cmd.y);
        ctx.lineTo(cmd.p0, cmd.p1);
        ctx.stroke();
        break;
      }
    }
    ctx.restore();
  }

  private foregroundAccent(cmd: RenderCommand, sources: FrameSources): void {
    // Re-draw the restored player pixels around the anchor with the accent
    // effect; clipping keeps the effect local to the player figure.
    const ctx = this.ctx;
    if (sources.foreground === null) return;
    ctx.save();
    ctx.beginPath();
    const reach = Math.max(cmd.p0 * 3, 60);
    ctx.rect(cmd.x - reach, cmd.y - reach * 3, reach * 2, reach * 4);
    ctx.clip();
    ctx.globalAlpha = cmd.opacity;
    ctx.filter = cmd.colorRole === ColorRole.Glow
      ? "drop-shadow(0 0 12px rgba(120,200,255,0.9)) brightness(1.15)"
      : "brightness(1.35)";
    ctx.drawImage(sources.foreground, 0, 0);
    ctx.restore();
  }

  private label(cmd: RenderCommand): void {
    const ctx = this.ctx;
    ctx.save();
    ctx.font = `${Math.max(10, Math.round(cmd.p0))}px sans-serif`;
    ctx.textAlign = "center";
    ctx.globalAlpha = cmd.opacity;
    ctx.fillStyle = ROLE_COLORS[cmd.colorRole] ?? ROLE_COLORS[ColorRole.Neutral];
    const icon = cmd.icon === 1 ? "◎ " : cmd.icon === 2 ? "⛨ " : "";
    ctx.fillText(icon + cmd.text, cmd.x, cmd.y - 8);
    ctx.restore();
  }
}
